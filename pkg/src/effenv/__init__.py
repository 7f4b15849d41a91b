"""Completely positive Markovian and non-Markovian qubit decoherence through a
one-qubit effective environment, with a superoperator toolkit and a
second-order TCL master-equation integrator for cross-checks."""

from .correlation import (
    CorrelationKernel,
    DeltaKernelError,
    IntegrationError,
    NonCPRegimeError,
    big_gamma,
    capital_lambda,
    capital_lambda_quad,
    chi,
    decay,
    gamma,
    lambda_coupling,
)
from .effective_env import (
    ChannelSpec,
    bloch_closed_form,
    build_unitary,
    channel_kraus,
    channel_superop,
    coupling_matrix,
    evolve,
)
from .hs_space import HSVector, basis, devectorize, hs_inner, vectorize
from .superop import (
    CPReport,
    CPViolationError,
    KrausSet,
    SuperOperator,
    apply_superop,
    check_cp,
    extract_kraus,
    kraus_from_dilation,
    partial_transpose,
    remix_kraus,
    superop_from_kraus,
    superop_from_map,
)
from .tcl import (
    GammaMatrix,
    Trajectory,
    collision_apply,
    gamma_matrix,
    heisenberg_expansion,
    integrate_tcl,
    verify_conditions,
)

__version__ = "0.1.0"
