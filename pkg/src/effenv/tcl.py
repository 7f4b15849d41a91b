"""Second-order time-convolutionless (TCL) master equation for a qubit.

``d rho / dt = C(t) rho`` with the collision operator

    C(t) rho = sum_ab  gamma_ab(t) [s_b rho, s_a] + conj(gamma_ba(t)) [s_b, rho s_a]

over the Pauli operators ``s_a``.  The rate matrix for an effective-environment
channel is fixed by the short-time matching conditions,
``gamma_ab(t) = gamma(t) Tr[(g.sigma)_a (g.sigma)_b rho_R]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg, optimize

from . import correlation
from .correlation import CorrelationKernel
from .effective_env import PAULIS, ChannelSpec, density_to_bloch
from .superop import SuperOperator, superop_from_map


@dataclass(frozen=True)
class GammaMatrix:
    """Rate matrix ``gamma_ab(t) = rate(t) * structure_ab``."""

    rate: Callable[[float], float]
    structure: np.ndarray

    def __post_init__(self):
        m = np.array(self.structure, dtype=complex)
        if m.shape != (3, 3):
            raise ValueError("structure must be 3x3")
        m.setflags(write=False)
        object.__setattr__(self, "structure", m)

    def __call__(self, tau: float) -> np.ndarray:
        return self.rate(tau) * self.structure

    def hermitian_part(self, tau: float) -> np.ndarray:
        g = self(tau)
        return 0.5 * (g + g.conj().T)

    def antihermitian_part(self, tau: float) -> np.ndarray:
        """Hermitian ``gamma_A`` with ``gamma = gamma_H + i gamma_A``."""
        g = self(tau)
        return (g - g.conj().T) / 2j


def pauli_correlations(g: np.ndarray, rho_env: np.ndarray) -> np.ndarray:
    """``Tr[(g.sigma)_a (g.sigma)_b rho_R]`` for a real coupling matrix ``g``."""
    ops = [sum(g[a, b] * PAULIS[b] for b in range(3)) for a in range(3)]
    return np.array([[np.trace(ops[a] @ ops[b] @ rho_env) for b in range(3)] for a in range(3)])


def gamma_matrix(spec: ChannelSpec, k: CorrelationKernel) -> GammaMatrix:
    return GammaMatrix(lambda t: correlation.gamma(k, t), pauli_correlations(spec.g, spec.rho_env))


def collision_apply(gmat: GammaMatrix, tau: float, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return _collision(gmat(tau), rho)


def _collision(g: np.ndarray, rho: np.ndarray) -> np.ndarray:
    out = np.zeros((2, 2), dtype=complex)
    for a in range(3):
        sa = PAULIS[a]
        for b in range(3):
            gab, gba = g[a, b], g[b, a]
            if gab == 0 and gba == 0:
                continue
            sb = PAULIS[b]
            sbrsa = sb @ rho @ sa
            out += gab * (sbrsa - sa @ sb @ rho) + np.conj(gba) * (sbrsa - rho @ sa @ sb)
    return out


@dataclass(frozen=True)
class Trajectory:
    taus: np.ndarray
    states: np.ndarray
    trace_drift: float
    hermiticity_drift: float

    @property
    def bloch(self) -> np.ndarray:
        return np.array([density_to_bloch(r) for r in self.states])


def default_steps(k: CorrelationKernel, tau_end: float, per_unit: int = 2048) -> int:
    """Step count giving ``per_unit`` steps per ``1/kappa``."""
    return max(1, math.ceil(per_unit * k.kappa * tau_end))


def generator_matrix(gmat: GammaMatrix) -> np.ndarray:
    """4 x 4 matrix ``L`` with ``vec(C(t) rho) = rate(t) L vec(rho)``."""
    return superop_from_map(lambda x: _collision(gmat.structure, x), 2).mat


def _rk4(gmat: GammaMatrix, y0: np.ndarray, tau_end: float, steps: int) -> np.ndarray:
    """Fixed-step RK4 for ``dy/dt = rate(t) L y``; returns every node."""
    gen = generator_matrix(gmat)
    h = tau_end / steps
    ys = np.empty((steps + 1,) + y0.shape, dtype=complex)
    ys[0] = y = y0
    for n in range(steps):
        t = n * h
        r0, rh, r1 = gmat.rate(t), gmat.rate(t + 0.5 * h), gmat.rate(t + h)
        k1 = r0 * (gen @ y)
        k2 = rh * (gen @ (y + 0.5 * h * k1))
        k3 = rh * (gen @ (y + 0.5 * h * k2))
        k4 = r1 * (gen @ (y + h * k3))
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[n + 1] = y
    return ys


def integrate_tcl(gmat: GammaMatrix, rho0, tau_end: float, steps: int) -> Trajectory:
    """Classical fixed-step RK4 on ``d rho/dt = C(t) rho`` over ``[0, tau_end]``.

    The state is never projected back onto density matrices; trace and
    Hermiticity drift are recorded instead.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if not tau_end > 0:
        raise ValueError("tau_end must be positive")
    rho = np.array(rho0, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("rho0 must be 2x2")
    if abs(np.trace(rho) - 1) > 1e-10 or np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("rho0 must be Hermitian with unit trace")

    taus = np.linspace(0.0, tau_end, steps + 1)
    states = _rk4(gmat, rho.reshape(-1), tau_end, steps).reshape(steps + 1, 2, 2)
    trace_drift = float(np.max(np.abs(np.trace(states, axis1=1, axis2=2) - 1)))
    herm_drift = float(np.max(np.abs(states - states.conj().transpose(0, 2, 1))))
    return Trajectory(taus, states, trace_drift, herm_drift)


def tcl_superop(gmat: GammaMatrix, tau_end: float, steps: int) -> SuperOperator:
    """Discrete propagator of the TCL equation over ``[0, tau_end]``.

    RK4 is linear in the initial condition, so propagating the identity
    superoperator column-wise gives the map exactly.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    return SuperOperator(2, _rk4(gmat, np.eye(4, dtype=complex), tau_end, steps)[-1])


@dataclass(frozen=True)
class ConditionReport:
    tau: float
    gamma_tau_product: float
    condition1_residuals: np.ndarray
    condition2: np.ndarray
    target: np.ndarray
    relative_mismatch: float


def verify_conditions(spec: ChannelSpec, k: CorrelationKernel, tau: float) -> ConditionReport:
    """Check the effective environment against the TCL rate matrix at ``tau``.

    Condition 1: ``Tr[D_a rho_R] = 0``.  Condition 2:
    ``int_0^tau Tr[D_a(tau) D_b(t') rho_R] dt' ~ gamma_ab(tau)``; with
    ``D_a(t) = lambda(t) (g.sigma)_a`` the integral is
    ``lambda(tau) Lambda(tau) Tr[(g.sigma)_a (g.sigma)_b rho_R]``.
    Only meaningful where ``|gamma(tau)| tau << 1``; the report does not judge.
    """
    rho_env = spec.rho_env
    lam = correlation.lambda_coupling(k, tau)
    big_lam = correlation.capital_lambda(k, tau)
    ops = [sum(spec.g[a, b] * PAULIS[b] for b in range(3)) for a in range(3)]
    cond1 = np.array([lam * np.trace(op @ rho_env) for op in ops])
    corr = pauli_correlations(spec.g, rho_env)
    cond2 = lam * big_lam * corr
    target = gamma_matrix(spec, k)(tau)
    scale = np.max(np.abs(target))
    mismatch = float(np.max(np.abs(cond2 - target)) / scale)
    return ConditionReport(
        tau=tau,
        gamma_tau_product=abs(correlation.gamma(k, tau)) * tau,
        condition1_residuals=cond1,
        condition2=cond2,
        target=target,
        relative_mismatch=mismatch,
    )


def tau_for_gamma_product(k: CorrelationKernel, product: float) -> float:
    """Solve ``gamma(tau) * tau = product`` (monotone for non-negative kernels)."""
    f = lambda t: correlation.gamma(k, t) * t - product
    hi = 1.0 / k.kappa
    while f(hi) < 0:
        hi *= 2.0
    return optimize.brentq(f, 0.0, hi, xtol=1e-15, rtol=1e-14)


def heisenberg_expansion(h_sys, tau: float) -> np.ndarray:
    """Coefficients ``c_ab`` with ``e^{iHt} s_a e^{-iHt} = sum_b c_ab s_b``."""
    h = np.asarray(h_sys, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError("system Hamiltonian must be 2x2")
    if np.max(np.abs(h - h.conj().T)) > 1e-12:
        raise ValueError("system Hamiltonian must be Hermitian")
    if abs(np.trace(h)) > 1e-12:
        raise ValueError("system Hamiltonian must be traceless")
    u = linalg.expm(1j * tau * h)
    c = np.empty((3, 3))
    for a in range(3):
        sa_t = u @ PAULIS[a] @ u.conj().T
        for b in range(3):
            c[a, b] = 0.5 * np.trace(PAULIS[b] @ sa_t).real
    return c


def dressed_gamma(h_sys, chi_tilde: Callable[[float], np.ndarray], tau: float,
                  tol: float = 1e-10) -> np.ndarray:
    """``gamma_ab(tau) = int_0^tau sum_cd c_ca(tau) chi~_cd(tau - t') c_db(t') dt'``.

    ``chi_tilde`` returns the 3x3 bath correlation matrix at a time lag.
    """
    c_tau = heisenberg_expansion(h_sys, tau)

    def integrand(tp, a, b, part):
        val = (c_tau.T @ np.asarray(chi_tilde(tau - tp)) @ heisenberg_expansion(h_sys, tp))[a, b]
        return val.real if part == 0 else val.imag

    out = np.zeros((3, 3), dtype=complex)
    for a in range(3):
        for b in range(3):
            re = correlation._quad(lambda t: integrand(t, a, b, 0), 0.0, tau, tol)
            im = correlation._quad(lambda t: integrand(t, a, b, 1), 0.0, tau, tol)
            out[a, b] = re + 1j * im
    return out


def compare_with_dilation(spec: ChannelSpec, k: CorrelationKernel, s, tau_end: float,
                          points: int = 2, steps: int | None = None):
    """Euclidean distance between TCL and dilation Bloch vectors on a uniform grid.

    Returns ``(taus, deviations, trajectory)``.  ``steps`` is rounded up to a
    multiple of ``points - 1`` so grid points land on RK4 nodes.
    """
    from .effective_env import bloch_to_density, check_bloch, trajectory

    if points < 2:
        raise ValueError("need at least two grid points")
    s = check_bloch(s)
    intervals = points - 1
    if steps is None:
        steps = default_steps(k, tau_end)
    per = max(1, math.ceil(steps / intervals))
    traj = integrate_tcl(gamma_matrix(spec, k), bloch_to_density(s), tau_end, per * intervals)
    taus = traj.taus[::per]
    tcl_bloch = np.array([density_to_bloch(r) for r in traj.states[::per]])
    exact = trajectory(spec, s, k, taus)
    return taus, np.linalg.norm(tcl_bloch - exact, axis=1), traj
