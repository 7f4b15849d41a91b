"""Memory kernels and the decoherence quantities derived from them.

For a real, even correlation function ``chi`` the decoherence rate is
``gamma(t) = int_0^t chi``, its accumulation ``Gamma(t) = int_0^t gamma``,
and the coherence envelope is ``exp(-4 Gamma)``.  The one-qubit effective
environment couples through ``lambda(t)``, whose integral ``Lambda(t)``
obeys ``cos(2 Lambda) = exp(-4 Gamma)``.

The exponential kernel ``chi(t) = kappa/(4 tau_r) exp(-|t|/tau_r)`` has
closed forms for everything; user kernels go through adaptive quadrature.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

DEFAULT_QUAD_TOL = 1e-10
MAX_SUBDIVISIONS = 2**20
DECAY_SLACK = 1e-12


class DeltaKernelError(ValueError):
    """The Markovian (tau_r = 0) kernel is a delta function and has no pointwise value."""


class IntegrationError(RuntimeError):
    def __init__(self, message: str, achieved: float):
        self.achieved = achieved
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")


class NonCPRegimeError(ValueError):
    """Gamma < 0: the effective-environment dilation does not exist."""


@dataclass(frozen=True)
class CorrelationKernel:
    """Memory-kernel descriptor.

    ``kind="exponential"`` uses ``kappa`` and ``tau_r`` (``tau_r = 0`` is the
    Markovian limit).  ``kind="custom"`` integrates ``custom_fn``, which must
    be real and even in its argument; ``kappa`` is then only a rate scale
    used to size default integration grids.
    """

    kind: str = "exponential"
    kappa: float = 1.0
    tau_r: float = 0.0
    custom_fn: Optional[Callable[[float], float]] = None
    quad_tol: float = DEFAULT_QUAD_TOL

    def __post_init__(self):
        if self.kind == "exponential":
            if not self.kappa > 0:
                raise ValueError(f"kappa must be positive, got {self.kappa}")
            if not self.tau_r >= 0:
                raise ValueError(f"tau_r must be non-negative, got {self.tau_r}")
        elif self.kind == "custom":
            if self.custom_fn is None:
                raise ValueError("custom kernel needs custom_fn")
            _check_real_even(self.custom_fn)
        else:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not self.quad_tol > 0:
            raise ValueError("quad_tol must be positive")

    @property
    def markovian(self) -> bool:
        return self.kind == "exponential" and self.tau_r == 0

    @classmethod
    def exponential(cls, kappa: float, tau_r: float, **kw) -> "CorrelationKernel":
        return cls("exponential", kappa=kappa, tau_r=tau_r, **kw)

    @classmethod
    def custom(cls, fn: Callable[[float], float], kappa: float = 1.0, **kw) -> "CorrelationKernel":
        return cls("custom", kappa=kappa, custom_fn=fn, **kw)

    def to_json(self) -> dict:
        if self.kind != "exponential":
            raise ValueError("only exponential kernels serialize to JSON")
        return {"kind": "exponential", "kappa": self.kappa, "tau_r": self.tau_r}

    @classmethod
    def from_json(cls, data) -> "CorrelationKernel":
        """Parse ``{"kind": "exponential", "kappa": k, "tau_r": t}``.

        ``EFFENV_QUAD_TOL`` in the environment overrides the quadrature
        tolerance.
        """
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, dict):
            raise ValueError("kernel JSON must be an object")
        if data.get("kind", "exponential") != "exponential":
            raise ValueError(f"unsupported kernel kind {data.get('kind')!r}")
        try:
            kappa = float(data["kappa"])
            tau_r = float(data["tau_r"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed kernel JSON: {exc}") from exc
        kw = {}
        env_tol = os.environ.get("EFFENV_QUAD_TOL")
        if env_tol:
            kw["quad_tol"] = float(env_tol)
        return cls.exponential(kappa, tau_r, **kw)


def _check_real_even(fn, probes=(0.013, 0.37, 1.9)):
    for t in probes:
        a, b = fn(t), fn(-t)
        if isinstance(a, complex) or isinstance(b, complex) or np.iscomplexobj(a):
            raise ValueError("custom kernels must be real-valued")
        if not math.isclose(float(a), float(b), rel_tol=1e-9, abs_tol=1e-15):
            raise ValueError("custom kernels must be even in tau")


def _quad(fn, a: float, b: float, tol: float) -> float:
    """Adaptive Gauss-Kronrod (QUADPACK qags).

    The subdivision limit grows up to ``MAX_SUBDIVISIONS`` only while the
    subdivision cap is what stops convergence.
    """
    limit = 50
    while True:
        out = integrate.quad(fn, a, b, epsabs=tol, epsrel=0.0, limit=limit, full_output=1)
        val, err = out[0], out[1]
        hit_cap = len(out) > 3 and out[2]["last"] >= limit and "subdivisions" in out[3]
        if err <= tol or not hit_cap or limit >= MAX_SUBDIVISIONS:
            break
        limit = min(limit * 16, MAX_SUBDIVISIONS)
    if not err <= tol:
        raise IntegrationError(f"quadrature on [{a}, {b}] did not reach tolerance {tol}", err)
    return float(val)


def _x_minus_one_minus_expm(x: float) -> float:
    """``x - 1 + exp(-x)`` without cancellation for small ``x``."""
    if x < 0.1:
        term, total = x * x / 2.0, 0.0
        n = 2
        while abs(term) > 1e-18 * abs(total) or total == 0.0:
            total += term
            n += 1
            term *= -x / n
            if term == 0.0:
                break
        return total
    return x + math.expm1(-x)


def chi(k: CorrelationKernel, tau: float) -> float:
    if k.kind == "custom":
        return float(k.custom_fn(tau))
    if k.tau_r == 0:
        raise DeltaKernelError(
            "Markovian kernel is (kappa/2) delta(tau); use gamma()/big_gamma() closed forms"
        )
    return k.kappa / (4.0 * k.tau_r) * math.exp(-abs(tau) / k.tau_r)


def _check_tau(tau: float):
    if not tau >= 0:
        raise ValueError(f"tau must be non-negative, got {tau}")


def gamma(k: CorrelationKernel, tau: float) -> float:
    """Decoherence rate ``int_0^tau chi``."""
    _check_tau(tau)
    if k.kind == "custom":
        if tau == 0:
            return 0.0
        return _quad(k.custom_fn, 0.0, tau, k.quad_tol)
    if k.tau_r == 0:
        return k.kappa / 4.0
    return -k.kappa / 4.0 * math.expm1(-tau / k.tau_r)


def big_gamma(k: CorrelationKernel, tau: float) -> float:
    """Accumulated rate ``int_0^tau gamma``."""
    _check_tau(tau)
    if tau == 0:
        return 0.0
    if k.kind == "custom":
        return _quad(lambda t: gamma(k, t), 0.0, tau, k.quad_tol)
    if k.tau_r == 0:
        return k.kappa * tau / 4.0
    return k.kappa / 4.0 * k.tau_r * _x_minus_one_minus_expm(tau / k.tau_r)


def _checked_big_gamma(k: CorrelationKernel, tau: float) -> float:
    g = big_gamma(k, tau)
    if -4.0 * g > DECAY_SLACK:
        raise NonCPRegimeError(
            f"Gamma({tau}) = {g:.3e} < 0: decay exceeds 1, no effective-environment dilation"
        )
    return max(g, 0.0)


def decay(k: CorrelationKernel, tau: float) -> float:
    """Coherence envelope ``exp(-4 Gamma(tau))``."""
    return math.exp(-4.0 * _checked_big_gamma(k, tau))


def lambda_coupling(k: CorrelationKernel, tau: float) -> float:
    """Time-dependent coupling ``2 gamma e^{-4 Gamma} / sqrt(1 - e^{-8 Gamma})``."""
    if not tau > 0:
        raise ValueError(f"lambda is defined for tau > 0, got {tau}")
    g = big_gamma(k, tau)
    if not g > 0:
        raise NonCPRegimeError(f"Gamma({tau}) = {g:.3e} <= 0: coupling is undefined")
    return 2.0 * gamma(k, tau) * math.exp(-4.0 * g) / math.sqrt(-math.expm1(-8.0 * g))


def capital_lambda(k: CorrelationKernel, tau: float) -> float:
    """Integrated coupling ``Lambda = arccos(exp(-4 Gamma)) / 2`` in ``[0, pi/4]``.

    Evaluated as ``atan2(sqrt(1 - c^2), c) / 2`` so that ``c`` near 1 does
    not lose digits.
    """
    g = _checked_big_gamma(k, tau)
    return 0.5 * math.atan2(math.sqrt(-math.expm1(-8.0 * g)), math.exp(-4.0 * g))


def capital_lambda_quad(k: CorrelationKernel, tau: float, tol: float = 1e-12) -> float:
    """``int_0^tau lambda`` by quadrature in ``u = sqrt(t)``.

    ``lambda`` can blow up like ``t**-1/2`` at the origin (Markovian kernel);
    after the substitution the integrand ``2 u lambda(u**2)`` is bounded.
    Independent of the closed form in :func:`capital_lambda`.
    """
    _check_tau(tau)
    if tau == 0:
        return 0.0
    return _quad(lambda u: 2.0 * u * lambda_coupling(k, u * u), 0.0, math.sqrt(tau), tol)

