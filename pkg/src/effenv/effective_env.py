"""One-qubit effective environment for qubit dephasing, depolarizing and
amplitude damping.

The system qubit couples to a single environment qubit through
``H(t) = lambda(t) sum_ab g_ab sigma_a (x) sigma_b``.  All terms commute at
different times, so the evolution is ``exp(-i Lambda(t) G)`` with
``G = sum g_ab sigma_a (x) sigma_b``.  Tensor order is system (x)
environment, i.e. ``np.kron(rho_S, rho_R)``; the environment is the fast
index of every 4 x 4 matrix.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import correlation
from .correlation import CorrelationKernel
from .superop import KrausSet, SuperOperator, kraus_from_dilation, superop_from_kraus

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
IDENTITY = np.eye(2, dtype=complex)

KINDS = ("dephasing", "depolarizing", "amplitude_damping")
BLOCH_SLACK = 1e-12

_COUPLINGS = {
    "dephasing": np.diag([0.0, 0.0, 1.0]),
    "depolarizing": np.eye(3),
    "amplitude_damping": np.diag([1.0, 1.0, 0.0]),
}
_DEFAULT_R = {
    "dephasing": (0.0, 0.0, 0.0),
    "depolarizing": (0.0, 0.0, 0.0),
    "amplitude_damping": (0.0, 0.0, -1.0),
}


def coupling_matrix(kind: str) -> np.ndarray:
    """Coupling matrix ``g_ab`` for a channel kind."""
    try:
        return _COUPLINGS[kind].copy()
    except KeyError:
        raise ValueError(f"unknown channel kind {kind!r}; expected one of {KINDS}") from None


@dataclass(frozen=True)
class ChannelSpec:
    """Channel kind plus the environment's initial Bloch vector ``r``.

    The allowed ``r`` depends on the kind: dephasing needs ``r_z = 0``,
    depolarizing needs ``r = 0`` and amplitude damping needs
    ``r_x = r_y = 0``.  ``g`` is always derived from ``kind``.
    """

    kind: str
    r: tuple = None
    g: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g = coupling_matrix(self.kind)
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        r = _DEFAULT_R[self.kind] if self.r is None else self.r
        r = tuple(float(v) for v in r)
        if len(r) != 3:
            raise ValueError("environment Bloch vector needs three components")
        if np.linalg.norm(r) > 1 + BLOCH_SLACK:
            raise ValueError(f"environment Bloch vector {r} lies outside the unit ball")
        rx, ry, rz = r
        if self.kind == "dephasing" and rz != 0:
            raise ValueError("dephasing requires an environment unpolarized along z (r_z = 0)")
        if self.kind == "depolarizing" and r != (0.0, 0.0, 0.0):
            raise ValueError("depolarizing requires a completely mixed environment (r = 0)")
        if self.kind == "amplitude_damping" and (rx != 0 or ry != 0):
            raise ValueError("amplitude damping requires r = (0, 0, r_z)")
        object.__setattr__(self, "r", r)

    @property
    def rho_env(self) -> np.ndarray:
        return bloch_to_density(self.r)

    def to_json(self) -> dict:
        return {"kind": self.kind, "r": list(self.r)}

    @classmethod
    def from_json(cls, data) -> "ChannelSpec":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, dict) or "kind" not in data:
            raise ValueError("channel JSON must be an object with a 'kind' field")
        if "g" in data:
            raise ValueError("the coupling matrix is derived from 'kind' and cannot be supplied")
        return cls(data["kind"], data.get("r"))


def check_bloch(s) -> np.ndarray:
    s = np.asarray(s, dtype=float).reshape(-1)
    if s.shape != (3,):
        raise ValueError(f"Bloch vector needs three components, got {s.shape[0]}")
    if s @ s > 1 + BLOCH_SLACK:
        raise ValueError(f"Bloch vector {s.tolist()} has norm {np.linalg.norm(s):.6g} > 1")
    return s


def bloch_to_density(s) -> np.ndarray:
    """``(1 + s . sigma) / 2``."""
    s = np.asarray(s, dtype=float)
    return 0.5 * (IDENTITY + s[0] * SIGMA_X + s[1] * SIGMA_Y + s[2] * SIGMA_Z)


def density_to_bloch(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(p @ rho).real for p in PAULIS])


def partial_trace_env(rho_total: np.ndarray, d_env: int = 2) -> np.ndarray:
    d_sys = rho_total.shape[0] // d_env
    return np.einsum("ikjk->ij", rho_total.reshape(d_sys, d_env, d_sys, d_env))


def generator(spec: ChannelSpec) -> np.ndarray:
    """Hermitian 4 x 4 ``sum_ab g_ab sigma_a (x) sigma_b``."""
    g = spec.g
    return sum(
        g[a, b] * np.kron(PAULIS[a], PAULIS[b]) for a in range(3) for b in range(3) if g[a, b]
    )


def build_unitary(spec: ChannelSpec, capital_lambda: float) -> np.ndarray:
    """``exp(-i Lambda G)`` through the eigen-decomposition of ``G``."""
    w, v = np.linalg.eigh(generator(spec))
    return (v * np.exp(-1j * capital_lambda * w)) @ v.conj().T


def evolve_at_angle(spec: ChannelSpec, s, capital_lambda: float) -> np.ndarray:
    """Dilate, rotate by ``Lambda``, trace out the environment."""
    s = check_bloch(s)
    u = build_unitary(spec, capital_lambda)
    rho_total = np.kron(bloch_to_density(s), spec.rho_env)
    return density_to_bloch(partial_trace_env(u @ rho_total @ u.conj().T))


def evolve(spec: ChannelSpec, s, k: CorrelationKernel, tau: float) -> np.ndarray:
    """Bloch vector at time ``tau`` from the full dilation path."""
    return evolve_at_angle(spec, s, correlation.capital_lambda(k, tau))


def bloch_closed_form(spec: ChannelSpec, s, big_gamma: float) -> np.ndarray:
    if big_gamma < 0:
        raise ValueError("Gamma must be non-negative")
    s = check_bloch(s)
    c4 = np.exp(-4.0 * big_gamma)
    c8 = np.exp(-8.0 * big_gamma)
    if spec.kind == "dephasing":
        return np.array([s[0] * c4, s[1] * c4, s[2]])
    if spec.kind == "depolarizing":
        return s * c8
    rz = spec.r[2]
    return np.array([s[0] * c4, s[1] * c4, rz + (s[2] - rz) * c8])


def evolve_closed_form(spec: ChannelSpec, s, k: CorrelationKernel, tau: float) -> np.ndarray:
    return bloch_closed_form(spec, s, correlation._checked_big_gamma(k, tau))


def channel_kraus(spec: ChannelSpec, k: CorrelationKernel, tau: float) -> KrausSet:
    u = build_unitary(spec, correlation.capital_lambda(k, tau))
    return kraus_from_dilation(u, spec.rho_env)


def channel_superop(spec: ChannelSpec, k: CorrelationKernel, tau: float) -> SuperOperator:
    return superop_from_kraus(channel_kraus(spec, k, tau))


def trajectory(spec: ChannelSpec, s, k: CorrelationKernel, taus, closed_form: bool = False):
    """Bloch vectors on a time grid, shape ``(len(taus), 3)``."""
    step = evolve_closed_form if closed_form else evolve
    return np.array([step(spec, s, k, float(t)) for t in taus])
