"""Superoperators as d**2 x d**2 matrices on Hilbert-Schmidt space.

The matrix element ``S[a*d+b, c*d+e]`` is ``<<e_ab| S(e_ce) >>``, i.e. the
``(a, b)`` entry of the image of the matrix unit ``|c><e|``.  With this
layout a Kraus set ``{K}`` maps to ``sum_K kron(K, conj(K))`` and the
partially transposed matrix ``S#`` is the Choi matrix
``sum_K vec(K) vec(K)^dagger``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hs_space import _as_square, basis, devectorize, hs_inner, vectorize

UNITARY_ATOL = 1e-10
STATE_ATOL = 1e-10


class CPViolationError(ValueError):
    """Raised when an operation requires a completely positive map."""

    def __init__(self, report: "CPReport"):
        self.report = report
        super().__init__(
            f"superoperator is not completely positive "
            f"(min Choi eigenvalue {report.min_eigenvalue:.3e}, "
            f"hermitian-preserving={report.hermitian_preserving})"
        )


@dataclass(frozen=True)
class SuperOperator:
    dim: int
    mat: np.ndarray

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        n = self.dim**2
        if mat.shape != (n, n):
            raise ValueError(f"superoperator on dim {self.dim} must be {n}x{n}, got {mat.shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    def __call__(self, x) -> np.ndarray:
        return apply_superop(self, x)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "mat": [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in self.mat.reshape(-1)],
        }

    @classmethod
    def from_json(cls, data) -> "SuperOperator":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            d = int(data["dim"])
            pairs = np.asarray(data["mat"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed superoperator JSON: {exc}") from exc
        if d < 1 or pairs.shape != (d**4, 2):
            raise ValueError(
                f"malformed superoperator JSON: expected {d**4} [re, im] pairs for dim {d}"
            )
        return cls(d, (pairs[:, 0] + 1j * pairs[:, 1]).reshape(d * d, d * d))


@dataclass(frozen=True)
class KrausSet:
    """Ordered Kraus operators with their completeness residual ``||sum K^dag K - 1||_max``."""

    ops: tuple
    completeness_residual: float = field(init=False)

    def __post_init__(self):
        if len(self.ops) == 0:
            raise ValueError("a Kraus set needs at least one operator")
        ops = []
        for k in self.ops:
            k = np.array(_as_square(k, "Kraus operator"))
            k.setflags(write=False)
            ops.append(k)
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise ValueError("Kraus operators must all have the same dimension")
        object.__setattr__(self, "ops", tuple(ops))
        total = sum(k.conj().T @ k for k in ops)
        residual = float(np.max(np.abs(total - np.eye(d))))
        object.__setattr__(self, "completeness_residual", residual)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __getitem__(self, i):
        return self.ops[i]

    def to_json(self) -> dict:
        return {
            "ops": [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in k.reshape(-1)] for k in self.ops],
            "residual": self.completeness_residual,
        }

    @classmethod
    def from_json(cls, data) -> "KrausSet":
        if isinstance(data, str):
            data = json.loads(data)
        ops = []
        for raw in data["ops"]:
            pairs = np.asarray(raw, dtype=float)
            d = int(round(np.sqrt(pairs.shape[0])))
            if pairs.ndim != 2 or pairs.shape != (d * d, 2):
                raise ValueError("malformed Kraus operator in JSON")
            ops.append((pairs[:, 0] + 1j * pairs[:, 1]).reshape(d, d))
        return cls(tuple(ops))


@dataclass(frozen=True)
class CPReport:
    choi_eigenvalues: tuple
    min_eigenvalue: float
    hermitian_preserving: bool
    is_cp: bool
    tolerance_used: float

    def to_json(self) -> dict:
        return {
            "choi_eigenvalues": list(self.choi_eigenvalues),
            "min_eigenvalue": self.min_eigenvalue,
            "hermitian_preserving": self.hermitian_preserving,
            "is_cp": self.is_cp,
            "tolerance_used": self.tolerance_used,
        }


def apply_superop(s: SuperOperator, x) -> np.ndarray:
    x = _as_square(x)
    if x.shape[0] != s.dim:
        raise ValueError(f"operator of dim {x.shape[0]} given to superoperator of dim {s.dim}")
    return devectorize(s.mat @ vectorize(x).coords)


def superop_from_map(action: Callable[[np.ndarray], np.ndarray], d: int) -> SuperOperator:
    """Tabulate a linear map on d x d matrices in the matrix-unit basis."""
    units = basis(d)
    mat = np.empty((d * d, d * d), dtype=complex)
    for col, e_in in enumerate(units):
        image = _as_square(action(e_in.copy()), "image")
        if image.shape != (d, d):
            raise ValueError(f"action returned shape {image.shape}, expected {(d, d)}")
        for row, e_out in enumerate(units):
            mat[row, col] = hs_inner(e_out, image)
    return SuperOperator(d, mat)


def superop_from_kraus(kraus) -> SuperOperator:
    if not isinstance(kraus, KrausSet):
        kraus = KrausSet(tuple(kraus))
    # S[ab, ce] = sum_mu K[a, c] conj(K[b, e])
    mat = sum(np.kron(k, k.conj()) for k in kraus.ops)
    return SuperOperator(kraus.dim, mat)


def partial_transpose(s: SuperOperator) -> SuperOperator:
    """``S#[ab, ce] = S[ac, be]``; an index permutation, hence an exact involution."""
    d = s.dim
    t = s.mat.reshape(d, d, d, d).transpose(0, 2, 1, 3)
    return SuperOperator(d, t.reshape(d * d, d * d))


def is_trace_preserving(s: SuperOperator, atol: float = 1e-10) -> bool:
    d = s.dim
    # Tr S(e_ce) = sum_a S[aa, ce] must equal delta_ce
    traces = s.mat.reshape(d, d, d * d)[np.arange(d), np.arange(d)].sum(axis=0)
    return bool(np.max(np.abs(traces - np.eye(d).reshape(-1))) <= atol)


def superop_distance(s1: SuperOperator, s2: SuperOperator) -> float:
    return float(np.max(np.abs(s1.mat - s2.mat)))


def _default_tol(choi: np.ndarray) -> float:
    return 1e-10 * max(float(np.max(np.abs(choi))), np.finfo(float).tiny)


def check_cp(s: SuperOperator, tol: float | None = None) -> CPReport:
    """Complete-positivity test via positivity of the Choi matrix ``S#``.

    Eigenvalues are taken from the Hermitian part of ``S#``; magnitudes
    below ``tol`` are reported as exactly zero.
    """
    choi = partial_transpose(s).mat
    if tol is None:
        tol = _default_tol(choi)
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    asym = float(np.max(np.abs(choi - choi.conj().T)))
    hermitian = asym <= tol
    evals = np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))
    evals = np.where(np.abs(evals) < tol, 0.0, evals)
    min_ev = float(evals[0])
    return CPReport(
        choi_eigenvalues=tuple(float(v) for v in evals),
        min_eigenvalue=min_ev,
        hermitian_preserving=hermitian,
        is_cp=bool(min_ev >= -tol and hermitian),
        tolerance_used=float(tol),
    )


def _fix_phase(k: np.ndarray) -> np.ndarray:
    flat = k.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat))]
    if pivot == 0:
        return k
    return k * (abs(pivot) / pivot)


def extract_kraus(s: SuperOperator, rank_tol: float | None = None) -> KrausSet:
    """Canonical Kraus set from the eigen-decomposition of the Choi matrix.

    Operators come out in descending Choi eigenvalue, with near-ties ordered
    by the real parts of their vectorized entries, and each operator's
    largest-magnitude entry made real and positive.
    """
    report = check_cp(s, rank_tol)
    if not report.is_cp:
        raise CPViolationError(report)
    tol = report.tolerance_used
    choi = partial_transpose(s).mat
    evals, evecs = np.linalg.eigh(0.5 * (choi + choi.conj().T))
    d = s.dim
    ops = []
    for lam, vec in zip(evals, evecs.T):
        if lam > tol:
            ops.append((float(lam), _fix_phase(np.sqrt(lam) * devectorize(vec))))
    if not ops:
        raise CPViolationError(report)

    ops.sort(key=lambda item: -item[0])
    ordered = []
    i = 0
    while i < len(ops):
        j = i + 1
        while j < len(ops) and ops[i][0] - ops[j][0] <= tol:
            j += 1
        cluster = sorted(ops[i:j], key=lambda item: tuple(item[1].real.reshape(-1)))
        ordered.extend(k for _, k in cluster)
        i = j
    return KrausSet(tuple(k.reshape(d, d) for k in ordered))


def remix_kraus(kraus: KrausSet, v, pad_zeros: int = 0) -> KrausSet:
    """Unitary remixing ``K'_mu = sum_nu V[mu, nu] K_nu`` after zero-padding."""
    if pad_zeros < 0:
        raise ValueError("pad_zeros must be non-negative")
    v = np.asarray(v, dtype=complex)
    n = len(kraus) + pad_zeros
    if v.shape != (n, n):
        raise ValueError(f"remixing matrix must be {n}x{n}, got {v.shape}")
    if np.max(np.abs(v.conj().T @ v - np.eye(n))) > UNITARY_ATOL:
        raise ValueError("remixing matrix is not unitary")
    d = kraus.dim
    stack = np.concatenate([np.stack(kraus.ops), np.zeros((pad_zeros, d, d), dtype=complex)])
    mixed = np.einsum("mn,nij->mij", v, stack)
    return KrausSet(tuple(mixed))


def _validate_state(rho: np.ndarray, atol: float = STATE_ATOL) -> np.ndarray:
    rho = _as_square(rho, "environment state")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("environment state is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError("environment state does not have unit trace")
    if np.linalg.eigvalsh(rho)[0] < -atol:
        raise ValueError("environment state is not positive semidefinite")
    return rho


def kraus_from_dilation(u, rho_env) -> KrausSet:
    """Kraus set of ``rho -> Tr_R[U (rho x rho_R) U^dagger]``.

    ``U`` acts on system (x) environment with the environment as the fast
    tensor index.  ``K_nm = <n|U|m> sqrt(p_m)`` over the eigenbasis of
    ``rho_R``; terms with ``p_m = 0`` are dropped.
    """
    u = _as_square(u, "dilation unitary")
    rho_env = _validate_state(rho_env)
    n = u.shape[0]
    if np.max(np.abs(u.conj().T @ u - np.eye(n))) > UNITARY_ATOL:
        raise ValueError("dilation operator is not unitary")
    d_env = rho_env.shape[0]
    d_sys, rem = divmod(n, d_env)
    if rem:
        raise ValueError(f"unitary of size {n} is incompatible with environment dim {d_env}")
    p, vecs = np.linalg.eigh(0.5 * (rho_env + rho_env.conj().T))
    u4 = u.reshape(d_sys, d_env, d_sys, d_env)
    ops = []
    for m in range(d_env):
        if p[m] <= STATE_ATOL:
            continue
        for nn in range(d_env):
            # <n| U |m> with |n>, |m> eigenvectors of rho_R
            k = np.einsum("p,ipjq,q->ij", vecs[:, nn].conj(), u4, vecs[:, m])
            ops.append(np.sqrt(p[m]) * k)
    return KrausSet(tuple(ops))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
