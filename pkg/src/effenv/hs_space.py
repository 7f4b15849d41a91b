"""Hilbert-Schmidt space of d x d operators.

Operators are identified with length-d**2 coordinate vectors in the
matrix-unit basis ``e_ab = |a><b|``, ordered row-major so that the
coordinate of ``e_ab`` sits at index ``a*d + b``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_ATOL = 1e-12


def _as_square(x, name: str = "operator") -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class HSVector:
    """Coordinates of an operator in the row-major matrix-unit basis."""

    dim: int
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=complex).reshape(-1)
        if self.dim < 1 or coords.size != self.dim**2:
            raise ValueError(
                f"HSVector of dim {self.dim} needs {self.dim**2} coordinates, "
                f"got {coords.size}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)


def hs_inner(w, v) -> complex:
    """Hilbert-Schmidt inner product ``Tr(w^dagger v)``."""
    w = _as_square(w, "w")
    v = _as_square(v, "v")
    if w.shape != v.shape:
        raise ValueError(f"dimension mismatch: {w.shape} vs {v.shape}")
    # Tr(w^dagger v) = sum_ab conj(w_ab) v_ab
    return complex(np.vdot(w, v))


def basis(d: int) -> list[np.ndarray]:
    """Matrix units ``e_ab = |a><b|`` in row-major order."""
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    d = int(d)
    units = []
    for a in range(d):
        for b in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[a, b] = 1.0
            units.append(e)
    return units


def vectorize(x) -> HSVector:
    """Expand an operator in the matrix-unit basis."""
    x = _as_square(x)
    return HSVector(x.shape[0], x.reshape(-1).copy())


def devectorize(v) -> np.ndarray:
    """Inverse of :func:`vectorize`.

    Accepts an :class:`HSVector` or any flat sequence whose length is a
    perfect square.
    """
    if isinstance(v, HSVector):
        d, coords = v.dim, v.coords
    else:
        coords = np.asarray(v, dtype=complex).reshape(-1)
        d = int(round(np.sqrt(coords.size)))
        if d < 1 or d * d != coords.size:
            raise ValueError(f"coordinate length {coords.size} is not a perfect square")
    return np.array(coords, dtype=complex).reshape(d, d)


def allclose_scaled(x, y, atol: float = DEFAULT_ATOL) -> bool:
    """Max-entry comparison with tolerance scaled by the larger max-norm."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        return False
    scale = max(1.0, np.max(np.abs(x), initial=0.0), np.max(np.abs(y), initial=0.0))
    return bool(np.max(np.abs(x - y), initial=0.0) <= atol * scale)
