import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from effenv.hs_space import HSVector, basis, devectorize, hs_inner, vectorize

SX = np.array([[0, 1], [1, 0]], dtype=complex)

complex_entries = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


def square_matrices(d):
    return hnp.arrays(complex, (d, d), elements=complex_entries)


def test_hs_inner_examples():
    assert hs_inner(SX, SX) == 2
    rho = np.array([[0.7, 0.2 - 0.1j], [0.2 + 0.1j, 0.3]])
    assert hs_inner(np.eye(2), rho) == pytest.approx(1)
    e = basis(2)
    assert hs_inner(e[1], e[2]) == 0


def test_hs_inner_shape_errors():
    with pytest.raises(ValueError):
        hs_inner(np.eye(2), np.eye(3))
    with pytest.raises(ValueError):
        hs_inner(np.ones((2, 3)), np.ones((2, 3)))


@given(square_matrices(3), square_matrices(3))
def test_hs_inner_conjugate_symmetric(w, v):
    assert hs_inner(w, v) == pytest.approx(np.conj(hs_inner(v, w)), rel=1e-12, abs=1e-9)


def test_basis_order_and_orthonormality():
    e = basis(2)
    assert len(e) == 4
    np.testing.assert_array_equal(e[1], [[0, 1], [0, 0]])
    np.testing.assert_array_equal(e[2], [[0, 0], [1, 0]])
    gram = np.array([[hs_inner(a, b) for b in e] for a in e])
    np.testing.assert_array_equal(gram, np.eye(4))


@pytest.mark.parametrize("d", [0, -1, 1.5])
def test_basis_rejects_bad_dimension(d):
    with pytest.raises(ValueError):
        basis(d)


def test_vectorize_examples():
    np.testing.assert_array_equal(vectorize(np.eye(2)).coords, [1, 0, 0, 1])
    np.testing.assert_array_equal(vectorize(SX).coords, [0, 1, 1, 0])


def test_vectorize_rejects_non_square():
    with pytest.raises(ValueError):
        vectorize(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        devectorize(np.zeros(5))
    with pytest.raises(ValueError):
        HSVector(2, np.zeros(3))


@given(st.integers(1, 4).flatmap(square_matrices))
def test_round_trip_exact(x):
    np.testing.assert_array_equal(devectorize(vectorize(x)), x)


@settings(max_examples=50)
@given(st.integers(1, 4).flatmap(lambda d: st.tuples(square_matrices(d), square_matrices(d))))
def test_parseval(pair):
    x, y = pair
    lhs = hs_inner(x, y)
    rhs = np.vdot(vectorize(x).coords, vectorize(y).coords)
    assert abs(lhs - rhs) <= 1e-14 * max(1.0, abs(lhs), np.linalg.norm(x) * np.linalg.norm(y))


def test_basis_completeness(rng):
    for d in (1, 2, 3):
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        rebuilt = sum(hs_inner(e, x) * e for e in basis(d))
        assert np.max(np.abs(rebuilt - x)) <= 1e-14
        np.testing.assert_array_equal(vectorize(x).coords, [hs_inner(e, x) for e in basis(d)])


def test_hsvector_is_immutable():
    v = vectorize(np.eye(2))
    with pytest.raises(ValueError):
        v.coords[0] = 5
