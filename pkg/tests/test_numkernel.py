from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starscar.errors import ConvergenceError
from starscar.graphcore import fourier_matrix
from starscar.numkernel import (
    MAX_DIM,
    adaptive_quadrature,
    characteristic_coefficients,
    eig_dense,
    is_unitary,
    null_space,
    poly_roots,
    snap_to_circle,
)
from starscar.verify import multiset_distance, random_unitary


def test_identity_spectrum():
    e = eig_dense(np.eye(3))
    assert np.allclose(e.values, 1)
    assert np.allclose(np.linalg.norm(e.vectors, axis=0), 1, atol=1e-12)


def test_fourier4_multiplicities():
    # exact oracle: sympy eigenvals of the e^{+2 pi i jk/4}/2 matrix give {1: 2, -1: 1, i: 1}
    vals = eig_dense(fourier_matrix(4)).values
    counts = [int(np.sum(np.abs(vals - t) < 1e-8)) for t in (1, -1, 1j, -1j)]
    assert counts == [2, 1, 1, 0]


def test_eig_rejects_bad_shapes():
    with pytest.raises(ValueError):
        eig_dense(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eig_dense(np.array([[np.nan]]))


def test_eig_dimension_cap():
    with pytest.raises(ValueError, match="exceeds"):
        eig_dense(np.zeros((MAX_DIM + 1, MAX_DIM + 1)))


def test_unitary_residuals_small():
    rng = np.random.default_rng(3)
    for n in (2, 7, 20):
        e = eig_dense(random_unitary(n, rng))
        assert e.max_residual < 1e-9
        assert np.abs(np.abs(e.values) - 1).max() < 1e-9
        assert np.allclose(np.abs(snap_to_circle(e.values)), 1)


def test_null_space_examples():
    assert null_space(np.zeros((2, 2)), 1e-8).shape == (2, 2)
    assert null_space(np.eye(3), 1e-8).shape == (3, 0)
    with pytest.raises(ValueError):
        null_space(np.eye(2), 0.0)


def test_null_space_b1_root():
    U = np.array([[0, -1], [-1, 0]], dtype=complex)
    basis = null_space(np.eye(2) - U, 1e-8)
    assert basis.shape == (2, 1)
    v = basis[:, 0]
    assert abs(abs(np.vdot(v, np.array([1, -1]) / math.sqrt(2))) - 1) < 1e-12


def test_poly_roots_simple():
    r = poly_roots([1, 0, -1])
    assert sorted(r.roots.real) == pytest.approx([-1, 1])
    assert r.residuals.max() < 1e-14


def test_poly_roots_errors():
    with pytest.raises(ValueError):
        poly_roots([3.0])
    with pytest.raises(ValueError):
        poly_roots([0.0, 1.0, 2.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**31))
def test_charpoly_roots_match_eigenvalues(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    roots = poly_roots(characteristic_coefficients(A)).roots
    assert multiset_distance(roots, eig_dense(A).values) < 1e-8


def test_characteristic_coefficients_2x2():
    # det(l - A) = l^2 - tr(A) l + det(A)
    A = np.array([[1, 2], [3, 4]], dtype=complex)
    assert np.allclose(characteristic_coefficients(A), [1, -5, -2])


def test_quadrature_examples():
    assert adaptive_quadrature(lambda x: math.cos(x) ** 2, 0, 2 * math.pi) == pytest.approx(math.pi, abs=1e-12)
    assert adaptive_quadrature(lambda x: math.log(1.0), 0, 2 * math.pi) == 0.0
    f = lambda x: (1 + math.cos(x)) * math.log(1 + math.cos(x)) if 1 + math.cos(x) > 0 else 0.0
    val = adaptive_quadrature(f, 0, 2 * math.pi, points=[math.pi])
    assert val == pytest.approx(2 * math.pi * (1 - math.log(2)), abs=1e-10)


def test_quadrature_reports_failure():
    with pytest.raises(ConvergenceError) as info:
        adaptive_quadrature(lambda x: math.sin(200 * x), 0, 10, tol=1e-13, limit=1)
    assert "abserr" in info.value.diagnostics


def test_is_unitary():
    assert is_unitary(fourier_matrix(5))
    assert not is_unitary(2 * np.eye(2))
