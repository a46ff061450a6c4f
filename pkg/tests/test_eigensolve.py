import mpmath
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from inertial_modes.eigensolve import (
    CholeskyFailure,
    antisymmetric_tridiagonalize,
    pencil_residuals,
    solve_skew_pencil,
)


def random_pencil(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n))
    A = M - M.T
    R = rng.standard_normal((n, n))
    B = R @ R.T + n * np.eye(n)
    return A, B


def test_two_by_two_examples():
    A = np.array([[0.0, -1.0], [1.0, 0.0]])
    lam, _ = solve_skew_pencil(A, np.eye(2))
    assert np.allclose(lam, [-1, 1], atol=1e-15)
    lam, _ = solve_skew_pencil(A, np.diag([1.0, 4.0]))
    assert np.allclose(lam, [-0.5, 0.5], atol=1e-15)


@given(st.integers(1, 14), st.integers(0, 10_000))
def test_matches_dense_generalized_solver(n, seed):
    A, B = random_pencil(n, seed)
    lam, X = solve_skew_pencil(A, B)
    ref = np.sort(np.real(scipy.linalg.eigvals(A, 1j * B)))
    assert np.allclose(lam, ref, atol=1e-10)
    assert np.max(pencil_residuals(A, B, lam, X)) < 1e-12
    assert np.allclose(lam, -lam[::-1], atol=1e-12)


@given(st.integers(3, 12), st.integers(0, 10_000))
def test_tridiagonalization_is_orthogonal_similarity(n, seed):
    C, _ = random_pencil(n, seed)
    e, Q = antisymmetric_tridiagonalize(C)
    T = np.diag(e, -1) - np.diag(e, 1)
    assert np.allclose(Q.T @ Q, np.eye(n), atol=1e-13)
    assert np.allclose(Q @ T @ Q.T, C, atol=1e-12)


def test_extended_precision_agrees():
    A, B = random_pencil(7, 3)
    lam, _ = solve_skew_pencil(A, B)
    with mpmath.workprec(160):
        Am = np.array([[mpmath.mpf(x) for x in row] for row in A], dtype=object)
        Bm = np.array([[mpmath.mpf(x) for x in row] for row in B], dtype=object)
        lm, Xm = solve_skew_pencil(Am, Bm)
        res = pencil_residuals(Am, Bm, lm, Xm)
    assert np.allclose([float(x) for x in lm], lam, atol=1e-13)
    assert max(res) < 1e-40


def test_indefinite_gram_is_rejected():
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    with pytest.raises(CholeskyFailure):
        solve_skew_pencil(A, np.diag([1.0, -1.0]))
