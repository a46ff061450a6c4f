"""Structured solver for real pencils  A x = i*lam*B x,  A = -A^T,  B = B^T > 0.

Route: Cholesky B = L L^T, C = L^-1 A L^-T (antisymmetric), Householder
reduction of C to antisymmetric tridiagonal T, then the diagonal unitary
similarity diag(i^k) turns i*T into a real symmetric tridiagonal matrix with
zero diagonal.  The same code runs on float64 arrays and on object arrays of
mpmath numbers (extended precision).
"""
from __future__ import annotations

import mpmath
import numpy as np
import scipy.linalg


class CholeskyFailure(ArithmeticError):
    """B is not numerically positive definite at the working precision."""


def _is_mp(M) -> bool:
    return M.dtype == object


def cholesky(B):
    if not _is_mp(B):
        try:
            return scipy.linalg.cholesky(B, lower=True)
        except np.linalg.LinAlgError as exc:
            raise CholeskyFailure(str(exc)) from exc
    n = B.shape[0]
    L = np.full((n, n), mpmath.mpf(0), dtype=object)
    for j in range(n):
        d = B[j, j] - np.dot(L[j, :j], L[j, :j]) if j else B[j, j]
        if d <= 0:
            raise CholeskyFailure(f"non-positive pivot at column {j}")
        L[j, j] = mpmath.sqrt(d)
        if j + 1 < n:
            rest = B[j + 1:, j] - (L[j + 1:, :j] @ L[j, :j] if j else 0)
            L[j + 1:, j] = rest / L[j, j]
    return L


def solve_lower(L, Y):
    """Solve L X = Y for lower-triangular L."""
    if not _is_mp(L) and not _is_mp(np.asarray(Y)):
        return scipy.linalg.solve_triangular(L, Y, lower=True)
    Y = np.array(Y, dtype=object)
    n = L.shape[0]
    X = np.empty_like(Y)
    for i in range(n):
        acc = Y[i] - (L[i, :i] @ X[:i] if i else 0)
        X[i] = acc / L[i, i]
    return X


def solve_upper_transpose(L, Y):
    """Solve L^T X = Y for lower-triangular L."""
    if not _is_mp(L) and not _is_mp(np.asarray(Y)):
        return scipy.linalg.solve_triangular(L, Y, lower=True, trans="T")
    Y = np.array(Y, dtype=object)
    n = L.shape[0]
    X = np.empty_like(Y)
    for i in range(n - 1, -1, -1):
        acc = Y[i] - (L[i + 1:, i] @ X[i + 1:] if i + 1 < n else 0)
        X[i] = acc / L[i, i]
    return X


def antisymmetric_tridiagonalize(C):
    """Orthogonal Q with Q^T C Q antisymmetric tridiagonal.

    Returns (e, Q) where e[k] = T[k+1, k].  Each Householder step is applied
    as the rank-2 update C <- C + u p^T - p u^T, which keeps C exactly
    antisymmetric in floating point.
    """
    mp = _is_mp(C)
    sqrt = mpmath.sqrt if mp else np.sqrt
    C = np.array(C, dtype=object if mp else float)
    C = (C - C.T) / 2
    n = C.shape[0]
    Q = np.eye(n, dtype=float)
    if mp:
        Q = np.array([[mpmath.mpf(int(i == j)) for j in range(n)] for i in range(n)], dtype=object).reshape(n, n)
    for k in range(n - 2):
        x = C[k + 1:, k]
        alpha = sqrt(np.dot(x, x))
        if alpha == 0:
            continue
        u = np.zeros(n, dtype=C.dtype)
        if mp:
            u[:] = mpmath.mpf(0)
        u[k + 1:] = x
        u[k + 1] += alpha if x[0] >= 0 else -alpha
        beta = 2 / np.dot(u, u)
        p = beta * (C @ u)
        C = C + np.outer(u, p) - np.outer(p, u)
        Q = Q - beta * np.outer(Q @ u, u)
    e = np.array([C[k + 1, k] for k in range(n - 1)], dtype=C.dtype)
    return e, Q


def zero_diagonal_tridiagonal_eigh(e):
    """Eigenpairs of the symmetric tridiagonal matrix with zero diagonal and off-diagonal e."""
    n = len(e) + 1
    if n == 1:
        if _is_mp(e):
            return np.array([mpmath.mpf(0)], dtype=object), np.array([[mpmath.mpf(1)]], dtype=object)
        return np.zeros(1), np.ones((1, 1))
    if not _is_mp(e):
        return scipy.linalg.eigh_tridiagonal(np.zeros(n), np.asarray(e, dtype=float))
    S = mpmath.zeros(n, n)
    for k in range(n - 1):
        S[k, k + 1] = e[k]
        S[k + 1, k] = e[k]
    w, V = mpmath.eigsy(S)
    wv = np.array([w[i] for i in range(n)], dtype=object)
    Vv = np.array([[V[i, j] for j in range(n)] for i in range(n)], dtype=object)
    order = sorted(range(n), key=lambda i: wv[i])
    return wv[order], Vv[:, order]


def solve_skew_pencil(A, B, want_vectors=True):
    """All (lam, x) with A x = i lam B x, eigenvalues ascending.

    ``A`` and ``B`` are float64 arrays or object arrays of mpf.  Vectors are
    returned as columns (complex), or None when not requested.
    """
    mp = _is_mp(B)
    L = cholesky(B)
    C = solve_lower(L, A)
    C = solve_lower(L, C.T).T
    e, Q = antisymmetric_tridiagonalize(C)
    w, G = zero_diagonal_tridiagonal_eigh(e)
    lam = -w
    order = np.argsort(np.array([float(x) for x in lam]), kind="stable")
    lam = lam[order]
    if not want_vectors:
        return lam, None
    G = G[:, order]
    n = len(lam)
    if mp:
        phase = np.array([mpmath.mpc(1, 0) * (1j ** (k % 4)) for k in range(n)], dtype=object)
    else:
        phase = np.array([1j ** (k % 4) for k in range(n)])
    beta = phase[:, None] * G
    X = solve_upper_transpose(L, Q @ beta)
    return lam, X


def pencil_residuals(A, B, lam, X):
    """||A x - i lam B x|| / ||B x|| per eigenpair, in the arithmetic of the inputs."""
    AX = A @ X
    BX = B @ X
    out = []
    for j in range(len(lam)):
        r = AX[:, j] - 1j * lam[j] * BX[:, j]
        if _is_mp(A):
            num = mpmath.sqrt(sum(abs(z) ** 2 for z in r))
            den = mpmath.sqrt(sum(abs(z) ** 2 for z in BX[:, j]))
            out.append(float(num / den))
        else:
            out.append(float(np.linalg.norm(r) / np.linalg.norm(BX[:, j])))
    return np.array(out)
