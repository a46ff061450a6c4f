"""Bridge between Fraction-valued data and flint's exact rational matrices."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

import flint


def fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, int):
        return flint.fmpq(x)
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def to_fraction(x: flint.fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def matrix(rows: Sequence[Sequence]) -> flint.fmpq_mat:
    """Dense fmpq_mat from a list of rows."""
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    return flint.fmpq_mat(nr, nc, [fmpq(x) for row in rows for x in row])


def from_columns(cols: Sequence[Sequence]) -> flint.fmpq_mat:
    """Matrix whose j-th column is cols[j]."""
    nc = len(cols)
    nr = len(cols[0]) if nc else 0
    flat = [None] * (nr * nc)
    for j, col in enumerate(cols):
        for i, x in enumerate(col):
            flat[i * nc + j] = fmpq(x)
    return flint.fmpq_mat(nr, nc, flat)


def to_rows(M: flint.fmpq_mat) -> list[list[Fraction]]:
    nr, nc = M.nrows(), M.ncols()
    ent = M.entries()
    return [[to_fraction(ent[i * nc + j]) for j in range(nc)] for i in range(nr)]


def column(M: flint.fmpq_mat, j: int) -> list[Fraction]:
    return [to_fraction(M[i, j]) for i in range(M.nrows())]


def columns(M: flint.fmpq_mat, idx: Sequence[int]) -> flint.fmpq_mat:
    nr = M.nrows()
    ent = M.entries()
    nc = M.ncols()
    return flint.fmpq_mat(nr, len(idx), [ent[i * nc + j] for i in range(nr) for j in idx])


def rows(M: flint.fmpq_mat, idx: Sequence[int]) -> flint.fmpq_mat:
    nc = M.ncols()
    ent = M.entries()
    return flint.fmpq_mat(len(idx), nc, [ent[i * nc + j] for i in idx for j in range(nc)])


def hstack(a: flint.fmpq_mat, b: flint.fmpq_mat) -> flint.fmpq_mat:
    if a.nrows() != b.nrows():
        raise ValueError("row mismatch")
    ea, eb = a.entries(), b.entries()
    na, nb = a.ncols(), b.ncols()
    flat = []
    for i in range(a.nrows()):
        flat.extend(ea[i * na:(i + 1) * na])
        flat.extend(eb[i * nb:(i + 1) * nb])
    return flint.fmpq_mat(a.nrows(), na + nb, flat)


def to_integer_rows(M: flint.fmpq_mat) -> flint.fmpz_mat:
    """Scale every row by the lcm of its denominators (row space unchanged)."""
    nr, nc = M.nrows(), M.ncols()
    ent = M.entries()
    flat = []
    for i in range(nr):
        row = ent[i * nc:(i + 1) * nc]
        d = 1
        for x in row:
            d = lcm(d, int(x.q))
        flat.extend(int(x.p) * (d // int(x.q)) for x in row)
    return flint.fmpz_mat(nr, nc, flat)


def to_integer_columns(M: flint.fmpq_mat) -> flint.fmpz_mat:
    return to_integer_rows(M.transpose()).transpose()


def pivot_columns(M: flint.fmpq_mat) -> list[int]:
    """Pivot columns of the reduced row echelon form.

    These are exactly the columns kept by a left-to-right greedy scan that
    retains a column iff it increases the rank.
    """
    Z = to_integer_columns(M)
    R, _den = Z.rref()[:2]
    nr, nc = R.nrows(), R.ncols()
    ent = R.entries()
    piv = []
    j = 0
    for i in range(nr):
        while j < nc and ent[i * nc + j] == 0:
            j += 1
        if j == nc:
            break
        piv.append(j)
        j += 1
    return piv


def rank(M: flint.fmpq_mat) -> int:
    if M.nrows() == 0 or M.ncols() == 0:
        return 0
    return to_integer_rows(M).rank()


def nullspace(M: flint.fmpq_mat) -> flint.fmpq_mat:
    """Columns spanning the right kernel of M (exact)."""
    Z = to_integer_rows(M)
    X, nullity = Z.nullspace()
    nc = M.ncols()
    return flint.fmpq_mat(nc, nullity, [X[i, j] for i in range(nc) for j in range(nullity)])


def is_zero(M: flint.fmpq_mat) -> bool:
    return all(x == 0 for x in M.entries())


def is_symmetric(M: flint.fmpq_mat) -> bool:
    return M == M.transpose()


def is_antisymmetric(M: flint.fmpq_mat) -> bool:
    return M == -M.transpose()


def to_float_rows(M: flint.fmpq_mat):
    import numpy as np

    nr, nc = M.nrows(), M.ncols()
    # int/int true division rounds correctly even for huge numerators
    vals = [int(x.p) / int(x.q) for x in M.entries()]
    return np.array(vals, dtype=float).reshape(nr, nc)


def to_mpf_rows(M: flint.fmpq_mat, prec: int):
    import mpmath
    import numpy as np

    nr, nc = M.nrows(), M.ncols()
    with mpmath.workprec(prec):
        vals = [mpmath.mpf(int(x.p)) / int(x.q) for x in M.entries()]
    out = np.empty(nr * nc, dtype=object)
    out[:] = vals
    return out.reshape(nr, nc)
