"""Brute-force eigenvalue oracle: exact characteristic polynomial, then high-precision roots.

Shares nothing with the structured solver beyond the exact pencil itself.
"""
from __future__ import annotations

from math import lcm

import flint
import mpmath

from .galerkin import SpectralPencil


def frequency_polynomial(pencil: SpectralPencil) -> flint.fmpz_poly:
    """Integer polynomial whose roots (with multiplicity) are the real lam of A x = i lam B x.

    With p(t) = det(t - B^-1 A), every eigenvalue t = i lam, and p(i lam) is
    i^d times a real polynomial because only powers of the parity of d occur.
    """
    M = pencil.B.solve(pencil.A)
    p = M.charpoly()
    d = p.degree()
    coeffs = [p[k] for k in range(d + 1)]
    real = []
    for k, c in enumerate(coeffs):
        if (d - k) % 2:
            if c != 0:
                raise ArithmeticError("characteristic polynomial has the wrong parity")
            real.append(flint.fmpq(0))
        else:
            real.append(c if ((d - k) // 2) % 2 == 0 else -c)
    den = lcm(*(int(c.q) for c in real))
    return flint.fmpz_poly([int(c.p) * (den // int(c.q)) for c in real])


def oracle_eigenvalues(pencil: SpectralPencil, dps: int = 50) -> list[float]:
    """Sorted real eigenvalues from the exact factorization of the frequency polynomial."""
    q = frequency_polynomial(pencil)
    _, factors = q.factor()
    out = []
    with mpmath.workdps(dps):
        for f, mult in factors:
            c = [int(f[k]) for k in range(f.degree(), -1, -1)]
            roots = [mpmath.mpf(-c[1]) / c[0]] if len(c) == 2 else mpmath.polyroots(c, maxsteps=400, extraprec=4 * dps)
            for r in roots:
                if abs(mpmath.im(r)) > mpmath.mpf(10) ** (-dps // 2):
                    raise ArithmeticError(f"non-real root {r}")
                out.extend([float(mpmath.re(r))] * mult)
    return sorted(out)
