"""Legendre operator on the ball/ellipsoid, orthogonal polynomial spaces, Weyl counting."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import flint

from . import basis as bm
from . import exactla as xla
from .polycore import (
    Ellipsoid,
    Polynomial3,
    derivative,
    ellipsoid_moment,
    homogeneous_monomials,
    monomials,
)

_X = [Polynomial3.variable(i) for i in (1, 2, 3)]


def legendre_apply(f: Polynomial3, E: Ellipsoid | None = None) -> Polynomial3:
    """L_E f = -sum_i d_i^2 f / A_i + sum_ij d_i(x_i x_j d_j f) + 9/4 f  (ball when E is None)."""
    coeffs = (1, 1, 1) if E is None else E.coefficients
    out = f.scale(Fraction(9, 4))
    for i in range(3):
        out = out - derivative(derivative(f, i + 1), i + 1).scale(Fraction(1) / coeffs[i])
    for j in range(3):
        dj = derivative(f, j + 1)
        if dj.is_zero():
            continue
        for i in range(3):
            out = out + derivative(_X[i] * _X[j] * dj, i + 1)
    return out


def legendre_apply_E(E: Ellipsoid, f: Polynomial3) -> Polynomial3:
    return legendre_apply(f, E)


def l2_inner(f: Polynomial3, g: Polynomial3, E: Ellipsoid | None = None) -> Fraction:
    """int f g over E (unit ball by default), in units of a1 a2 a3 pi."""
    E = Ellipsoid.ball() if E is None else E
    total = Fraction(0)
    for (p, q, r), c in f.items():
        for (s, t, u), d in g.items():
            total += c * d * ellipsoid_moment(E, p + s, q + t, r + u)
    return total


@dataclass
class OrthoSpace:
    n: int
    polynomials: list[Polynomial3]
    gram: flint.fmpq_mat = field(repr=False)
    ellipsoid: Ellipsoid | None = None

    def __len__(self):
        return len(self.polynomials)


def dim_ortho(n: int) -> int:
    return (n + 1) * (n + 2) // 2


def orthopoly_space(n: int, E: Ellipsoid | None = None) -> OrthoSpace:
    """Degree-n monomials made exactly orthogonal to all polynomials of degree <= n-1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    EE = Ellipsoid.ball() if E is None else E
    top = homogeneous_monomials(n)
    if n == 0:
        polys = [Polynomial3.constant(1)]
    else:
        lower = monomials(n - 1)
        G = bm.moment_matrix(EE, n - 1)
        R = xla.matrix([[ellipsoid_moment(EE, a[0] + m[0], a[1] + m[1], a[2] + m[2]) for m in top] for a in lower])
        C = G.solve(R)
        polys = []
        for j, m in enumerate(top):
            terms = {m: Fraction(1)}
            for i, a in enumerate(lower):
                c = C[i, j]
                if c != 0:
                    terms[a] = -xla.to_fraction(c)
            polys.append(Polynomial3(terms))
    gram = xla.matrix([[l2_inner(p, q, EE) for q in polys] for p in polys])
    return OrthoSpace(n, polys, gram, E)


def eigenrelation_check(n: int, E: Ellipsoid | None = None, space: OrthoSpace | None = None) -> bool:
    """L_E phi == (n + 3/2)^2 phi exactly for every phi in the degree-n space."""
    space = orthopoly_space(n, E) if space is None else space
    mu = Fraction(2 * space.n + 3, 2) ** 2
    return all((legendre_apply(p, E) - p.scale(mu)).is_zero() for p in space.polynomials)


def _max_level(lam) -> int:
    """Largest n with (n + 3/2)^2 <= lam, or -1."""
    lam = Fraction(lam) if not isinstance(lam, float) else Fraction(repr(lam))
    if lam <= 0:
        raise ValueError("lambda must be positive")
    # (2n + 3)^2 <= 4 lam
    from math import isqrt

    four = 4 * lam
    k = isqrt(four.numerator // four.denominator)
    while k * k > four:
        k -= 1
    while (k + 1) ** 2 <= four:
        k += 1
    return (k - 3) // 2 if k >= 3 else -1


def weyl_count(lam) -> int:
    """N(lam) = sum over (n + 3/2)^2 <= lam of (n+1)(n+2)/2."""
    top = _max_level(lam)
    return comb(top + 3, 3) if top >= 0 else 0


def liouville_volume(lam) -> float:
    return float(lam) ** 1.5 / 6.0


def weyl_table(sqrt_lambdas):
    rows = []
    for s in sqrt_lambdas:
        lam = Fraction(repr(s)) ** 2 if isinstance(s, float) else Fraction(s) ** 2
        count = weyl_count(lam)
        vol = liouville_volume(lam)
        rows.append((float(s), count, vol, count / vol))
    return rows
