"""Exact geostrophic analysis: zero modes per block, the planar V-operator and its invariant."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import flint

from . import basis as bm
from . import exactla as xla
from .galerkin import assemble
from .polycore import (
    Ellipsoid,
    Polynomial3,
    RotationVector,
    VectorField,
    as_rational,
    derivative,
    vector_to_field,
)


class DegenerateQuadric(ValueError):
    pass


class NonUniqueInvariant(ArithmeticError):
    pass


def _coriolis_block(E: Ellipsoid, omega: RotationVector, n: int):
    W = bm.block_bases(E, n)[n - 1]
    return W, assemble(E, omega, W).A


def geostrophic_count(E: Ellipsoid, omega: RotationVector, n: int) -> int:
    """dim ker of the W_n Coriolis matrix, by exact rank (B is definite, so lam = 0 iff A alpha = 0)."""
    _, A = _coriolis_block(E, omega, n)
    return A.nrows() - xla.rank(A)


def geostrophic_fields(E: Ellipsoid, omega: RotationVector, n: int) -> list[VectorField]:
    """Exact kernel fields of the W_n block."""
    W, A = _coriolis_block(E, omega, n)
    K = xla.nullspace(A)
    if K.ncols() == 0:
        return []
    V = W.coeffs * K
    return [vector_to_field(xla.column(V, j), n) for j in range(V.ncols())]


def directional_derivative(v: VectorField, omega: RotationVector) -> VectorField:
    """(Omega . grad) v componentwise."""
    def d(f: Polynomial3) -> Polynomial3:
        out = Polynomial3()
        for k, o in enumerate(omega.components):
            if o:
                out = out + derivative(f, k + 1).scale(o)
        return out

    return VectorField(d(v.v1), d(v.v2), d(v.v3))


def taylor_proudman_check(E: Ellipsoid, omega: RotationVector, n: int) -> bool:
    """Every exact kernel field is invariant along Omega."""
    return all(directional_derivative(v, omega).is_zero() for v in geostrophic_fields(E, omega, n))


@dataclass(frozen=True)
class GeneralQuadric:
    """A x1^2 + B x2^2 + x3^2 + 2C x1 x3 + 2D x2 x3 <= 1, rotation along x3."""

    A: Fraction
    B: Fraction
    C: Fraction = Fraction(0)
    D: Fraction = Fraction(0)

    def __post_init__(self):
        for name in "ABCD":
            object.__setattr__(self, name, as_rational(getattr(self, name)))

    @property
    def delta(self) -> Fraction:
        return self.A * self.B - self.B * self.C ** 2 - self.A * self.D ** 2

    def is_positive_definite(self) -> bool:
        # leading minors of [[A,0,C],[0,B,D],[C,D,1]]
        return self.A > 0 and self.A * self.B > 0 and self.delta > 0

    def form(self) -> list[list[Fraction]]:
        A, B, C, D = self.A, self.B, self.C, self.D
        return [[A, Fraction(0), C], [Fraction(0), B, D], [C, D, Fraction(1)]]


@dataclass(frozen=True)
class PlanarOperator:
    """V = (M x) . grad in the (x1, x2) plane."""

    M: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    @property
    def trace(self) -> Fraction:
        return self.M[0][0] + self.M[1][1]

    @property
    def det(self) -> Fraction:
        return self.M[0][0] * self.M[1][1] - self.M[0][1] * self.M[1][0]

    def apply(self, f: Polynomial3) -> Polynomial3:
        (a, b), (c, d) = self.M
        x1, x2 = Polynomial3.variable(1), Polynomial3.variable(2)
        p1 = x1.scale(a) + x2.scale(b)
        p2 = x1.scale(c) + x2.scale(d)
        return p1 * derivative(f, 1) + p2 * derivative(f, 2)


def v_operator(q: GeneralQuadric) -> PlanarOperator:
    if q.delta <= 0 or not q.is_positive_definite():
        raise DegenerateQuadric(f"delta = {q.delta} is not positive")
    A, B, C, D = q.A, q.B, q.C, q.D
    op = PlanarOperator(((C * D, -(B - D * D)), (A - C * C, -C * D)))
    assert op.trace == 0 and op.det == q.delta
    return op


def linear_invariant_count(op: PlanarOperator) -> int:
    """Dimension of linear forms l.x with V(l.x) = 0, i.e. of ker M^T."""
    Mt = xla.matrix([[op.M[0][0], op.M[1][0]], [op.M[0][1], op.M[1][1]]])
    return 2 - xla.rank(Mt)


def quadratic_polynomial(S) -> Polynomial3:
    return Polynomial3({(2, 0, 0): S[0][0], (1, 1, 0): 2 * S[0][1], (0, 2, 0): S[1][1]})


def invariant_quadratic(op: PlanarOperator) -> list[list[Fraction]]:
    """The symmetric S, unique up to scale, with S M + M^T S = 0."""
    if op.det <= 0:
        raise NonUniqueInvariant("det(M) must be positive")
    (a, b), (c, d) = op.M
    # unknowns (s11, s12, s22); entries (1,1), (1,2), (2,2) of S M + M^T S
    L = xla.matrix([
        [2 * a, 2 * c, 0],
        [b, a + d, c],
        [0, 2 * b, 2 * d],
    ])
    K = xla.nullspace(L)
    if K.ncols() != 1:
        raise NonUniqueInvariant(f"solution space has dimension {K.ncols()}")
    s = xla.column(K, 0)
    lead = next(x for x in s if x != 0)
    s11, s12, s22 = (x / lead for x in s)
    S = [[s11, s12], [s12, s22]]
    if not (op.apply(quadratic_polynomial(S))).is_zero():
        raise ArithmeticError("V does not annihilate the computed quadratic")
    if not (s11 > 0 and s11 * s22 - s12 * s12 > 0):
        raise NonUniqueInvariant("invariant form is not definite")
    return S


def _rational_sqrt(q: Fraction) -> Fraction | None:
    from math import isqrt

    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _matmul(X, Y):
    return [[sum(X[i][k] * Y[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def _transpose(X):
    return [list(r) for r in zip(*X)]


def rational_frame(omega: RotationVector):
    """Rational rotation R (det +1) with R Omega_hat = e3, or None when |Omega| is irrational."""
    w = _rational_sqrt(omega.omega_squared)
    if w is None:
        return None
    u = [c / w for c in omega.components]
    if u == [0, 0, 1]:
        return [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    h = [u[0], u[1], u[2] - 1]
    hh = sum(x * x for x in h)
    H = [[Fraction(int(i == j)) - 2 * h[i] * h[j] / hh for j in range(3)] for i in range(3)]
    flip = [[Fraction(-1), 0, 0], [0, Fraction(1), 0], [0, 0, Fraction(1)]]
    return _matmul(flip, H)


def quadric_from_config(E: Ellipsoid, omega: RotationVector) -> GeneralQuadric | None:
    """Normal form (A, B, C, D) in a frame with Omega along x3, when it is rational."""
    R = rational_frame(omega)
    if R is None:
        return None
    Dm = [[E.coefficients[i] if i == j else Fraction(0) for j in range(3)] for i in range(3)]
    Q = _matmul(_matmul(R, Dm), _transpose(R))
    if Q[0][1] != 0:
        a, b, c = Q[0][0], Q[0][1], Q[1][1]
        # rotate about x3 by a rational angle diagonalizing the (x1, x2) block
        disc = _rational_sqrt((a - c) ** 2 + 4 * b * b)
        if disc is None:
            return None
        lam = (a + c + disc) / 2
        v = (b, lam - a)
        nrm = _rational_sqrt(v[0] ** 2 + v[1] ** 2)
        if nrm is None:
            return None
        cs, sn = v[0] / nrm, v[1] / nrm
        Rz = [[cs, sn, Fraction(0)], [-sn, cs, Fraction(0)], [Fraction(0), Fraction(0), Fraction(1)]]
        Q = _matmul(_matmul(Rz, Q), _transpose(Rz))
    s = Q[2][2]
    return GeneralQuadric(Q[0][0] / s, Q[1][1] / s, Q[0][2] / s, Q[1][2] / s)


def geostrophic_report(E: Ellipsoid, omega: RotationVector, n_max: int) -> dict:
    """Per-degree exact counts plus the planar normal form when it is available."""
    counts = {str(n): geostrophic_count(E, omega, n) for n in range(1, n_max + 1)}
    out: dict = {
        "ellipsoid": [str(a) for a in E.coefficients],
        "omega": [str(o) for o in omega.components],
        "counts": counts,
        "parity_ok": all(c == n % 2 for n, c in ((int(k), v) for k, v in counts.items())),
    }
    q = quadric_from_config(E, omega)
    if q is not None:
        op = v_operator(q)
        S = invariant_quadratic(op)
        out["quadric"] = {k: str(getattr(q, k)) for k in "ABCD"}
        out["delta"] = str(q.delta)
        out["M"] = [[str(x) for x in row] for row in op.M]
        out["S"] = [[str(x) for x in row] for row in S]
        out["linear_invariants"] = linear_invariant_count(op)
    return out
