"""Exact trivariate polynomials, vector fields and moment integrals.

Everything here works over ``fractions.Fraction``.  Integrals over an
ellipsoid ``E = {A1 x1^2 + A2 x2^2 + A3 x3^2 <= 1}`` are returned as rationals
in units of ``a1*a2*a3*pi`` (``ai = Ai**-1/2``).  Only even exponents survive
the integration, so the remaining factor ``ai**(p+1)`` always reduces to a
rational power of ``Ai`` times ``ai``; the common factor ``a1*a2*a3*pi`` drops
out of every generalized eigenproblem built on top of these integrals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt
from typing import Iterable, Iterator, Mapping

import numpy as np

Rational = Fraction
MultiIndex = tuple[int, int, int]

_ZERO = Fraction(0)


def as_rational(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a Fraction.

    Floats are accepted only through their decimal repr so that ``1.235``
    becomes ``247/200`` instead of the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


def graded_lex_key(m: MultiIndex):
    # total degree first, then lexicographic with x1 dominant
    return (sum(m), -m[0], -m[1], -m[2])


@lru_cache(maxsize=None)
def monomials(n: int) -> tuple[MultiIndex, ...]:
    """All exponents of total degree <= n in graded-lex order."""
    out = [(p, q, d - p - q) for d in range(n + 1) for p in range(d, -1, -1) for q in range(d - p, -1, -1)]
    return tuple(out)


@lru_cache(maxsize=None)
def homogeneous_monomials(d: int) -> tuple[MultiIndex, ...]:
    return tuple((p, q, d - p - q) for p in range(d, -1, -1) for q in range(d - p, -1, -1))


@lru_cache(maxsize=None)
def monomial_index(n: int) -> dict[MultiIndex, int]:
    return {m: i for i, m in enumerate(monomials(n))}


def dim_polynomials(n: int) -> int:
    """Dimension of P_n, polynomials of degree <= n in three variables."""
    if n < 0:
        return 0
    return (n + 1) * (n + 2) * (n + 3) // 6


class Polynomial3:
    """Sparse polynomial in x1, x2, x3 with exact rational coefficients.

    Instances are treated as immutable; all operations return new objects.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[MultiIndex, object] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = as_rational(c)
                if c != 0:
                    clean[tuple(m)] = c
        self._terms = clean

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial3":
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def constant(cls, c) -> "Polynomial3":
        return cls({(0, 0, 0): c})

    @classmethod
    def monomial(cls, m: MultiIndex, c=1) -> "Polynomial3":
        return cls({m: c})

    @classmethod
    def variable(cls, axis: int) -> "Polynomial3":
        m = [0, 0, 0]
        m[axis - 1] = 1
        return cls({tuple(m): 1})

    @property
    def terms(self) -> Mapping[MultiIndex, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[MultiIndex, Fraction]]:
        """Terms in canonical graded-lex order."""
        for m in sorted(self._terms, key=graded_lex_key):
            yield m, self._terms[m]

    def coeff(self, m: MultiIndex) -> Fraction:
        return self._terms.get(tuple(m), _ZERO)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial3.constant(other)
        if not isinstance(other, Polynomial3):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "Polynomial3(0)"
        parts = []
        for (p, q, r), c in self.items():
            mono = "*".join(f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in ((1, p), (2, q), (3, r)) if e)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "Polynomial3(" + " + ".join(parts) + ")"

    def __neg__(self):
        return Polynomial3._raw({m: -c for m, c in self._terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial3.constant(other)
        if not isinstance(other, Polynomial3):
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, _ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial3._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Polynomial3":
        c = as_rational(c)
        if c == 0:
            return Polynomial3()
        return Polynomial3._raw({m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, str)):
            return self.scale(other)
        if not isinstance(other, Polynomial3):
            return NotImplemented
        out: dict[MultiIndex, Fraction] = {}
        for (a1, a2, a3), c in self._terms.items():
            for (b1, b2, b3), d in other._terms.items():
                m = (a1 + b1, a2 + b2, a3 + b3)
                out[m] = out.get(m, _ZERO) + c * d
        return Polynomial3._raw({m: c for m, c in out.items() if c})

    def __rmul__(self, other):
        return self.__mul__(other)

    def __call__(self, x1, x2, x3):
        """Evaluate at floats or numpy arrays."""
        total = 0.0
        for (p, q, r), c in self._terms.items():
            total = total + float(c) * (x1 ** p) * (x2 ** q) * (x3 ** r)
        return total

    def substitute_scaling(self, s1, s2, s3) -> "Polynomial3":
        """Return f(s1*x1, s2*x2, s3*x3) for rational scale factors."""
        s = (as_rational(s1), as_rational(s2), as_rational(s3))
        return Polynomial3._raw(
            {m: c * s[0] ** m[0] * s[1] ** m[1] * s[2] ** m[2] for m, c in self._terms.items()}
        )


def derivative(f: Polynomial3, axis: int) -> Polynomial3:
    """Exact partial derivative with respect to x_axis (axis in 1, 2, 3)."""
    k = axis - 1
    out = {}
    for m, c in f._terms.items():
        e = m[k]
        if e:
            mm = list(m)
            mm[k] = e - 1
            out[tuple(mm)] = c * e
    return Polynomial3._raw(out)


def divide_by_quadric(g: Polynomial3, F: Polynomial3) -> tuple[Polynomial3, Polynomial3]:
    """Multivariate division g = q*F + r with respect to graded-lex order.

    A single polynomial is a Groebner basis of its ideal, so ``r == 0`` exactly
    when F divides g.
    """
    lead_m, lead_c = max(F._terms.items(), key=lambda t: graded_lex_key(t[0]))
    rem = dict(g._terms)
    quo: dict[MultiIndex, Fraction] = {}
    keep: dict[MultiIndex, Fraction] = {}
    while rem:
        m = max(rem, key=graded_lex_key)
        c = rem.pop(m)
        if all(m[i] >= lead_m[i] for i in range(3)):
            qm = (m[0] - lead_m[0], m[1] - lead_m[1], m[2] - lead_m[2])
            qc = c / lead_c
            quo[qm] = quo.get(qm, _ZERO) + qc
            for fm, fc in F._terms.items():
                if fm == lead_m:
                    continue
                t = (qm[0] + fm[0], qm[1] + fm[1], qm[2] + fm[2])
                v = rem.get(t, _ZERO) - qc * fc
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        else:
            keep[m] = c
    return Polynomial3(quo), Polynomial3._raw(keep)


@dataclass(frozen=True)
class VectorField:
    """Polynomial vector field (v1, v2, v3)."""

    v1: Polynomial3
    v2: Polynomial3
    v3: Polynomial3

    @classmethod
    def zero(cls) -> "VectorField":
        return cls(Polynomial3(), Polynomial3(), Polynomial3())

    @classmethod
    def unit(cls, axis: int, f: Polynomial3 | None = None) -> "VectorField":
        f = Polynomial3.constant(1) if f is None else f
        comps = [Polynomial3(), Polynomial3(), Polynomial3()]
        comps[axis - 1] = f
        return cls(*comps)

    @property
    def components(self) -> tuple[Polynomial3, Polynomial3, Polynomial3]:
        return (self.v1, self.v2, self.v3)

    def degree(self) -> int:
        return max(c.degree() for c in self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.v1 + other.v1, self.v2 + other.v2, self.v3 + other.v3)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.v1 - other.v1, self.v2 - other.v2, self.v3 - other.v3)

    def __neg__(self):
        return VectorField(-self.v1, -self.v2, -self.v3)

    def scale(self, c) -> "VectorField":
        return VectorField(self.v1.scale(c), self.v2.scale(c), self.v3.scale(c))

    def dot(self, other: "VectorField") -> Polynomial3:
        return self.v1 * other.v1 + self.v2 * other.v2 + self.v3 * other.v3

    def __call__(self, x1, x2, x3):
        return (self.v1(x1, x2, x3), self.v2(x1, x2, x3), self.v3(x1, x2, x3))


def divergence(v: VectorField) -> Polynomial3:
    return derivative(v.v1, 1) + derivative(v.v2, 2) + derivative(v.v3, 3)


def gradient(f: Polynomial3) -> VectorField:
    return VectorField(derivative(f, 1), derivative(f, 2), derivative(f, 3))


def curl(v: VectorField) -> VectorField:
    return VectorField(
        derivative(v.v3, 2) - derivative(v.v2, 3),
        derivative(v.v1, 3) - derivative(v.v3, 1),
        derivative(v.v2, 1) - derivative(v.v1, 2),
    )


def cross(omega, v: VectorField) -> VectorField:
    """Pointwise cross product of a constant vector with a field."""
    o1, o2, o3 = omega.components if isinstance(omega, RotationVector) else map(as_rational, omega)
    return VectorField(
        v.v3.scale(o2) - v.v2.scale(o3),
        v.v1.scale(o3) - v.v3.scale(o1),
        v.v2.scale(o1) - v.v1.scale(o2),
    )


@dataclass(frozen=True)
class Ellipsoid:
    """Axis-aligned ellipsoid A1 x1^2 + A2 x2^2 + A3 x3^2 <= 1 with rational Ai."""

    A1: Fraction
    A2: Fraction
    A3: Fraction

    def __post_init__(self):
        for name in ("A1", "A2", "A3"):
            val = as_rational(getattr(self, name))
            if val <= 0:
                raise ValueError(f"ellipsoid coefficient {name} must be positive, got {val}")
            object.__setattr__(self, name, val)

    @classmethod
    def ball(cls) -> "Ellipsoid":
        return cls(1, 1, 1)

    @classmethod
    def from_semi_axes(cls, a1, a2, a3) -> "Ellipsoid":
        a = [as_rational(x) for x in (a1, a2, a3)]
        if any(x <= 0 for x in a):
            raise ValueError("semi-axes must be positive")
        return cls(*(1 / (x * x) for x in a))

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.A1, self.A2, self.A3)

    @property
    def semi_axes(self) -> tuple[float, float, float]:
        return tuple(1.0 / sqrt(float(A)) for A in self.coefficients)

    def exact_semi_axes(self) -> tuple[Fraction, Fraction, Fraction] | None:
        """Semi-axes as rationals when every Ai is a rational square."""
        out = []
        for A in self.coefficients:
            rn, rd = _isqrt_exact(A.numerator), _isqrt_exact(A.denominator)
            if rn is None or rd is None:
                return None
            out.append(Fraction(rd, rn))
        return tuple(out)

    @property
    def volume_factor(self) -> float:
        """a1*a2*a3, the unit in which exact moments are expressed (times pi)."""
        return 1.0 / sqrt(float(self.A1 * self.A2 * self.A3))

    def quadric(self) -> Polynomial3:
        """F = 1 - A1 x1^2 - A2 x2^2 - A3 x3^2, positive inside E."""
        return Polynomial3({(0, 0, 0): 1, (2, 0, 0): -self.A1, (0, 2, 0): -self.A2, (0, 0, 2): -self.A3})

    def contains(self, x1, x2, x3):
        return float(self.A1) * x1 ** 2 + float(self.A2) * x2 ** 2 + float(self.A3) * x3 ** 2 <= 1.0


def _isqrt_exact(n: int):
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


@dataclass(frozen=True)
class RotationVector:
    """Constant vorticity vector Omega with rational components."""

    O1: Fraction
    O2: Fraction
    O3: Fraction

    def __post_init__(self):
        vals = [as_rational(getattr(self, n)) for n in ("O1", "O2", "O3")]
        if all(v == 0 for v in vals):
            raise ValueError("rotation vector must be nonzero")
        for n, v in zip(("O1", "O2", "O3"), vals):
            object.__setattr__(self, n, v)

    @property
    def components(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.O1, self.O2, self.O3)

    @property
    def omega_squared(self) -> Fraction:
        return self.O1 ** 2 + self.O2 ** 2 + self.O3 ** 2

    @property
    def omega(self) -> float:
        return sqrt(float(self.omega_squared))

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.components])

    def unit(self) -> np.ndarray:
        v = self.as_array()
        return v / np.linalg.norm(v)


@lru_cache(maxsize=None)
def ball_moment(p: int, q: int, r: int) -> Fraction:
    """Rational M with  int_B x1^p x2^q x3^r dx = M * pi  over the unit ball."""
    if p < 0 or q < 0 or r < 0:
        raise ValueError("exponents must be non-negative")
    if p % 2 or q % 2 or r % 2:
        return _ZERO
    u, v, w = p // 2, q // 2, r // 2
    s = u + v + w
    num = 16 * factorial(2 * u) * factorial(2 * v) * factorial(2 * w) * factorial(s + 2)
    den = factorial(u) * factorial(v) * factorial(w) * factorial(2 * s + 4)
    return Fraction(num, den)


def ellipsoid_moment(E: Ellipsoid, p: int, q: int, r: int) -> Fraction:
    """int_E x^p y^q z^r dx in units of a1*a2*a3*pi (exact)."""
    return _ellipsoid_moment(E.A1, E.A2, E.A3, p, q, r)


@lru_cache(maxsize=200_000)
def _ellipsoid_moment(A1, A2, A3, p, q, r) -> Fraction:
    M = ball_moment(p, q, r)
    if not M:
        return M
    return M / (A1 ** (p // 2) * A2 ** (q // 2) * A3 ** (r // 2))


def integrate(E: Ellipsoid, f: Polynomial3) -> Fraction:
    """int_E f dx in units of a1*a2*a3*pi."""
    total = _ZERO
    for (p, q, r), c in f._terms.items():
        total += c * ellipsoid_moment(E, p, q, r)
    return total


def inner_product(E: Ellipsoid, v: VectorField, w: VectorField) -> Fraction:
    """L2(E) inner product sum_k int_E v_k w_k, in units of a1*a2*a3*pi."""
    total = _ZERO
    for a, b in zip(v.components, w.components):
        if len(a) > len(b):
            a, b = b, a
        for (p, q, r), c in a._terms.items():
            for (s, t, u), d in b._terms.items():
                m = ellipsoid_moment(E, p + s, q + t, r + u)
                if m:
                    total += c * d * m
    return total


def field_to_vector(v: VectorField, n: int) -> list[Fraction]:
    """Stack component coefficients over monomials(n): [v1 | v2 | v3]."""
    idx = monomial_index(n)
    size = len(idx)
    out = [_ZERO] * (3 * size)
    for k, comp in enumerate(v.components):
        for m, c in comp._terms.items():
            out[k * size + idx[m]] = c
    return out


def vector_to_field(coeffs: Iterable, n: int) -> VectorField:
    monos = monomials(n)
    size = len(monos)
    coeffs = list(coeffs)
    if len(coeffs) != 3 * size:
        raise ValueError(f"expected {3 * size} coefficients, got {len(coeffs)}")
    comps = []
    for k in range(3):
        comps.append(Polynomial3({monos[i]: coeffs[k * size + i] for i in range(size) if coeffs[k * size + i]}))
    return VectorField(*comps)


def monomial_values(points: np.ndarray, n: int) -> np.ndarray:
    """Matrix of monomial values, shape (len(points), dim P_n)."""
    pts = np.asarray(points, dtype=float)
    pw = [np.stack([pts[:, k] ** e for e in range(n + 1)], axis=1) for k in range(3)]
    return np.stack([pw[0][:, p] * pw[1][:, q] * pw[2][:, r] for p, q, r in monomials(n)], axis=1)
