"""Exact bases of V_n^0 (divergence-free, boundary-tangent polynomial fields).

Spanning family: ``curl(Phi * F * e_i) = grad(Phi F) x e_i`` for monomials Phi
of degree <= n-1 and F the defining quadric.  The curl form makes every field
divergence-free, and ``grad(Phi F) = Phi grad F`` on ``F = 0`` makes it tangent.
The family is overcomplete for n >= 2 and is thinned by an exact greedy rank
scan.  The blocks W_n are obtained by exact Gram projection.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import json

import flint

from . import exactla as xla
from .polycore import (
    Ellipsoid,
    Polynomial3,
    VectorField,
    derivative,
    dim_polynomials,
    divergence,
    divide_by_quadric,
    ellipsoid_moment,
    field_to_vector,
    gradient,
    homogeneous_monomials,
    monomials,
    vector_to_field,
)


class DimensionMismatch(RuntimeError):
    """Raised when a constructed basis does not have the theoretical size."""


def dim_v0(n: int) -> int:
    """dim V_n^0 = n(n+1)(2n+7)/6."""
    return n * (n + 1) * (2 * n + 7) // 6


def dim_block(n: int) -> int:
    """dim W_n = n(n+2)."""
    return n * (n + 2)


@dataclass(frozen=True)
class SpanningField:
    field: VectorField
    potential_degree: int
    direction: int
    monomial: tuple[int, int, int]


@dataclass
class BasisSet:
    ellipsoid: Ellipsoid
    n: int
    fields: list[VectorField]
    degrees: list[int]
    coeffs: flint.fmpq_mat = field(repr=False)  # 3*dim P_n rows, one column per field

    def __len__(self):
        return len(self.fields)


@dataclass
class BlockBasis:
    ellipsoid: Ellipsoid
    n: int
    fields: list[VectorField]
    coeffs: flint.fmpq_mat = field(repr=False)
    gram: flint.fmpq_mat = field(repr=False)

    def __len__(self):
        return len(self.fields)


def _curl_field(g: Polynomial3, direction: int) -> VectorField:
    d1, d2, d3 = derivative(g, 1), derivative(g, 2), derivative(g, 3)
    zero = Polynomial3()
    if direction == 1:
        return VectorField(zero, d3, -d2)
    if direction == 2:
        return VectorField(-d3, zero, d1)
    return VectorField(d2, -d1, zero)


def spanning_family(E: Ellipsoid, n: int) -> list[SpanningField]:
    """grad(Phi F) x e_i in scan order: potential degree, direction, graded-lex."""
    if n < 1:
        raise ValueError("n must be >= 1")
    F = E.quadric()
    out = []
    for d in range(n):
        for i in (1, 2, 3):
            for m in homogeneous_monomials(d):
                g = Polynomial3.monomial(m) * F
                out.append(SpanningField(_curl_field(g, i), d, i, m))
    return out


def spanning_fields(E: Ellipsoid, n: int) -> list[VectorField]:
    return [s.field for s in spanning_family(E, n)]


def select_basis(fields: list[VectorField], n: int, ellipsoid: Ellipsoid | None = None) -> BasisSet:
    """Keep a field iff it strictly increases the exact rank, scanning in order."""
    cols = [field_to_vector(v, n) for v in fields]
    M = xla.from_columns(cols)
    piv = xla.pivot_columns(M)
    expected = dim_v0(n)
    if len(piv) != expected:
        raise DimensionMismatch(f"selected {len(piv)} fields for n={n}, expected {expected}")
    chosen = [fields[j] for j in piv]
    return BasisSet(
        ellipsoid=ellipsoid,
        n=n,
        fields=chosen,
        degrees=[v.degree() for v in chosen],
        coeffs=xla.columns(M, piv),
    )


_HIERARCHY: dict[Ellipsoid, tuple[int, list[int], flint.fmpq_mat, list[SpanningField]]] = {}


def basis(E: Ellipsoid, n: int) -> BasisSet:
    """Basis of V_n^0 taken from a shared nested scan (cached per ellipsoid).

    Because the scan is degree-major, the basis for n-1 is a prefix of the
    basis for n.
    """
    cached = _HIERARCHY.get(E)
    if cached is None or cached[0] < n:
        fam = spanning_family(E, n)
        M = xla.from_columns([field_to_vector(s.field, n) for s in fam])
        piv = xla.pivot_columns(M)
        cached = (n, piv, M, fam)
        _HIERARCHY[E] = cached
    n_top, piv, M, fam = cached
    keep = [j for j in piv if fam[j].potential_degree <= n - 1]
    if len(keep) != dim_v0(n):
        raise DimensionMismatch(f"selected {len(keep)} fields for n={n}, expected {dim_v0(n)}")
    coeffs = restrict_rows(xla.columns(M, keep), n_top, n)
    chosen = [fam[j].field for j in keep]
    return BasisSet(E, n, chosen, [v.degree() for v in chosen], coeffs)


def clear_cache():
    _HIERARCHY.clear()
    _BLOCKS.clear()


def _row_map(n_from: int, n_to: int) -> list[int]:
    s_from, s_to = dim_polynomials(n_from), dim_polynomials(n_to)
    s = min(s_from, s_to)
    return [k * s_from + i for k in range(3) for i in range(s)], s_from, s_to


def restrict_rows(X: flint.fmpq_mat, n_from: int, n_to: int) -> flint.fmpq_mat:
    """Drop coefficient rows of monomials with degree > n_to (must be zero)."""
    if n_from == n_to:
        return X
    idx, _, _ = _row_map(n_from, n_to)
    return xla.rows(X, idx)


def embed_rows(X: flint.fmpq_mat, n_from: int, n_to: int) -> flint.fmpq_mat:
    """Re-index coefficient rows from monomials(n_from) into monomials(n_to)."""
    if n_from == n_to:
        return X
    s_from, s_to = dim_polynomials(n_from), dim_polynomials(n_to)
    nc = X.ncols()
    ent = X.entries()
    zero = flint.fmpq(0)
    flat = []
    for k in range(3):
        for i in range(s_to):
            if i < s_from:
                r = k * s_from + i
                flat.extend(ent[r * nc:(r + 1) * nc])
            else:
                flat.extend([zero] * nc)
    return flint.fmpq_mat(3 * s_to, nc, flat)


_MOMENTS: dict[tuple[Ellipsoid, int], flint.fmpq_mat] = {}


def moment_matrix(E: Ellipsoid, n: int) -> flint.fmpq_mat:
    """G[i, j] = int_E m_i m_j over monomials(n), units a1 a2 a3 pi."""
    key = (E, n)
    G = _MOMENTS.get(key)
    if G is None:
        monos = monomials(n)
        flat = []
        for a in monos:
            for b in monos:
                flat.append(xla.fmpq(ellipsoid_moment(E, a[0] + b[0], a[1] + b[1], a[2] + b[2])))
        G = flint.fmpq_mat(len(monos), len(monos), flat)
        _MOMENTS[key] = G
    return G


def split_components(X: flint.fmpq_mat, n: int) -> list[flint.fmpq_mat]:
    s = dim_polynomials(n)
    return [xla.rows(X, range(k * s, (k + 1) * s)) for k in range(3)]


def gram(E: Ellipsoid, n: int, X: flint.fmpq_mat, Y: flint.fmpq_mat | None = None) -> flint.fmpq_mat:
    """Exact L2(E) Gram matrix X^T (I3 (x) G) Y of coefficient columns."""
    G = moment_matrix(E, n)
    Xs = split_components(X, n)
    Ys = Xs if Y is None else split_components(Y, n)
    out = None
    for xk, yk in zip(Xs, Ys):
        term = xk.transpose() * (G * yk)
        out = term if out is None else out + term
    return out


def verify_field(E: Ellipsoid, v: VectorField) -> "FieldCheck":
    """Exact check: div v == 0 and F divides <v, grad F>."""
    F = E.quadric()
    div_ok = divergence(v).is_zero()
    normal = v.dot(gradient(F))
    _q, r = divide_by_quadric(normal, F)
    return FieldCheck(divergence_free=div_ok, tangent=r.is_zero())


@dataclass(frozen=True)
class FieldCheck:
    divergence_free: bool
    tangent: bool

    @property
    def passed(self) -> bool:
        return self.divergence_free and self.tangent

    def __bool__(self):
        return self.passed


@dataclass(frozen=True)
class ComplementCheck:
    orthogonal: bool
    dimension_identity: bool
    dims: tuple[int, int, int]

    @property
    def passed(self) -> bool:
        return self.orthogonal and self.dimension_identity

    def __bool__(self):
        return self.passed


def gradient_complement_check(E: Ellipsoid, b: BasisSet) -> ComplementCheck:
    """V_n = V_n^0 (+) grad P_{n+1}: exact orthogonality and dimension count."""
    n = b.n
    grads = [field_to_vector(gradient(Polynomial3.monomial(m)), n) for m in monomials(n + 1) if sum(m) > 0]
    Gr = xla.from_columns(grads)
    ortho = xla.is_zero(gram(E, n, b.coeffs, Gr))
    lhs = 3 * dim_polynomials(n)
    rhs_grad = dim_polynomials(n + 1) - 1
    return ComplementCheck(ortho, lhs == len(b) + rhs_grad, (lhs, len(b), rhs_grad))


def block_basis(E: Ellipsoid, n: int, lower: BasisSet | None, full: BasisSet) -> BlockBasis:
    """W_n representatives: exact-degree-n elements minus their projection onto V_{n-1}^0."""
    new = [j for j, d in enumerate(full.degrees) if d == n]
    if len(new) != dim_block(n):
        raise DimensionMismatch(f"{len(new)} exact-degree-{n} elements, expected {dim_block(n)}")
    Enew = xla.columns(full.coeffs, new)
    if lower is None or len(lower) == 0:
        W = Enew
    else:
        L = embed_rows(lower.coeffs, lower.n, n)
        Glow = gram(E, n, L)
        rhs = gram(E, n, L, Enew)
        W = Enew - L * Glow.solve(rhs)
    return _block_from_coeffs(E, n, W)


def _block_from_coeffs(E, n, W) -> BlockBasis:
    fields = [vector_to_field(xla.column(W, j), n) for j in range(W.ncols())]
    return BlockBasis(E, n, fields, W, gram(E, n, W))


_BLOCKS: dict[Ellipsoid, list[BlockBasis]] = {}


def block_bases(E: Ellipsoid, n_max: int) -> list[BlockBasis]:
    """W_1 .. W_{n_max}, built incrementally and cached per ellipsoid.

    Uses the mutual orthogonality of the W_k: the Gram system of V_{n-1}^0
    is block diagonal in the W_1..W_{n-1} basis, so each projection only
    needs the small per-block Gram matrices.  The result is identical to
    ``block_basis`` since orthogonal projection onto a subspace is unique.
    """
    blocks = _BLOCKS.setdefault(E, [])
    if len(blocks) >= n_max:
        return blocks[:n_max]
    full = basis(E, n_max)
    for n in range(len(blocks) + 1, n_max + 1):
        sub = basis(E, n)
        new = [j for j, d in enumerate(sub.degrees) if d == n]
        if len(new) != dim_block(n):
            raise DimensionMismatch(f"{len(new)} exact-degree-{n} elements, expected {dim_block(n)}")
        W = xla.columns(sub.coeffs, new)
        for blk in blocks:
            Wk = embed_rows(blk.coeffs, blk.n, n)
            W = W - Wk * blk.gram.solve(gram(E, n, Wk, xla.columns(sub.coeffs, new)))
        blocks.append(_block_from_coeffs(E, n, W))
    del full
    return blocks[:n_max]


def export_fields(fields: list[VectorField]) -> str:
    """JSON serialization: one entry per field, components as {"p,q,r": "num/den"}."""
    out = []
    for v in fields:
        out.append([{f"{m[0]},{m[1]},{m[2]}": str(c) for m, c in comp.items()} for comp in v.components])
    return json.dumps(out, indent=1, sort_keys=False)


def import_fields(text: str) -> list[VectorField]:
    data = json.loads(text)
    out = []
    for comps in data:
        polys = [Polynomial3({tuple(int(t) for t in k.split(",")): Fraction(c) for k, c in comp.items()}) for comp in comps]
        out.append(VectorField(*polys))
    return out
