"""Exact Gram/Coriolis pencils and their spectra.

The pencil over a basis {e_j} is

    B_ij = int_E <e_j, e_i>,     A_ij = c * int_E <Omega x e_j, e_i>,

with c the Coriolis factor (1 by default, so that the spectrum lies in
[-omega, omega]).  Eigenvalues solve A alpha = i lam B alpha.  Entries are
exact rationals in units of a1*a2*a3*pi, a common factor that cancels.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import flint
import mpmath
import numpy as np

from . import basis as bm
from . import exactla as xla
from .eigensolve import CholeskyFailure, pencil_residuals, solve_skew_pencil
from .polycore import Ellipsoid, RotationVector, dim_polynomials, monomial_values

__all__ = [
    "CholeskyFailure",
    "ResidualTooLarge",
    "SpectralPencil",
    "SpectralBlock",
    "assemble",
    "block_pencil",
    "block_invariance_check",
    "solve_pencil",
    "spectrum",
    "full_spectrum",
    "mode_field",
    "ModeField",
]

ZERO_TOL = 1e-8


class ResidualTooLarge(ArithmeticError):
    pass


class InvariantViolation(AssertionError):
    pass


@dataclass
class SpectralPencil:
    A: flint.fmpq_mat = field(repr=False)
    B: flint.fmpq_mat = field(repr=False)
    ellipsoid: Ellipsoid
    rotation: RotationVector
    n: int
    coriolis_factor: int = 1
    label: str = "block"

    @property
    def size(self) -> int:
        return self.B.nrows()


@dataclass
class SpectralBlock:
    degree: int | str
    eigenvalues: np.ndarray
    vectors: np.ndarray | None = None
    precision_bits: int = 53
    gram_condition: float = float("nan")
    max_residual: float = float("nan")
    residuals: np.ndarray | None = field(default=None, repr=False)
    wall_time: float = 0.0

    def __len__(self):
        return len(self.eigenvalues)


def cross_coefficients(X: flint.fmpq_mat, n: int, omega: RotationVector) -> flint.fmpq_mat:
    """Coefficient columns of Omega x v for each column v of X."""
    o1, o2, o3 = (xla.fmpq(c) for c in omega.components)
    x1, x2, x3 = bm.split_components(X, n)
    comps = [o2 * x3 - o3 * x2, o3 * x1 - o1 * x3, o1 * x2 - o2 * x1]
    nc = X.ncols()
    flat = []
    for c in comps:
        flat.extend(c.entries())
    return flint.fmpq_mat(3 * dim_polynomials(n), nc, flat)


def assemble(E: Ellipsoid, omega: RotationVector, basis, coriolis_factor: int = 1) -> SpectralPencil:
    """Exact pencil over a BasisSet or BlockBasis."""
    if coriolis_factor not in (1, 2):
        raise ValueError("coriolis_factor must be 1 or 2")
    X, n = basis.coeffs, basis.n
    B = getattr(basis, "gram", None)
    if B is None:
        B = bm.gram(E, n, X)
    A = bm.gram(E, n, X, cross_coefficients(X, n, omega))
    if coriolis_factor != 1:
        A = A * coriolis_factor
    if not xla.is_antisymmetric(A):
        raise InvariantViolation("Coriolis matrix is not exactly antisymmetric")
    if not xla.is_symmetric(B):
        raise InvariantViolation("Gram matrix is not exactly symmetric")
    label = "block" if isinstance(basis, bm.BlockBasis) else "full"
    return SpectralPencil(A, B, E, omega, n, coriolis_factor, label)


def block_pencil(E: Ellipsoid, omega: RotationVector, n: int, coriolis_factor: int = 1) -> SpectralPencil:
    return assemble(E, omega, bm.block_bases(E, n)[n - 1], coriolis_factor)


def block_invariance_check(E: Ellipsoid, omega: RotationVector, n: int) -> bool:
    """All couplings int_E <Omega x w, v>, w in W_n, v in V_{n-1}^0, vanish exactly."""
    if n <= 1:
        return True
    W = bm.block_bases(E, n)[n - 1]
    lower = bm.embed_rows(bm.basis(E, n - 1).coeffs, n - 1, n)
    C = bm.gram(E, n, lower, cross_coefficients(W.coeffs, n, omega))
    return xla.is_zero(C)


def gram_condition(B: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(B))
    except np.linalg.LinAlgError:
        return float("inf")


def solve_pencil(
    pencil: SpectralPencil,
    precision: int = 53,
    want_vectors: bool = False,
    residual_tol: float | None = 1e-8,
) -> SpectralBlock:
    """Real eigenvalues lam of A alpha = i lam B alpha at the given working precision (bits)."""
    t0 = time.perf_counter()
    Bf = xla.to_float_rows(pencil.B)
    cond = gram_condition(Bf)
    if precision <= 53:
        A, B = xla.to_float_rows(pencil.A), Bf
        lam, X = solve_skew_pencil(A, B, want_vectors=True)
        res = pencil_residuals(A, B, lam, X)
        lam_f = np.asarray(lam, dtype=float)
        Xc = X
    else:
        with mpmath.workprec(precision):
            A, B = xla.to_mpf_rows(pencil.A, precision), xla.to_mpf_rows(pencil.B, precision)
            lam, X = solve_skew_pencil(A, B, want_vectors=True)
            res = pencil_residuals(A, B, lam, X)
            lam_f = np.array([float(x) for x in lam])
            Xc = np.array([[complex(z) for z in row] for row in X]) if want_vectors else None
    scale = max(1.0, pencil.rotation.omega * pencil.coriolis_factor)
    max_res = float(np.max(res)) if len(res) else 0.0
    if residual_tol is not None and max_res > residual_tol * scale:
        raise ResidualTooLarge(f"max residual {max_res:.3e} exceeds {residual_tol * scale:.3e}")
    return SpectralBlock(
        degree=pencil.n if pencil.label == "block" else f"full<={pencil.n}",
        eigenvalues=lam_f,
        vectors=Xc if want_vectors else None,
        precision_bits=precision,
        gram_condition=cond,
        max_residual=max_res,
        residuals=res,
        wall_time=time.perf_counter() - t0,
    )


def solve_with_escalation(pencil: SpectralPencil, precision: int = 53, want_vectors: bool = False,
                          cond_limit: float = 1e12, max_precision: int = 512) -> SpectralBlock:
    """Raise the working precision when B is badly conditioned or Cholesky fails."""
    Bf = xla.to_float_rows(pencil.B)
    if gram_condition(Bf) > cond_limit:
        precision = max(precision, 128)
    while True:
        try:
            return solve_pencil(pencil, precision, want_vectors)
        except (CholeskyFailure, ResidualTooLarge):
            if precision >= max_precision:
                raise
            precision = max(128, 2 * precision)


def spectrum(
    E: Ellipsoid,
    omega: RotationVector,
    n_max: int,
    precision: int = 53,
    coriolis_factor: int = 1,
    want_vectors: bool = False,
) -> list[SpectralBlock]:
    """Per-degree blocks W_1..W_{n_max}, followed by their cumulative union."""
    blocks = []
    for W in bm.block_bases(E, n_max):
        pencil = assemble(E, omega, W, coriolis_factor)
        blk = solve_with_escalation(pencil, precision, want_vectors)
        blk.degree = W.n
        blocks.append(blk)
    allv = np.sort(np.concatenate([b.eigenvalues for b in blocks]))
    cum = SpectralBlock(
        degree="cumulative",
        eigenvalues=allv,
        precision_bits=max(b.precision_bits for b in blocks),
        gram_condition=max(b.gram_condition for b in blocks),
        max_residual=max(b.max_residual for b in blocks),
        wall_time=sum(b.wall_time for b in blocks),
    )
    return blocks + [cum]


def full_spectrum(E: Ellipsoid, omega: RotationVector, n: int, precision: int = 53,
                  coriolis_factor: int = 1) -> SpectralBlock:
    """Solve the whole V_n^0 pencil at once (cross-validation of the block route)."""
    pencil = assemble(E, omega, bm.basis(E, n), coriolis_factor)
    return solve_with_escalation(pencil, precision)


def check_block(block: SpectralBlock, omega: float, expected_size: int | None = None,
                sym_tol: float = 1e-10) -> list[str]:
    """Violated invariants of a solved block (empty list when all hold)."""
    lam = np.sort(block.eigenvalues)
    problems = []
    if expected_size is not None and len(lam) != expected_size:
        problems.append(f"count {len(lam)} != {expected_size}")
    if len(lam):
        asym = float(np.max(np.abs(lam + lam[::-1])))
        if asym > sym_tol * omega:
            problems.append(f"spectral asymmetry {asym:.3e}")
        if float(np.max(np.abs(lam))) >= omega:
            problems.append(f"max |lambda| {np.max(np.abs(lam))} >= omega")
    return problems


def numerical_zero_count(block: SpectralBlock, omega: float, tol: float = ZERO_TOL) -> int:
    return int(np.sum(np.abs(block.eigenvalues) < tol * omega))


@dataclass
class ModeField:
    points: np.ndarray
    values: np.ndarray
    magnitude: np.ndarray
    eigenvalue: float


def evaluate_coefficients(basis, alpha: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Complex field values (npoints, 3) of sum_j alpha_j e_j."""
    n = basis.n
    Xf = xla.to_float_rows(basis.coeffs)
    c = Xf @ np.asarray(alpha, dtype=complex)
    s = dim_polynomials(n)
    Mv = monomial_values(points, n)
    return np.stack([Mv @ c[k * s:(k + 1) * s] for k in range(3)], axis=1)


def mode_field(E: Ellipsoid, basis, block: SpectralBlock, j: int, grid_spec=21) -> ModeField:
    """Sample eigenmode j on a regular grid clipped to E; max magnitude scaled to 1."""
    if block.vectors is None:
        raise ValueError("block was solved without eigenvectors")
    counts = (grid_spec,) * 3 if isinstance(grid_spec, int) else tuple(grid_spec)
    axes = [np.linspace(-a, a, k) for a, k in zip(E.semi_axes, counts)]
    g = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    inside = E.contains(g[:, 0], g[:, 1], g[:, 2])
    pts = g[inside]
    vals = evaluate_coefficients(basis, block.vectors[:, j], pts)
    mag = np.sqrt(np.sum(np.abs(vals) ** 2, axis=1))
    peak = float(mag.max()) if len(mag) else 1.0
    if peak > 0:
        vals = vals / peak
        mag = mag / peak
    return ModeField(pts, vals, mag, float(block.eigenvalues[j]))
