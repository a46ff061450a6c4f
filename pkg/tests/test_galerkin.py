from fractions import Fraction

import numpy as np
import pytest

from inertial_modes import basis as bm
from inertial_modes import exactla as xla
from inertial_modes import galerkin as gk
from inertial_modes.legendre import legendre_apply
from inertial_modes.polycore import Polynomial3, RotationVector, VectorField, cross, field_to_vector

from conftest import BALL, EZ, TILTED, TRIAXIAL

x = VectorField(*(Polynomial3.variable(i) for i in (1, 2, 3)))


def rigid_basis():
    fields = [cross(e, x) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    return bm.BasisSet(BALL, 1, fields, [1, 1, 1], xla.from_columns([field_to_vector(v, 1) for v in fields]))


def test_rigid_rotation_pencil_by_hand():
    p = gk.assemble(BALL, EZ, rigid_basis())
    assert p.B == xla.matrix([[Fraction(8, 15) if i == j else 0 for j in range(3)] for i in range(3)])
    expected = [[0] * 3 for _ in range(3)]
    expected[1][0], expected[0][1] = Fraction(4, 15), Fraction(-4, 15)
    assert p.A == xla.matrix(expected)
    blk = gk.solve_pencil(p)
    assert np.allclose(blk.eigenvalues, [-0.5, 0, 0.5], atol=1e-14)


@pytest.mark.parametrize("E,O", [(BALL, EZ), (TRIAXIAL, TILTED)])
def test_exact_structure(E, O):
    for n in (1, 2, 3):
        p = gk.block_pencil(E, O, n)
        assert xla.is_antisymmetric(p.A) and xla.is_symmetric(p.B)
        assert all(p.A[i, i] == 0 for i in range(p.size))


@pytest.mark.parametrize("E,O", [(BALL, EZ), (TRIAXIAL, TILTED)])
def test_block_invariance(E, O):
    assert gk.block_invariance_check(E, O, 1)
    assert gk.block_invariance_check(E, O, 2)
    assert gk.block_invariance_check(E, O, 3)


def test_ball_first_block():
    blocks = gk.spectrum(BALL, EZ, 1)
    assert np.allclose(blocks[0].eigenvalues, [-0.5, 0, 0.5], atol=1e-12)


@pytest.mark.parametrize("E,O", [(BALL, EZ), (TRIAXIAL, TILTED), (TRIAXIAL, RotationVector(0, 3, 4))])
def test_block_counts_symmetry_containment(E, O):
    blocks = gk.spectrum(E, O, 5)
    for b in blocks[:-1]:
        assert gk.check_block(b, O.omega, bm.dim_block(b.degree)) == []
    assert len(blocks[-1]) == bm.dim_v0(5)


def test_full_pencil_agrees_with_blocks():
    full = gk.full_spectrum(TRIAXIAL, TILTED, 3)
    blocks = gk.spectrum(TRIAXIAL, TILTED, 3)
    assert np.allclose(full.eigenvalues, blocks[-1].eigenvalues, atol=1e-10)


def test_precision_robustness():
    p = gk.block_pencil(TRIAXIAL, TILTED, 3)
    lo, hi = gk.solve_pencil(p, 53), gk.solve_pencil(p, 106)
    assert hi.precision_bits == 106
    assert np.max(np.abs(lo.eigenvalues - hi.eigenvalues)) < 1e-9 * TILTED.omega


def test_coriolis_factor_two_doubles_spectrum():
    one = gk.spectrum(TRIAXIAL, EZ, 2)[-1].eigenvalues
    two = gk.spectrum(TRIAXIAL, EZ, 2, coriolis_factor=2)[-1].eigenvalues
    assert np.allclose(two, 2 * one, atol=1e-13)


def test_numerical_zeros_follow_parity():
    for b in gk.spectrum(TRIAXIAL, TILTED, 4)[:-1]:
        assert gk.numerical_zero_count(b, TILTED.omega) == b.degree % 2


def test_blocks_are_legendre_eigenspaces():
    # every component of a W_n field is an eigenfunction of L_E with eigenvalue (n + 3/2)^2
    for n in (1, 2, 3):
        mu = Fraction(2 * n + 3, 2) ** 2
        for v in bm.block_bases(TRIAXIAL, n)[n - 1].fields:
            for c in v.components:
                assert (legendre_apply(c, TRIAXIAL) - c.scale(mu)).is_zero()


def test_geostrophic_ball_mode_field():
    W = bm.block_bases(BALL, 1)[0]
    blk = gk.solve_pencil(gk.assemble(BALL, EZ, W), want_vectors=True)
    j = int(np.argmin(np.abs(blk.eigenvalues)))
    mf = gk.mode_field(BALL, W, blk, j, 11)
    rho = np.hypot(mf.points[:, 0], mf.points[:, 1])
    assert np.allclose(mf.magnitude, rho / rho.max(), atol=1e-12)


def test_mode_is_divergence_free_and_tangent():
    n = 2
    W = bm.block_bases(TRIAXIAL, n)[n - 1]
    blk = gk.solve_pencil(gk.assemble(TRIAXIAL, EZ, W), want_vectors=True)
    alpha = blk.vectors[:, 3]
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.3, 0.3, (20, 3))
    h = 1e-5
    div = sum(
        (gk.evaluate_coefficients(W, alpha, pts + h * np.eye(3)[k])[:, k]
         - gk.evaluate_coefficients(W, alpha, pts - h * np.eye(3)[k])[:, k]) / (2 * h)
        for k in range(3)
    )
    scale = np.abs(gk.evaluate_coefficients(W, alpha, pts)).max()
    assert np.max(np.abs(div)) < 1e-6 * scale
    # boundary samples
    A = np.array([float(a) for a in TRIAXIAL.coefficients])
    d = rng.standard_normal((30, 3))
    d /= np.sqrt((A * d * d).sum(axis=1))[:, None]
    v = gk.evaluate_coefficients(W, alpha, d)
    assert np.max(np.abs((v * (A * d)).sum(axis=1))) < 1e-12 * scale


def test_residual_guard():
    p = gk.block_pencil(BALL, EZ, 2)
    with pytest.raises(gk.ResidualTooLarge):
        gk.solve_pencil(p, residual_tol=0.0)
