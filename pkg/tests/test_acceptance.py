"""Acceptance criteria, each at its stated tolerance.

Spectra are computed once per configuration and shared between criteria.
"""
from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from inertial_modes import basis as bm
from inertial_modes import galerkin as gk
from inertial_modes import geokernel, legendre, measure, raydyn
from inertial_modes.oracle import oracle_eigenvalues
from inertial_modes.polycore import Ellipsoid, RotationVector

from conftest import BALL, EZ, FLAT, TILTED, TRIAXIAL, record

pytestmark = pytest.mark.slow

N_MEASURE = 12
AXISYM = {a: Ellipsoid(1, 1, Fraction(a)) for a in ("1/4", "1", "4")}
TRIAXIAL_A = Ellipsoid(1, Fraction("1.235"), Fraction("2.04"))
SPHEROID = Ellipsoid(1, 1, Fraction("1.179"))


@lru_cache(maxsize=None)
def solved(E, O, n):
    return gk.spectrum(E, O, n)


def solved_configs():
    """Every configuration solved anywhere in this module, with its degree."""
    out = [(E, EZ, N_MEASURE) for E in AXISYM.values()]
    out += [(TRIAXIAL_A, EZ, N_MEASURE), (SPHEROID, EZ, 10), (TRIAXIAL, TILTED, N_MEASURE)]
    return out


def test_01_dimension_laws():
    bad = []
    for name, E in (("ball", BALL), ("triaxial", TRIAXIAL), ("flattened", FLAT)):
        for n in range(1, 11):
            if len(bm.basis(E, n)) != n * (n + 1) * (2 * n + 7) // 6:
                bad.append(f"{name} V_{n}")
        sizes = [len(W) for W in bm.block_bases(E, 10)]
        if sizes != [n * (n + 2) for n in range(1, 11)]:
            bad.append(f"{name} W sizes {sizes}")
    assert record(1, "dimension laws", not bad, "n=1..10, three ellipsoids" if not bad else ", ".join(bad))


def test_02_ball_degree_one():
    lam = solved(BALL, EZ, 1)[0].eigenvalues
    err = float(np.max(np.abs(lam - np.array([-0.5, 0.0, 0.5]))))
    assert record(2, "ball W_1 spectrum", err <= 1e-12, f"max error {err:.1e} (<= 1e-12)")


def test_03_symmetry_and_containment():
    worst_sym, worst_max, problems = 0.0, 0.0, []
    for E, O, n in solved_configs():
        for b in solved(E, O, n)[:-1]:
            lam = np.sort(b.eigenvalues)
            worst_sym = max(worst_sym, float(np.max(np.abs(lam + lam[::-1]))) / O.omega)
            worst_max = max(worst_max, float(np.max(np.abs(lam))) / O.omega)
            problems += gk.check_block(b, O.omega, bm.dim_block(b.degree))
    ok = not problems and worst_sym <= 1e-10 and worst_max < 1
    assert record(3, "spectral symmetry and containment", ok,
                  f"max |lam_j + lam_(d+1-j)|/omega = {worst_sym:.1e}, max |lam|/omega = {worst_max:.6f}")


def test_04_block_invariance():
    failures = []
    for E in (BALL, TRIAXIAL, FLAT):
        for O in (EZ, TILTED):
            for n in range(1, 9):
                if not gk.block_invariance_check(E, O, n):
                    failures.append((E, O, n))
    assert record(4, "exact block invariance", not failures,
                  "all W_n / V_(n-1)^0 couplings are exactly 0 for n <= 8, 3 ellipsoids x 2 rotations"
                  if not failures else str(failures))


def test_05_geostrophic_parity():
    counts = {}
    for name, E, O in (("ball", BALL, EZ), ("triaxial", TRIAXIAL, EZ), ("tilted", TRIAXIAL, TILTED)):
        counts[name] = [geokernel.geostrophic_count(E, O, n) for n in range(1, 10)]
    ok = all(c == [n % 2 for n in range(1, 10)] for c in counts.values())
    assert record(5, "geostrophic parity (exact rank)", ok, f"counts n=1..9: {counts['tilted']} for every config")


def test_06_axisymmetric_measure():
    ks = {}
    for a, E in AXISYM.items():
        eigs = solved(E, EZ, N_MEASURE)[-1].eigenvalues
        ks[a] = measure.ks_distance(measure.empirical_cdf(eigs), measure.closed_form_cdf(float(Fraction(a))))
    ok = all(v <= 0.08 for v in ks.values())
    assert record(6, "axisymmetric measure law", ok,
                  ", ".join(f"KS(a={a})={v:.4f}" for a, v in ks.items()) + f" (<= 0.08, degrees <= {N_MEASURE})")


def test_07_quadrature_vs_closed_form():
    err = {}
    for a, E in AXISYM.items():
        q = measure.general_cdf(E, EZ, 1_000_000)
        err[a] = float(np.max(np.abs(q.cdf - measure.axisym_cdf(float(Fraction(a)), q.u))))
    ok = all(v <= 2e-3 for v in err.values())
    assert record(7, "quadrature vs closed form", ok, ", ".join(f"a={a}: {v:.1e}" for a, v in err.items()) + " (<= 2e-3)")


def test_08_triaxial_reproduction():
    eigs = solved(TRIAXIAL_A, EZ, N_MEASURE)[-1].eigenvalues
    ks = measure.ks_distance(measure.empirical_cdf(eigs), measure.general_cdf(TRIAXIAL_A, EZ, 1_000_000))
    assert record(8, "non-integrable triaxial measure", ks <= 0.08, f"KS={ks:.4f} over {len(eigs)} eigenvalues (<= 0.08)")


def test_09_legendre_eigenrelation():
    E = Ellipsoid(1, Fraction(4, 5), Fraction(2, 3))
    ok = all(legendre.eigenrelation_check(n) and legendre.eigenrelation_check(n, E) for n in range(0, 9))
    assert record(9, "Legendre eigenrelation", ok, "exact for n <= 8, ball (L) and ellipsoid (L_E)")


def test_10_weyl_law():
    rows = {s: r for s, _, _, r in legendre.weyl_table([60, 600])}
    ok = 0.95 <= rows[60.0] <= 1.05 and 0.99 <= rows[600.0] <= 1.01
    assert record(10, "Weyl law", ok, f"ratio {rows[60.0]:.6f} at sqrt(lam)=60, {rows[600.0]:.7f} at 600")


def test_11_ray_invariants():
    assert np.finfo(np.longdouble).eps < 1e-18, "extended precision is required for this criterion"
    drifts = []
    starts = [([0.1, 0.2, -0.1], [0.3, 0.5, 0.7]), ([-0.2, 0.05, 0.3], [0.9, -0.4, 0.35])]
    for E in (BALL, Ellipsoid.from_semi_axes(1, 1, 2)):
        for x0, xi0 in starts:
            tr = raydyn.trace(E, EZ, raydyn.RayState(x0, xi0, 1), 10_000, dtype=np.longdouble)
            assert tr.status == "max-reflections"
            drifts.append((tr.drift("lambda1_abs"), tr.drift("sigma")))
    xi, _ = raydyn.reflect(BALL, EZ, [0, 0, 1], [1, 0, 1], np.sqrt(0.5))
    pole = float(np.max(np.abs(xi - np.array([1.0, 0.0, -1.0]))))
    worst_l = max(d[0] for d in drifts)
    worst_s = max(d[1] for d in drifts)
    ok = worst_l <= 1e-9 and worst_s <= 1e-9 and pole <= 4 * np.finfo(float).eps
    assert record(11, "ray invariants", ok,
                  f"10^4 reflections: drift |Lambda1| {worst_l:.1e}, sigma(L_E) {worst_s:.1e}; pole example error {pole:.1e}")


def test_12_spheroid_mode():
    blocks = solved(SPHEROID, EZ, 10)
    eigs = np.concatenate([b.eigenvalues for b in blocks[:-1]])
    best = float(eigs[np.argmin(np.abs(eigs - 0.5412))])
    assert record(12, "spheroid mode near 0.5412", abs(best - 0.5412) <= 5e-3, f"closest eigenvalue {best:.6f}")


def test_13_oracle_equivalence():
    worst, count = 0.0, 0
    pencils = []
    for E, O, _ in solved_configs() + [(BALL, EZ, 2), (FLAT, TILTED, 2)]:
        pencils += [gk.block_pencil(E, O, n) for n in (1, 2)]
        pencils += [gk.assemble(E, O, bm.basis(E, n)) for n in (1, 2)]
    for p in pencils:
        if p.size > 12:
            continue
        ref = np.array(oracle_eigenvalues(p))
        got = gk.solve_pencil(p).eigenvalues
        worst = max(worst, float(np.max(np.abs(ref - got))))
        count += 1
    assert record(13, "solver vs characteristic-polynomial oracle", worst <= 1e-10,
                  f"{count} pencils of size <= 12, max deviation {worst:.1e}")
