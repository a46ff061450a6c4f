"""Desk-scale triaxial run: spectrum up to degree n against the quadrature measure."""
import argparse
import sys
from fractions import Fraction

import numpy as np

from inertial_modes import galerkin as gk
from inertial_modes import measure
from inertial_modes.polycore import Ellipsoid, RotationVector


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--coeffs", default="1,1.235,2.04", help="quadric coefficients A1,A2,A3")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--directions", type=int, default=200_000)
    args = p.parse_args(argv)

    E = Ellipsoid(*(Fraction(c) for c in args.coeffs.split(",")))
    O = RotationVector(0, 0, 1)
    blocks = gk.spectrum(E, O, args.n)
    for b in blocks[:-1]:
        print(f"W_{b.degree}: size {len(b.eigenvalues):3d}  cond(B) {b.gram_condition:.1e}  "
              f"residual {b.max_residual:.1e}  {b.wall_time:.2f}s")
    quad = measure.general_cdf(E, O, args.directions)
    emp = measure.empirical_cdf(blocks[-1].eigenvalues)
    print(f"KS(spectrum, quadrature) = {measure.ks_distance(emp, quad):.4f}")
    for u in np.linspace(-0.75, 0.75, 7):
        print(f"  F({u:+.2f}): spectrum {float(emp(u)):.4f}  quadrature {float(quad(u)):.4f}")


if __name__ == "__main__":
    sys.exit(main())
