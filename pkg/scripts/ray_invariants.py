"""Invariant drift of a reflected ray in float64 and in extended precision."""
import argparse
import sys
from fractions import Fraction

import numpy as np

from inertial_modes import raydyn
from inertial_modes.polycore import Ellipsoid, RotationVector


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--axes", default="1,1,2", help="semi-axes a1,a2,a3")
    p.add_argument("--x0", default="0.1,0.2,-0.1")
    p.add_argument("--xi0", default="0.3,0.5,0.7")
    p.add_argument("--reflections", type=int, default=10_000)
    args = p.parse_args(argv)

    E = Ellipsoid.from_semi_axes(*(Fraction(a) for a in args.axes.split(",")))
    state = raydyn.RayState([float(v) for v in args.x0.split(",")], [float(v) for v in args.xi0.split(",")], 1)
    for dtype in (np.float64, np.longdouble):
        tr = raydyn.trace(E, RotationVector(0, 0, 1), state, args.reflections, dtype=dtype)
        kappa = max(e.kappa for e in tr.events)
        print(f"{np.dtype(dtype).name:>10}: {len(tr.events) - 1} reflections ({tr.status})  "
              f"drift |Lambda1| {tr.drift('lambda1_abs'):.1e}  sigma {tr.drift('sigma'):.1e}  max kappa {kappa:.1e}")


if __name__ == "__main__":
    sys.exit(main())
