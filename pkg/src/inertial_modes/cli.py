"""Command-line front end.

Exit codes: 0 success, 2 bad configuration, 3 numerical failure, 4 invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import basis as bm
from . import galerkin as gk
from . import geokernel, legendre, measure, raydyn
from .config import ConfigError, RunConfig, parse_rational, parse_triple

EXIT_CONFIG, EXIT_NUMERIC, EXIT_INVARIANT = 2, 3, 4


class InvariantFailure(RuntimeError):
    pass


def _fmt(x: float) -> str:
    return f"{x + 0.0:.17g}"


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def _write_json(path: Path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _versions() -> dict:
    import flint
    import mpmath
    import scipy

    return {
        "inertial_modes": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
        "python-flint": flint.__version__,
    }


def config_from_args(args) -> RunConfig:
    kw = {}
    if getattr(args, "coeffs", None):
        kw["coefficients"] = parse_triple(args.coeffs)
        kw["axes"] = None
    elif getattr(args, "axes", None):
        kw["axes"] = parse_triple(args.axes)
    if getattr(args, "omega", None):
        kw["omega"] = parse_triple(args.omega)
    for name in ("n", "precision_bits", "coriolis_factor", "directions", "ugrid", "seed"):
        val = getattr(args, name, None)
        if val is not None:
            kw["n_max" if name == "n" else name] = val
    kw["out"] = Path(args.out)
    return RunConfig(**kw)


# ---------------------------------------------------------------- commands

def cmd_spectrum(cfg: RunConfig, args) -> int:
    E, O = cfg.ellipsoid(), cfg.rotation()
    blocks = gk.spectrum(E, O, cfg.n_max, cfg.precision_bits, cfg.coriolis_factor)
    per, cum = blocks[:-1], blocks[-1]
    bound = O.omega * cfg.coriolis_factor
    rows, report, failures = [], [], []
    for b in per:
        for j, (lam, res) in enumerate(zip(b.eigenvalues, b.residuals)):
            rows.append((b.degree, j, float(lam), float(res)))
        probs = gk.check_block(b, bound, bm.dim_block(b.degree))
        failures += [f"W_{b.degree}: {p}" for p in probs]
        report.append({
            "degree": b.degree,
            "size": len(b),
            "precision_bits": b.precision_bits,
            "gram_condition": b.gram_condition,
            "max_residual": b.max_residual,
            "numerical_zeros": gk.numerical_zero_count(b, bound),
            "problems": probs,
            "wall_time": round(b.wall_time, 4),
        })
    _write_csv(cfg.out / "spectrum.csv", ["degree", "index", "lambda", "residual"], rows)
    _write_csv(cfg.out / "cumulative.csv", ["index", "lambda"], [(j, float(x)) for j, x in enumerate(cum.eigenvalues)])
    _write_json(cfg.out / "manifest.json", {
        "command": "spectrum",
        "config": cfg.to_json(),
        "versions": _versions(),
        "blocks": report,
        "n_eigenvalues": len(cum),
        "invariants_ok": not failures,
    })
    if failures:
        raise InvariantFailure("; ".join(failures))
    return 0


def _reference_cdf(cfg: RunConfig) -> measure.MeasureCDF:
    if cfg.is_axisymmetric():
        E = cfg.ellipsoid()
        return measure.closed_form_cdf(float(E.A3 / E.A1), cfg.ugrid)
    return measure.general_cdf(cfg.ellipsoid(), cfg.rotation(), cfg.directions, cfg.ugrid, cfg.seed)


def _gnuplot(path: Path, data: str, columns: list[str]):
    lines = [f"set datafile separator ','", "set key autotitle columnhead", f"set xlabel '{columns[0]}'"]
    plots = [f"'{data}' using 1:{k + 2} with lines" for k in range(len(columns) - 1)]
    lines.append("plot " + ", ".join(plots))
    path.write_text("\n".join(lines) + "\n")


def cmd_measure(cfg: RunConfig, args) -> int:
    outputs = []
    if cfg.is_axisymmetric():
        E = cfg.ellipsoid()
        a = float(E.A3 / E.A1)
        u = measure.u_grid(cfg.ugrid)
        outputs.append(("measure.csv", u, measure.axisym_cdf(a, u), measure.axisym_density(a, u)))
        if args.both:
            q = measure.general_cdf(cfg.ellipsoid(), cfg.rotation(), cfg.directions, cfg.ugrid, cfg.seed)
            outputs.append(("measure_quadrature.csv", q.u, q.cdf, q.density()))
    else:
        q = measure.general_cdf(cfg.ellipsoid(), cfg.rotation(), cfg.directions, cfg.ugrid, cfg.seed)
        outputs.append(("measure.csv", q.u, q.cdf, q.density()))
    for name, u, c, d in outputs:
        _write_csv(cfg.out / name, ["u", "cdf", "density"], zip(map(float, u), map(float, c), map(float, d)))
        if args.gnuplot:
            _gnuplot(cfg.out / (Path(name).stem + ".gp"), name, ["u", "cdf", "density"])
    return 0


def _read_eigenvalues(path: Path) -> np.ndarray:
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["lambda"]) for r in rows])


def cmd_compare(cfg: RunConfig, args) -> int:
    if args.spectrum:
        eigs = _read_eigenvalues(Path(args.spectrum))
    else:
        blocks = gk.spectrum(cfg.ellipsoid(), cfg.rotation(), cfg.n_max, cfg.precision_bits, cfg.coriolis_factor)
        eigs = blocks[-1].eigenvalues
    omega = cfg.rotation().omega * cfg.coriolis_factor
    emp = measure.empirical_cdf(eigs, omega)
    ref = _reference_cdf(cfg)
    ks = measure.ks_distance(emp, ref)
    _write_json(cfg.out / "compare.json", {
        "ks": ks,
        "n_eigenvalues": int(len(eigs)),
        "n_directions": None if ref.kind == "closed-form" else ref.meta["n_directions"],
        "reference": ref.kind,
        "config": cfg.to_json(),
    })
    u = ref.u
    _write_csv(cfg.out / "compare_cdf.csv", ["u", "empirical", "reference"],
               zip(map(float, u), map(float, emp(u)), map(float, ref(u))))
    if args.gnuplot:
        _gnuplot(cfg.out / "compare_cdf.gp", "compare_cdf.csv", ["u", "empirical", "reference"])
    print(f"KS = {ks:.6f} over {len(eigs)} eigenvalues")
    return 0


def cmd_geostrophic(cfg: RunConfig, args) -> int:
    rep = geokernel.geostrophic_report(cfg.ellipsoid(), cfg.rotation(), cfg.n_max)
    rep["taylor_proudman"] = all(
        geokernel.taylor_proudman_check(cfg.ellipsoid(), cfg.rotation(), n) for n in range(1, cfg.n_max + 1, 2)
    )
    _write_json(cfg.out / "geostrophic.json", rep)
    if not (rep["parity_ok"] and rep["taylor_proudman"]):
        raise InvariantFailure(f"geostrophic parity violated: {rep['counts']}")
    return 0


def cmd_rays(cfg: RunConfig, args) -> int:
    x0q, xi0q = parse_triple(args.x0), parse_triple(args.xi0)
    x0 = np.array([float(v) for v in x0q])
    xi0 = np.array([float(v) for v in xi0q])
    E = cfg.ellipsoid()
    if sum(A * Fraction(v) ** 2 for A, v in zip(E.coefficients, x0q)) >= 1:
        raise ConfigError("initial position must be inside the ellipsoid")
    dtype = np.longdouble if args.extended else np.float64
    traj = raydyn.trace(E, cfg.rotation(), raydyn.RayState(x0, xi0, args.branch), args.reflections,
                        dtype=dtype, kappa_max=args.kappa_max)
    header = ["event", "t", "x1", "x2", "x3", "xi1", "xi2", "xi3", "branch", "lambda1_abs", "sigmaL"]
    _write_csv(cfg.out / "trajectory.csv", header, ([*r] for r in traj.rows()))
    print(f"status={traj.status} events={len(traj.events)} "
          f"drift(|Lambda1|)={traj.drift('lambda1_abs'):.2e} drift(sigma)={traj.drift('sigma'):.2e}")
    return 0


def cmd_legendre(cfg: RunConfig, args) -> int:
    E = cfg.ellipsoid() if args.ellipsoid else None
    checks = {str(n): legendre.eigenrelation_check(n, E) for n in range(0, cfg.n_max + 1)}
    roots = [float(parse_rational(s)) for s in args.sqrt_lambda.split(",")]
    rows = legendre.weyl_table(roots)
    _write_csv(cfg.out / "weyl.csv", ["sqrt_lambda", "count", "liouville", "ratio"], rows)
    _write_json(cfg.out / "legendre.json", {
        "eigenrelation": checks,
        "operator": "L_E" if E is not None else "L",
        "config": cfg.to_json(),
    })
    if not all(checks.values()):
        raise InvariantFailure(f"eigenrelation failed: {checks}")
    return 0


def cmd_mode_field(cfg: RunConfig, args) -> int:
    E, O = cfg.ellipsoid(), cfg.rotation()
    n = cfg.n_max
    W = bm.block_bases(E, n)[n - 1]
    pencil = gk.assemble(E, O, W, cfg.coriolis_factor)
    blk = gk.solve_with_escalation(pencil, cfg.precision_bits, want_vectors=True)
    if args.target is not None:
        j = int(np.argmin(np.abs(blk.eigenvalues - float(parse_rational(args.target)))))
    else:
        j = args.index
    if not 0 <= j < len(blk):
        raise ConfigError(f"mode index {j} outside 0..{len(blk) - 1}")
    mf = gk.mode_field(E, W, blk, j, args.grid)
    v = mf.values
    rows = (
        (*map(float, p), float(a.real), float(a.imag), float(b.real), float(b.imag), float(c.real), float(c.imag), float(m))
        for p, (a, b, c), m in zip(mf.points, v, mf.magnitude)
    )
    header = ["x1", "x2", "x3", "re_v1", "im_v1", "re_v2", "im_v2", "re_v3", "im_v3", "magnitude"]
    _write_csv(cfg.out / "mode_field.csv", header, rows)
    print(f"mode {j} of W_{n}: lambda = {mf.eigenvalue:.12f}")
    return 0


COMMANDS = {
    "spectrum": cmd_spectrum,
    "measure": cmd_measure,
    "compare": cmd_compare,
    "geostrophic": cmd_geostrophic,
    "rays": cmd_rays,
    "legendre": cmd_legendre,
    "mode-field": cmd_mode_field,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    geo = common.add_mutually_exclusive_group()
    geo.add_argument("--axes", help="semi-axes a1,a2,a3 as rationals, e.g. 1,4/5,2/3")
    geo.add_argument("--coeffs", help="quadric coefficients A1,A2,A3 (A_i = a_i^-2) instead of semi-axes")
    common.add_argument("--omega", default="0,0,1", help="rotation vector, three rationals")
    common.add_argument("--n", type=int, default=None, help="maximal polynomial degree")
    common.add_argument("--precision-bits", type=int, default=None)
    common.add_argument("--coriolis-factor", type=int, choices=(1, 2), default=None)
    common.add_argument("--directions", type=int, default=None, help="quadrature directions")
    common.add_argument("--ugrid", type=int, default=None, help="points of the u-grid")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="Monte Carlo quadrature instead of the grid")

    p = argparse.ArgumentParser(prog="inertial-modes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="per-degree spectra up to degree --n")
    s = sub.add_parser("measure", parents=[common], help="limit spectral measure")
    s.add_argument("--both", action="store_true", help="also write the quadrature CDF in the axisymmetric case")
    s.add_argument("--gnuplot", action="store_true")
    s = sub.add_parser("compare", parents=[common], help="KS distance between spectrum and limit measure")
    s.add_argument("--spectrum", help="cumulative.csv or spectrum.csv from a previous run")
    s.add_argument("--gnuplot", action="store_true")
    sub.add_parser("geostrophic", parents=[common], help="exact kernel counts")
    s = sub.add_parser("rays", parents=[common], help="ray tracing")
    s.add_argument("--x0", default="0,0,0")
    s.add_argument("--xi0", default="1,0,1")
    s.add_argument("--branch", type=int, choices=(1, -1), default=1)
    s.add_argument("--reflections", type=int, default=1000)
    s.add_argument("--extended", action="store_true", help="trace in extended (long double) precision")
    s.add_argument("--kappa-max", type=float, default=None, help="stop near the characteristic set")
    s = sub.add_parser("legendre", parents=[common], help="eigenrelation and Weyl counts")
    s.add_argument("--sqrt-lambda", default="10,25,60,600")
    s.add_argument("--ellipsoid", action="store_true", help="use L_E for the configured ellipsoid")
    s = sub.add_parser("mode-field", parents=[common], help="sample an eigenmode of the degree --n block")
    s.add_argument("--index", type=int, default=0)
    s.add_argument("--target", default=None, help="pick the eigenvalue closest to this value")
    s.add_argument("--grid", type=int, default=21)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantFailure, gk.InvariantViolation, bm.DimensionMismatch) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
