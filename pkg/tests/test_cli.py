import csv
import json

import numpy as np
import pytest

from inertial_modes.cli import main
from inertial_modes.config import ConfigError, RunConfig, parse_rational


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_spectrum_ball_degree_one(tmp_path):
    assert main(["spectrum", "--axes", "1,1,1", "--n", "1", "--out", str(tmp_path)]) == 0
    lam = [float(r["lambda"]) for r in rows(tmp_path / "spectrum.csv")]
    assert np.allclose(lam, [-0.5, 0, 0.5], atol=1e-12)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["invariants_ok"] and man["blocks"][0]["precision_bits"] == 53


def test_spectrum_counts_and_reproducibility(tmp_path):
    for d in ("a", "b"):
        assert main(["spectrum", "--axes", "1,1,1", "--omega", "0,0,1", "--n", "4", "--out", str(tmp_path / d)]) == 0
    r = rows(tmp_path / "a" / "spectrum.csv")
    assert [sum(1 for x in r if x["degree"] == str(k)) for k in (1, 2, 3, 4)] == [3, 8, 15, 24]
    assert (tmp_path / "a" / "spectrum.csv").read_bytes() == (tmp_path / "b" / "spectrum.csv").read_bytes()


def test_measure_ball_is_uniform(tmp_path):
    assert main(["measure", "--axes", "1,1,1", "--omega", "0,0,1", "--out", str(tmp_path), "--gnuplot"]) == 0
    dens = [float(r["density"]) for r in rows(tmp_path / "measure.csv")]
    assert np.allclose(dens, 0.5)
    assert (tmp_path / "measure.gp").exists()


def test_measure_general_uses_quadrature(tmp_path):
    args = ["measure", "--coeffs", "1,1.235,2.04", "--directions", "40000", "--ugrid", "201", "--out", str(tmp_path)]
    assert main(args) == 0
    cdf = np.array([float(r["cdf"]) for r in rows(tmp_path / "measure.csv")])
    assert cdf[0] == 0 and cdf[-1] == 1 and np.all(np.diff(cdf) >= 0)


def test_compare_from_file(tmp_path):
    assert main(["spectrum", "--axes", "1,1,1", "--n", "5", "--out", str(tmp_path)]) == 0
    assert main(["compare", "--axes", "1,1,1", "--spectrum", str(tmp_path / "cumulative.csv"), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "compare.json").read_text())
    assert rep["n_eigenvalues"] == 5 * 6 * 17 // 6
    assert 0 < rep["ks"] < 0.15


def test_geostrophic_report(tmp_path):
    assert main(["geostrophic", "--axes", "1,4/5,2/3", "--omega", "3/5,0,4/5", "--n", "3", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "geostrophic.json").read_text())
    assert rep["counts"] == {"1": 1, "2": 0, "3": 1} and "S" in rep


def test_rays_and_legendre(tmp_path):
    assert main(["rays", "--axes", "1,1,2", "--x0", "0.1,0.2,-0.1", "--xi0", "0.3,0.5,0.7",
                 "--reflections", "200", "--out", str(tmp_path)]) == 0
    r = rows(tmp_path / "trajectory.csv")
    assert len(r) == 201 and list(r[0]) == ["event", "t", "x1", "x2", "x3", "xi1", "xi2", "xi3",
                                            "branch", "lambda1_abs", "sigmaL"]
    assert main(["legendre", "--n", "3", "--sqrt-lambda", "60", "--out", str(tmp_path)]) == 0
    w = rows(tmp_path / "weyl.csv")[0]
    assert int(w["count"]) == 35990


def test_mode_field(tmp_path):
    assert main(["mode-field", "--axes", "1,1,1", "--n", "1", "--target", "0", "--grid", "9", "--out", str(tmp_path)]) == 0
    r = rows(tmp_path / "mode_field.csv")
    assert max(float(x["magnitude"]) for x in r) == pytest.approx(1.0)


@pytest.mark.parametrize("argv", [
    ["spectrum", "--axes", "1,0,1"],
    ["spectrum", "--axes", "1,1"],
    ["spectrum", "--omega", "0,0,0"],
    ["spectrum", "--n", "0"],
    ["rays", "--axes", "1,1,1", "--x0", "2,0,0"],
])
def test_config_errors_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_parse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--no-such-flag"])
    assert exc.value.code == 2


def test_characteristic_start_is_reported_not_fatal(tmp_path):
    # a covector along the rotation axis has no group velocity: the ray stops as degenerate
    assert main(["rays", "--xi0", "0,0,1", "--reflections", "5", "--out", str(tmp_path)]) == 0
    assert len(rows(tmp_path / "trajectory.csv")) == 1


def test_numerical_failure_exit_3(tmp_path, monkeypatch):
    from inertial_modes import galerkin as gk

    def boom(*a, **k):
        raise gk.CholeskyFailure("not positive definite")

    monkeypatch.setattr(gk, "spectrum", boom)
    assert main(["spectrum", "--n", "1", "--out", str(tmp_path)]) == 3


def test_invariant_violation_exit_4(tmp_path, monkeypatch):
    from inertial_modes import galerkin as gk

    monkeypatch.setattr(gk, "check_block", lambda *a, **k: ["spectral asymmetry"])
    assert main(["spectrum", "--n", "1", "--out", str(tmp_path)]) == 4
    assert json.loads((tmp_path / "manifest.json").read_text())["invariants_ok"] is False


def test_bad_mode_index_exit_2(tmp_path):
    assert main(["mode-field", "--n", "1", "--index", "7", "--out", str(tmp_path)]) == 2


def test_run_config():
    cfg = RunConfig(axes=(1, parse_rational("4/5"), parse_rational("2/3")), omega=(0, 0, 1))
    assert cfg.ellipsoid().A2 == parse_rational("25/16")
    assert cfg.is_axisymmetric() is False
    assert RunConfig(coefficients=(1, 1, 4), axes=None).is_axisymmetric()
    with pytest.raises(ConfigError):
        RunConfig(coriolis_factor=3)
    assert cfg.to_json()["coefficients"] == ["1", "25/16", "9/4"]
