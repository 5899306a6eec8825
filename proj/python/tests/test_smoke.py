import json
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

import whitney

ROOT = Path(__file__).resolve().parents[2]


def line_scenario(**overrides):
    sc = {
        "schema": 1,
        "name": "py-line",
        "params": {"n": 1, "s": 1.5, "p": 4},
        "sites": {"kind": "list", "points": [[0.0], [0.375]]},
        "function": {"name": "gaussian", "center": [0.2], "width": 0.8},
        "domain_exp": 1,
        "max_depth": 9,
        "estimator": {"method": "plain-mc", "budget": 20000, "seed": 1},
        "checks": {"unity_samples": 500, "fd_samples": 20, "path_count": 10, "chain_checks": 1, "pair_cubes": 2},
    }
    sc.update(overrides)
    return sc


def test_decompose_planar_sites():
    w = whitney.decompose(np.array([[0.0, 0.0], [0.5, 0.25]]), s=1.5, p=6.0, max_depth=7)
    assert w.dim == 2
    assert w.num_cubes == len(w.cubes()) > 0
    report = w.verify_structure()
    assert all(c["pass"] for c in report["checks"])
    assert w.sites().shape == (2, 2)
    assert w.svg().startswith("<svg")


def test_decomposition_json_round_trip():
    w = whitney.decompose(np.array([[0.0]]), max_depth=8)
    back = whitney.load_decomposition(w.to_json())
    assert back.cubes() == w.cubes()


def test_affine_function_is_reproduced():
    w = whitney.decompose(np.array([[0.0, 0.0], [0.5, -0.25], [-0.75, 0.5]]), s=1.5, p=6.0, max_depth=8)
    f = {"name": "polynomial", "terms": [{"index": [0, 0], "coeff": 1.0}, {"index": [1, 0], "coeff": -2.0},
                                         {"index": [0, 1], "coeff": 0.5}]}
    tf = whitney.Extension.from_function(w, f)
    x = np.array([[0.3, 0.9], [-1.2, 0.1], [1.5, -1.5]])
    expected = 1.0 - 2.0 * x[:, 0] + 0.5 * x[:, 1]
    np.testing.assert_allclose(tf.eval(x), expected, rtol=0, atol=1e-12)
    np.testing.assert_allclose(tf.eval(x, deriv=[1, 0]), -2.0, atol=1e-10)
    assert tf.mode == "validated"


def test_seminorm_calibration():
    est = whitney.seminorm({"name": "polynomial", "terms": [{"index": [1], "coeff": 1.0}]},
                           [0.0], [1.0], s=0.5, p=2.0, method="tensor-quad", budget=100000)
    assert est["value"] == pytest.approx(1.0, rel=1e-2)


def test_verify_and_bound_are_reproducible():
    sc = line_scenario()
    first = whitney.verify(sc)
    assert first["pass"]
    assert first == whitney.verify(sc)
    b = whitney.bound(sc)
    assert b["status"] == "ok"
    assert b["rho"] > 0


def test_constant_function_is_degenerate():
    b = whitney.bound(line_scenario(function={"name": "constant", "value": 2.0}))
    assert b["status"] == "degenerate: both vanish"
    assert b["rho"] is None


def test_errors_surface_as_exceptions():
    with pytest.raises(whitney.WhitneyError):
        whitney.verify({"params": {"n": 1, "s": 1.5, "p": 4}})


@pytest.mark.skipif("WHITNEY_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_verify_writes_report(tmp_path):
    cfg = tmp_path / "sc.json"
    cfg.write_text(json.dumps(line_scenario()))
    out = tmp_path / "out"
    res = subprocess.run([os.environ["WHITNEY_CLI"], "verify", "--config", str(cfg), "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stdout + res.stderr
    report = json.loads((out / "report.json").read_text())
    assert report["pass"]
    assert (out / "summary.txt").exists()
