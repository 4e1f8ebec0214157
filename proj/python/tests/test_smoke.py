import csv
import math

import numpy as np
import pytest

import implreg


def test_problem_and_dataset():
    p = implreg.power_law_problem(2.0, 1.0, 200, 1.0)
    assert p.dim == 200
    assert np.all(np.diff(p.spectrum) <= 0)
    ds = implreg.sample_dataset(p, 50, 7)
    assert ds.X.shape == (50, 200)
    again = implreg.sample_dataset(p, 50, 7)
    assert np.array_equal(ds.X, again.X)


def test_ridge_matches_numpy():
    p = implreg.power_law_problem(2.0, 1.0, 30, 1.0)
    ds = implreg.sample_dataset(p, 40, 3)
    lam = 0.1
    X, y = ds.X, ds.y
    expected = np.linalg.solve(X.T @ X + 40 * lam * np.eye(30), X.T @ y)
    assert np.allclose(implreg.ridge_fit(ds, lam), expected, rtol=1e-10, atol=1e-12)


def test_gd_zero_steps_and_risk():
    p = implreg.power_law_problem(2.0, 1.0, 30, 1.0)
    ds = implreg.sample_dataset(p, 40, 3)
    eta = 0.5 * implreg.max_stable_stepsize(ds)
    assert np.all(implreg.gd_fit(ds, eta, 0) == 0)
    r = implreg.gd_risk(ds, p, eta, 0)
    assert r["mean"] == pytest.approx(p.signal_energy())
    s = implreg.sgd_risk(p, 100, 1.0 / (4.0 * p.spectrum.sum()))
    assert 0 < s["mean"] < p.signal_energy() + p.sigma2
    assert s["method"] == "ExactRecursion"


def test_bounds_and_exponents():
    p = implreg.spike_problem(100, 10000, 1.0)
    rep = implreg.bound("gd_lower", p, 100, eta=0.5 / p.spectrum.sum(), t=100)
    assert rep["ell_star"] == 1
    assert implreg.power_law_exponent("gd", 2.0, 1.0) == pytest.approx(-0.8)


def test_validation_errors():
    assert implreg.validate({"problem": {"generator": "spike", "n": 10, "d": 10}, "params": {"n": 10}}, "bounds")
    with pytest.raises(ValueError):
        implreg.spike_problem(10, 10, 1.0)


def test_run_writes_outputs(tmp_path):
    cfg = {
        "problem": {"generator": "power_law", "a": 2, "r": 1, "d": 200, "sigma2": 1},
        "params": {"algorithm": "ridge", "n": 50, "lambda": 0.01},
    }
    code, msg = implreg.run("simulate", cfg, out=tmp_path, seed=1, trials=4)
    assert code == 0, msg
    rows = list(csv.DictReader(open(tmp_path / "result.csv")))
    assert math.isfinite(float(rows[0]["mean"]))
    assert (tmp_path / "run.json").exists()
    code, _ = implreg.run("simulate", {"params": {}}, out=tmp_path)
    assert code == 2
