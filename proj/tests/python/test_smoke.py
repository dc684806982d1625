import math

import numpy as np
import pytest

import scfr


def test_fit_predict_roundtrip():
    X, y = scfr.gen_gamma(n=120, seed=3)
    model = scfr.fit(X, y, scfr.make_config(norm=1.0, knots_per_depth=3, lam=0.1, max_depth=6))
    assert model.depth == 6
    pred = model.predict(X)
    assert pred.shape == (120,)
    assert np.all(np.isfinite(pred))
    back = scfr.Model.from_json(model.to_json())
    assert np.array_equal(back.predict(X), pred)
    depths = model.predict_all_depths(X)
    assert depths.shape == (120, 7)
    assert np.array_equal(depths[:, -1], pred)


def test_fit_traced_and_auto_depth():
    X, y = scfr.gen_sinc(n=150, seed=1)
    model, trace, chosen = scfr.fit_traced(X, y, scfr.make_config(norm=1.0, auto_depth=True, max_depth=8))
    rmse = [t.train_rmse for t in trace]
    assert chosen == scfr.select_truncation_depth(rmse)
    assert model.depth == chosen


def test_depth_zero_is_ols():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(80, 3))
    y = 5 + X @ np.array([1.0, -2.0, 0.5]) + rng.normal(scale=0.1, size=80)
    model = scfr.fit(X, y, scfr.make_config(max_depth=0))
    A = np.column_stack([np.ones(80), X])
    beta, *_ = np.linalg.lstsq(A, y, rcond=None)
    assert np.max(np.abs(model.predict(X) - A @ beta)) < 1e-9


def test_small_helpers():
    assert scfr.select_knots([5, -4, 3.9, -3, 2], 2) == [0, 1]
    assert scfr.compute_offset([-2, 1, 3], 1e-6) == pytest.approx(2.000001)
    assert scfr.eval_basis([], 0.0, 1.0, 0.5).sum() == pytest.approx(1.0)
    assert scfr.penalty_block(4).shape == (4, 4)
    assert scfr.rmse([0, 2], [0, 0]) == pytest.approx(math.sqrt(2))
    assert scfr.threshold_counts([90, 88.9, 89.0], 89) == (2, 1)
    assert scfr.cohen_kappa([True, True, False, False], [True, False, False, False]) == pytest.approx(0.5)
    assert scfr.kappa_label(0.666457) == "substantial"


def test_splits():
    y = np.arange(1.0, 11.0)
    X = y.reshape(-1, 1)
    s = scfr.split_out_of_domain(X, y, seed=4)
    assert s["threshold"] == 10.0
    assert len(s["test_rows"]) == 1
    o = scfr.split_out_of_sample(X[:9], y[:9], seed=2)
    assert len(o["train_rows"]) == 6
    assert sorted(o["train_rows"] + o["test_rows"]) == list(range(9))


def test_errors_map_to_python():
    with pytest.raises(scfr.InputError):
        scfr.fit(np.zeros((1, 2)), np.zeros(1))
    with pytest.raises(ValueError):
        scfr.gen_gamma(lo=-1.5, hi=0.5)
    with pytest.raises(scfr.InputError):
        scfr.Model.from_json("{")
    with pytest.raises(TypeError):
        scfr.make_config(depth=3)
