import math

import numpy as np
import pytest

import pcopt


def test_objectives():
    assert {"rosenbrock", "woods", "noisy-rosenbrock"} <= set(pcopt.objective_names())
    assert pcopt.evaluate("rosenbrock", [1.0, 1.0]) == 0.0
    assert pcopt.evaluate("woods", [1.0, 1.0, 1.0, 1.0]) == 0.0
    with pytest.raises(pcopt.Error):
        pcopt.evaluate("sphere", [0.0])


def test_mixture_density_and_sampling():
    q = pcopt.MixtureModel([pcopt.Gaussian([0.0, 0.0], np.eye(2)), pcopt.Gaussian([3.0, 0.0], 0.5 * np.eye(2))],
                           [0.25, 0.75])
    assert len(q) == 2
    assert q.density([0.0, 0.0]) == pytest.approx(0.25 / (2 * math.pi) + 0.75 * math.exp(-9.0) / math.pi)
    x, h = q.sample(100, seed=3)
    assert x.shape == (100, 2)
    assert np.allclose(h, [q.density(row) for row in x], rtol=1e-12)
    assert pcopt.MixtureModel.parse(q.serialize()).serialize() == q.serialize()
    with pytest.raises(pcopt.Error):
        pcopt.Gaussian([0.0], [[-1.0]])


def test_fitting_and_estimation():
    rng = np.random.default_rng(0)
    x = rng.uniform(-5, 5, size=(200, 2))
    g = np.array([pcopt.evaluate("rosenbrock", row) for row in x])
    h = np.full(200, 0.01)

    w = pcopt.boltzmann_weights(x, g, h, 0.0)
    assert np.allclose(w, 1 / 200)

    gauss = pcopt.fit_gaussian(x, g, h, 0.0)
    assert np.allclose(gauss.mean, x.mean(axis=0), atol=1e-12)
    assert np.allclose(gauss.covariance, np.cov(x.T, bias=True), atol=1e-10)

    model, nll, traces = pcopt.fit_mixture(x, g, h, 0.01, components=2, seed=4)
    assert len(model) == 2 and math.isfinite(nll)
    assert all(np.all(np.diff(t) <= 1e-10) for t in traces)

    est = pcopt.estimate_expected_G(pcopt.MixtureModel(gauss), x, g, h)
    assert math.isfinite(est)
    beta, candidates, scores = pcopt.cross_validate_beta(x, g, h, 0.01)
    assert beta in candidates and len(scores) == 5

    r = pcopt.bias_variance_decompose([0.0, 2.0], 0.0)
    assert r == {"bias_squared": 1.0, "variance": 1.0, "mse": 2.0}
    assert sum(pcopt.softmin_weights([1.0, 3.0])) == pytest.approx(1.0)


def test_run_and_ensemble():
    cfg = {"iterations": 3, "samples_per_iteration": 5, "initial_beta": 1e-3,
           "model_policy": {"kind": "single-gaussian"}, "diagnostic_sample_count": 50, "seed": 9}
    a, b = pcopt.run(cfg), pcopt.run(cfg)
    assert a == b
    assert len(a["records"]) == 3 and not a["failed"]
    rows = pcopt.run_ensemble(cfg, trials=3)
    assert len(rows) == 3 and rows[-1]["trials_ok"] == 3.0
    with pytest.raises(pcopt.Error):
        pcopt.run({"iterations": 0})


def test_schedule():
    fit = pcopt.fit_geometric_schedule([0, 1, 2, 3], [2.0, 6.0, 18.0, 54.0])
    assert fit["log_linear"] == pytest.approx((2.0, 3.0), rel=1e-12)
    assert pcopt.update_beta_geometric(1.0, 2.0) == 2.0
