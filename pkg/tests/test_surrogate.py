import numpy as np
import pytest

from oracles import central_gradient
from robust_wgf.errors import FactorizationError, ShapeError
from robust_wgf.gradients import GaussianLikelihood
from robust_wgf.surrogate import (
    JITTER_START,
    gp_fit,
    gp_mean_gradient,
    heuristic_hyperparameters,
    potential,
)


def test_potential_hand_values():
    lik = GaussianLikelihood([1.0], [[0.25]])
    assert potential(lik, [1.0]) == 0.0
    assert potential(lik, [0.0]) == pytest.approx(2.0, abs=1e-14)
    assert potential(lik, [2.0]) == pytest.approx(potential(lik, [0.0]), abs=1e-14)


def test_potential_batch(rng):
    lik = GaussianLikelihood.diagonal(rng.normal(size=3), [0.3, 1.0, 2.0])
    m = rng.normal(size=(6, 3))
    v = potential(lik, m)
    assert v.shape == (6,) and np.all(v >= 0)


def test_single_point_noiseless_interpolates():
    s = gp_fit([[0.3, 0.1]], [2.5], (1.7, 0.8, 0.0))
    assert s.mean([[0.3, 0.1]])[0] == pytest.approx(2.5, rel=1e-8)


def test_single_point_with_noise():
    lam, sig, v = 1.7, 0.4, 2.5
    s = gp_fit([[0.3]], [v], (lam, 0.8, sig))
    # jitter is added to the diagonal alongside sigma^2
    expected = lam * v / (lam + sig**2 + s.jitter)
    assert s.mean([[0.3]])[0] == pytest.approx(expected, rel=1e-12)
    assert s.mean([[0.3]])[0] == pytest.approx(lam * v / (lam + sig**2), rel=1e-9)


def test_far_points_revert_to_zero(rng):
    x = rng.normal(size=(10, 2))
    s = gp_fit(x, rng.normal(size=10))
    assert abs(s.mean([[1e3, 1e3]])[0]) < 1e-12


def test_gradient_zero_cases():
    s = gp_fit([[0.5, -0.5]], [3.0], (1.0, 0.7, 0.0))
    np.testing.assert_allclose(gp_mean_gradient(s, [[0.5, -0.5]]), 0.0, atol=1e-15)
    s = gp_fit([[-1.0, 0.0], [1.0, 0.0]], [2.0, 2.0], (1.0, 0.9, 0.01))
    np.testing.assert_allclose(gp_mean_gradient(s, [[0.0, 0.0]]), 0.0, atol=1e-14)


def test_gradient_matches_finite_differences(rng):
    x = rng.normal(size=(40, 3))
    vals = np.sin(x).sum(1) + 0.5 * (x**2).sum(1)
    s = gp_fit(x, vals)
    pts = rng.normal(size=(30, 3))
    g = gp_mean_gradient(s, pts)
    step = 1e-5 * s.lengthscale
    for p, gp in zip(pts, g):
        fd = central_gradient(lambda z: s.mean(z[None])[0], p, step)
        assert np.linalg.norm(gp - fd) / np.linalg.norm(fd) < 1e-4


def test_variance_bounds(rng):
    x = rng.normal(size=(15, 2))
    s = gp_fit(x, rng.normal(size=15), (2.0, 1.0, 0.0))
    v = s.variance(rng.normal(size=(50, 2)) * 3)
    assert np.all(v >= 0) and np.all(v <= 2.0 * (1 + 1e-9))
    assert np.all(s.variance(x) <= 1e-8 * 2.0)


def test_duplicate_training_point_noiseless(rng):
    x = rng.normal(size=(8, 2))
    v = rng.normal(size=8)
    hyp = (1.5, 0.9, 0.0)
    a = gp_fit(x, v, hyp)
    b = gp_fit(np.vstack([x, x[:1]]), np.append(v, v[0]), hyp)
    pts = rng.normal(size=(20, 2))
    np.testing.assert_allclose(b.mean(pts), a.mean(pts), atol=1e-8)


def test_heuristic_hyperparameters(rng):
    x = rng.normal(size=(12, 2))
    v = rng.normal(size=12)
    lam, ell, sig = heuristic_hyperparameters(x, v)
    assert lam == pytest.approx(np.var(v))
    assert sig == pytest.approx(1e-2 * np.sqrt(lam))
    s = gp_fit(x, v)
    assert s.jitter >= JITTER_START * lam


def test_marginal_likelihood_policy_picks_grid_point(rng):
    x = rng.normal(size=(20, 1))
    v = np.sin(2 * x[:, 0])
    lam, ell, sig = heuristic_hyperparameters(x, v)
    s = gp_fit(x, v, "marginal_likelihood")
    assert any(np.isclose(s.lengthscale, f * ell) for f in (0.5, 1.0, 2.0))
    assert any(np.isclose(s.amplitude, f * lam) for f in (0.5, 1.0, 2.0))


def test_fit_errors():
    with pytest.raises(ValueError):
        gp_fit([[0.0], [1.0]], [0.0, np.inf])
    with pytest.raises(ShapeError):
        gp_fit([[0.0], [1.0]], [0.0])
    with pytest.raises(ValueError):
        gp_fit([[0.0]], [1.0], "bogus")


def test_jitter_escalates_then_gives_up(monkeypatch):
    import scipy.linalg

    from robust_wgf import surrogate

    seen = []

    def failing(a, lower=True):
        seen.append(a[0, 0] - 1.0)
        raise scipy.linalg.LinAlgError("not positive definite")

    monkeypatch.setattr(surrogate, "cho_factor", failing)
    with pytest.raises(FactorizationError):
        gp_fit([[0.0], [1.0]], [0.0, 1.0], (1.0, 1.0, 0.0))
    assert seen[0] == pytest.approx(1e-10, rel=1e-6)
    assert np.all(np.diff(seen) > 0) and seen[-1] <= 1e-4 * (1 + 1e-9)
