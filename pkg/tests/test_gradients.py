import math

import numpy as np
import pytest

from oracles import central_gradient, fd_jacobian
from robust_wgf.errors import DegenerateEnsembleError, FactorizationError, ShapeError
from robust_wgf.gradients import GaussianLikelihood, ensemble_jacobian, log_likelihood, loglik_gradient
from robust_wgf.models import mass_spring_forward


def test_log_likelihood_hand_values():
    lik = GaussianLikelihood([1.5], [[1.0]])
    assert log_likelihood(lik, [1.5]) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-14)
    lik = GaussianLikelihood([1.0], [[0.25]])
    expected = -0.5 * math.log(2 * math.pi) - 0.5 * math.log(0.25) - 2.0
    assert log_likelihood(lik, [0.0]) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(-2.2258, abs=1e-4)


def test_log_likelihood_permutation_invariance(rng):
    y, s, m = rng.normal(size=4), rng.uniform(0.5, 2, 4), rng.normal(size=4)
    p = rng.permutation(4)
    a = log_likelihood(GaussianLikelihood(y, np.diag(s)), m)
    b = log_likelihood(GaussianLikelihood(y[p], np.diag(s[p])), m[p])
    assert a == pytest.approx(b, rel=1e-13)


def test_log_likelihood_batch_matches_rows(rng):
    lik = GaussianLikelihood.diagonal(rng.normal(size=3), [0.1, 0.5, 2.0])
    m = rng.normal(size=(7, 3))
    np.testing.assert_allclose(log_likelihood(lik, m), [log_likelihood(lik, r) for r in m], rtol=1e-13)


def test_covariance_checks():
    with pytest.raises(FactorizationError):
        GaussianLikelihood([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(FactorizationError):
        GaussianLikelihood([0.0, 0.0], [[1.0, 0.5], [0.4, 1.0]])
    with pytest.raises(ShapeError):
        GaussianLikelihood([0.0, 0.0], np.eye(3))


def test_jacobian_linear_1d():
    jac = ensemble_jacobian([[0.0], [1.0], [2.0]], [[0.0], [2.0], [4.0]])
    assert jac.expected_rank == 1
    np.testing.assert_allclose(jac.per_particle[:, 0, 0], 4.0 / 3.0, rtol=1e-14)


def test_jacobian_constant_model(rng):
    x = rng.normal(size=(10, 3))
    jac = ensemble_jacobian(x, np.full((10, 2), 7.0))
    np.testing.assert_array_equal(jac.per_particle, 0.0)
    assert jac.per_particle.shape == (10, 3, 2)


def test_jacobian_skips_duplicate_pair():
    jac = ensemble_jacobian([[0.0], [0.0], [1.0]], [[0.0], [0.0], [2.0]])
    assert jac.per_particle[0, 0, 0] == pytest.approx(2.0 / 3.0, rel=1e-14)


def test_jacobian_degenerate_particle_warns():
    with pytest.warns(RuntimeWarning):
        jac = ensemble_jacobian([[1.0], [1.0]], [[0.0], [1.0]])
    assert jac.degenerate.all()
    np.testing.assert_array_equal(jac.per_particle, 0.0)


def test_jacobian_needs_two_particles():
    with pytest.raises(DegenerateEnsembleError):
        ensemble_jacobian([[1.0]], [[1.0]])


def test_jacobian_permutation_equivariance(rng):
    x = rng.normal(size=(15, 2))
    y = np.column_stack([np.sin(x[:, 0]), x[:, 0] * x[:, 1], x[:, 1] ** 2])
    p = rng.permutation(15)
    np.testing.assert_allclose(
        ensemble_jacobian(x[p], y[p]).per_particle, ensemble_jacobian(x, y).per_particle[p], rtol=1e-12, atol=1e-14
    )


def test_jacobian_near_duplicates_stay_accurate():
    # Pairs at 1e-9 separation must not lose precision.
    x = np.array([[0.0], [1e-9], [1.0]])
    jac = ensemble_jacobian(x, 3.0 * x)
    np.testing.assert_allclose(jac.per_particle[:, 0, 0], 2.0, rtol=1e-6)


def test_gradient_zero_residual():
    lik = GaussianLikelihood([1.0, 2.0], np.eye(2))
    out = np.tile([1.0, 2.0], (4, 1))
    g = loglik_gradient(lik, np.ones((4, 3, 2)), out)
    np.testing.assert_array_equal(g, 0.0)


def test_gradient_scalar_hand_value():
    lik = GaussianLikelihood([0.5], [[1.0]])
    j = np.ones((1, 1, 1))
    assert loglik_gradient(lik, j, [[0.0]])[0, 0] == pytest.approx(0.5)
    assert loglik_gradient(lik, j, [[0.0]], half_gradient=True)[0, 0] == pytest.approx(0.25)


def test_gradient_mass_spring_analytic_jacobian(rng):
    lik = GaussianLikelihood.diagonal([1.1], math.sqrt(0.1))
    for theta in rng.uniform(0.3, 2.0, 10):
        out = np.array([[mass_spring_forward(theta)]])
        jac = np.array([[[0.5 / math.sqrt(theta)]]])
        g = loglik_gradient(lik, jac, out)[0, 0]
        fd = central_gradient(lambda t: log_likelihood(lik, [mass_spring_forward(t[0])]), [theta], 1e-6)[0]
        assert abs(g - fd) / abs(fd) < 1e-5


def test_gradient_vector_model_analytic_jacobian(rng):
    def f(t):
        return np.array([np.sin(t[0]) * t[1], t[0] ** 2 + np.exp(0.3 * t[1]), t[1] ** 3])

    lik = GaussianLikelihood(rng.normal(size=3), np.array([[0.5, 0.1, 0.0], [0.1, 0.8, 0.2], [0.0, 0.2, 1.1]]))
    for t in rng.normal(size=(5, 2)):
        J = fd_jacobian(f, t, 1e-7)  # n_obs x D
        g = loglik_gradient(lik, J.T[None], f(t)[None])[0]
        exact = np.array(
            [
                [np.cos(t[0]) * t[1], np.sin(t[0])],
                [2 * t[0], 0.3 * np.exp(0.3 * t[1])],
                [0.0, 3 * t[1] ** 2],
            ]
        )
        expected = exact.T @ lik.whiten(lik.residuals(f(t)))
        fd = central_gradient(lambda s: log_likelihood(lik, f(s)), t, 1e-6)
        assert np.linalg.norm(expected - fd) / np.linalg.norm(fd) < 1e-5
        g_exact = loglik_gradient(lik, exact.T[None], f(t)[None])[0]
        np.testing.assert_allclose(g_exact, expected, rtol=1e-12)
        np.testing.assert_allclose(g, expected, rtol=1e-5, atol=1e-8)


def test_linear_model_consistency():
    A = np.array([[1.0, -2.0, 0.5], [0.3, 0.0, 1.5]])
    errs = []
    for seed in range(3):
        x = np.random.default_rng(seed).standard_normal((1000, 3))
        jac = ensemble_jacobian(x, x @ A.T)
        errs.append(np.linalg.norm(jac.per_particle.mean(0) - A.T) / np.linalg.norm(A))
    assert np.mean(errs) < 0.05
