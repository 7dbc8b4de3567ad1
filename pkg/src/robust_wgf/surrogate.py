"""Gaussian-process surrogate of the data-misfit potential.

The potential ``V(theta) = 0.5 r^T Sigma^{-1} r`` with ``r = y_obs - PM(theta)``
carries all the theta dependence of the Gaussian log-likelihood, so
``grad log p(y | theta) = -grad V(theta)``. A zero-mean GP with RBF kernel

    k(a, b) = lam * exp(-|a - b|^2 / (2 l^2))

is fitted to potentials at the current particles and its posterior-mean
gradient is used wherever the forward model is too expensive to difference.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.spatial.distance import cdist, pdist

from .ensemble import as_array
from .errors import FactorizationError, ShapeError
from .gradients import GaussianLikelihood

JITTER_START = 1e-10
JITTER_MAX = 1e-4


def potential(lik: GaussianLikelihood, y_model) -> float | np.ndarray:
    """Quadratic misfit ``0.5 r^T Sigma^{-1} r``; vectorised over rows."""
    r = lik.residuals(y_model)
    return 0.5 * np.sum(r * lik.whiten(r), axis=-1)


@dataclass(frozen=True)
class GpSurrogate:
    inputs: np.ndarray
    values: np.ndarray
    amplitude: float
    lengthscale: float
    noise: float
    jitter: float
    chol: tuple
    weights: np.ndarray  # K^{-1} V

    def kernel(self, a, b) -> np.ndarray:
        return self.amplitude * np.exp(-cdist(a, b, "sqeuclidean") / (2.0 * self.lengthscale**2))

    def mean(self, points) -> np.ndarray:
        x = _check_points(points, self.inputs.shape[1])
        return self.kernel(x, self.inputs) @ self.weights

    def variance(self, points) -> np.ndarray:
        x = _check_points(points, self.inputs.shape[1])
        kx = self.kernel(x, self.inputs)
        v = cho_solve(self.chol, kx.T)
        return np.maximum(self.amplitude - np.sum(kx * v.T, axis=1), 0.0)


def _check_points(points, d):
    x = as_array(points)
    if x.shape[1] != d:
        raise ShapeError(f"points have dimension {x.shape[1]}, surrogate was fitted in {d}")
    return x


def heuristic_hyperparameters(inputs, values) -> tuple[float, float, float]:
    """Median-distance lengthscale, sample-variance amplitude, 1% noise std."""
    x = as_array(inputs)
    if x.shape[0] >= 2:
        dists = pdist(x)
        med = float(np.median(dists))
        if med <= 0.0:
            med = float(dists.max()) if dists.max() > 0 else 1.0
    else:
        med = 1.0
    lam = max(float(np.var(values)), 1e-12) if len(values) > 1 else max(float(np.mean(np.square(values))), 1e-12)
    return lam, med, 1e-2 * np.sqrt(lam)


def _factorize(x, values, lam, ell, sigma):
    gram = lam * np.exp(-cdist(x, x, "sqeuclidean") / (2.0 * ell**2))
    gram[np.diag_indices_from(gram)] += sigma**2
    jitter = JITTER_START * lam
    while True:
        try:
            a = gram.copy()
            a[np.diag_indices_from(a)] += jitter
            chol = cho_factor(a, lower=True)
            break
        except LinAlgError:
            jitter *= 2.0
            if jitter > JITTER_MAX * lam:
                raise FactorizationError("GP gram matrix is not positive definite even with maximal jitter") from None
    return chol, jitter, cho_solve(chol, values)


def _log_marginal(values, chol, weights):
    return -0.5 * values @ weights - np.sum(np.log(np.diag(chol[0]))) - 0.5 * len(values) * np.log(2 * np.pi)


def gp_fit(inputs, values, hyper_policy="heuristic") -> GpSurrogate:
    """Fit a zero-mean RBF GP to ``values`` observed at ``inputs``.

    ``hyper_policy`` is ``"heuristic"``, ``"marginal_likelihood"`` (coordinate
    grid search over 0.5/1/2 times the heuristic values), or an explicit
    ``(amplitude, lengthscale, noise)`` triple.
    """
    x = as_array(inputs)
    v = np.asarray(values, dtype=float).ravel()
    if x.shape[0] < 1 or v.size != x.shape[0]:
        raise ShapeError(f"{v.size} values for {x.shape[0]} training inputs")
    if not np.all(np.isfinite(v)):
        raise ValueError("GP training values must be finite")

    if isinstance(hyper_policy, str):
        lam, ell, sigma = heuristic_hyperparameters(x, v)
        if hyper_policy == "marginal_likelihood":
            best = None
            for a, b, c in product((0.5, 1.0, 2.0), repeat=3):
                try:
                    chol, _, w = _factorize(x, v, a * lam, b * ell, c * sigma)
                except FactorizationError:
                    continue
                lml = _log_marginal(v, chol, w)
                if best is None or lml > best[0]:
                    best = (lml, a * lam, b * ell, c * sigma)
            if best is None:
                raise FactorizationError("no hyperparameter candidate gave a factorizable gram matrix")
            _, lam, ell, sigma = best
        elif hyper_policy != "heuristic":
            raise ValueError(f"unknown hyperparameter policy {hyper_policy!r}")
    else:
        lam, ell, sigma = (float(t) for t in hyper_policy)
        if not (lam > 0 and ell > 0 and sigma >= 0):
            raise ValueError("need amplitude > 0, lengthscale > 0, noise >= 0")

    chol, jitter, weights = _factorize(x, v, lam, ell, sigma)
    x = x.copy()
    x.setflags(write=False)
    return GpSurrogate(x, v.copy(), float(lam), float(ell), float(sigma), jitter, chol, weights)


def gp_mean_gradient(s: GpSurrogate, eval_points) -> np.ndarray:
    """Gradient of the posterior mean, one row per evaluation point."""
    x = _check_points(eval_points, s.inputs.shape[1])
    kx = s.kernel(x, s.inputs)  # (m, M)
    coef = kx * s.weights[None, :]
    # d k(x, X_j) / dx = -(x - X_j) / l^2 * k(x, X_j)
    diff = x[:, None, :] - s.inputs[None, :, :]
    return -np.einsum("mj,mjd->md", coef, diff) / s.lengthscale**2
