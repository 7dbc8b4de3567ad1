"""Gaussian likelihood and the ensemble estimate of its gradient.

The ensemble Jacobian uses only one model run per particle: for particle ``r``

    J(r) = (P / N) * sum_{s != r} (theta_r - theta_s) (PM_r - PM_s)^T / |theta_r - theta_s|^2

with expected rank ``P = min(N - 1, D)``. Matrices are stored ``D x n_obs`` so
that ``grad log p(y | theta_r) = J(r) @ Sigma^{-1} (y_obs - PM_r)``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.spatial.distance import cdist

from .ensemble import as_array
from .errors import DegenerateEnsembleError, FactorizationError, ShapeError

# Pairs closer than this (squared distance) are left out of the Jacobian sum.
PAIR_FLOOR = 1e-24
_CHUNK_ELEMS = 4_000_000


@dataclass(frozen=True)
class GaussianLikelihood:
    y_obs: np.ndarray
    sigma: np.ndarray
    _chol: tuple = field(init=False, repr=False, compare=False)
    _logdet: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y_obs, dtype=float))
        s = np.asarray(self.sigma, dtype=float)
        if s.ndim == 0:
            s = s * np.eye(y.size)
        elif s.ndim == 1:
            s = np.diag(s)
        if s.shape != (y.size, y.size):
            raise ShapeError(f"covariance shape {s.shape} does not match {y.size} observations")
        if not np.allclose(s, s.T, rtol=1e-12, atol=0.0):
            raise FactorizationError("observation covariance is not symmetric")
        try:
            chol = cho_factor(s, lower=True)
        except LinAlgError as exc:
            raise FactorizationError(f"observation covariance is not positive definite: {exc}") from None
        object.__setattr__(self, "y_obs", y)
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "_chol", chol)
        object.__setattr__(self, "_logdet", 2.0 * float(np.sum(np.log(np.diag(chol[0])))))

    @classmethod
    def diagonal(cls, y_obs, std):
        std = np.broadcast_to(np.asarray(std, dtype=float), np.shape(np.atleast_1d(y_obs)))
        return cls(y_obs, np.diag(std**2))

    @property
    def n_obs(self) -> int:
        return self.y_obs.size

    def residuals(self, y_model) -> np.ndarray:
        y_model = np.asarray(y_model, dtype=float)
        if y_model.shape[-1] != self.n_obs:
            raise ShapeError(f"model output has {y_model.shape[-1]} entries, expected {self.n_obs}")
        return self.y_obs - y_model

    def whiten(self, r) -> np.ndarray:
        """``Sigma^{-1} r`` for a vector or for each row of a matrix."""
        r = np.asarray(r, dtype=float)
        if r.ndim == 1:
            return cho_solve(self._chol, r)
        return cho_solve(self._chol, r.T).T

    def log_normalizer(self) -> float:
        return -0.5 * self.n_obs * np.log(2.0 * np.pi) - 0.5 * self._logdet


def log_likelihood(lik: GaussianLikelihood, y_model) -> float | np.ndarray:
    """Gaussian log-likelihood; ``y_model`` may be one output vector or an ``(N, n_obs)`` batch."""
    r = lik.residuals(y_model)
    quad = np.sum(r * lik.whiten(r), axis=-1)
    return lik.log_normalizer() - 0.5 * quad


@dataclass(frozen=True)
class JacobianEstimate:
    per_particle: np.ndarray  # (N, D, n_obs)
    expected_rank: int
    degenerate: np.ndarray  # (N,) bool, True where no valid pair existed


def ensemble_jacobian(particles, outputs) -> JacobianEstimate:
    theta = as_array(particles)
    out = np.asarray(outputs, dtype=float)
    if out.ndim == 1:
        out = out[:, None]
    n, d = theta.shape
    if out.shape[0] != n:
        raise ShapeError(f"{out.shape[0]} model outputs for {n} particles")
    if n < 2:
        raise DegenerateEnsembleError("ensemble Jacobian needs at least two particles")
    rank = min(n - 1, d)

    sq = cdist(theta, theta, "sqeuclidean")
    valid = sq >= PAIR_FLOOR
    np.fill_diagonal(valid, False)
    w = np.zeros_like(sq)
    w[valid] = 1.0 / sq[valid]

    acc = np.empty((n, d, out.shape[1]))
    step = max(1, _CHUNK_ELEMS // (n * (d + out.shape[1])))
    for lo in range(0, n, step):
        hi = min(lo + step, n)
        dt = theta[lo:hi, None, :] - theta[None, :, :]
        dy = out[lo:hi, None, :] - out[None, :, :]
        acc[lo:hi] = np.einsum("rs,rsd,rso->rdo", w[lo:hi], dt, dy)
    jac = (rank / n) * acc

    degenerate = ~valid.any(axis=1)
    if degenerate.any():
        jac[degenerate] = 0.0
        warnings.warn(
            f"{int(degenerate.sum())} particle(s) have no non-degenerate partner; Jacobian set to zero",
            RuntimeWarning,
            stacklevel=2,
        )
    return JacobianEstimate(jac, rank, degenerate)


def loglik_gradient(lik: GaussianLikelihood, jac, outputs, half_gradient: bool = False) -> np.ndarray:
    """Per-particle ``grad log p(y_obs | theta)`` as an ``(N, D)`` array.

    ``jac`` is a :class:`JacobianEstimate` or an ``(N, D, n_obs)`` array.
    ``half_gradient=True`` scales the result by 1/2. That is not the gradient
    of the Gaussian log-likelihood; it exists for reproducing runs that used
    the halved form.
    """
    j = jac.per_particle if isinstance(jac, JacobianEstimate) else np.asarray(jac, dtype=float)
    out = np.asarray(outputs, dtype=float)
    if out.ndim == 1:
        out = out[:, None]
    if j.ndim != 3 or j.shape[0] != out.shape[0] or j.shape[2] != out.shape[1]:
        raise ShapeError(f"Jacobian shape {j.shape} inconsistent with outputs {out.shape}")
    weighted = lik.whiten(lik.residuals(out))
    grad = np.einsum("rdo,ro->rd", j, weighted)
    return 0.5 * grad if half_gradient else grad
