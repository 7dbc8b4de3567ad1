"""Particle ensembles and Gaussian-kernel density/score estimates.

An ensemble is an ``(n, d)`` array of equally weighted particles. The score
``grad log rho`` of the smoothed empirical measure is

    sum_i grad K(x, x_i) / sum_i K(x, x_i)

with ``K(a, b) = exp(-|a - b|^2 / (2 h))``. Normalisation constants cancel in
that ratio, so the score path always uses the unnormalised kernel and works in
log space.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist, pdist
from scipy.special import logsumexp

from .errors import DegenerateEnsembleError, FarFieldError, ShapeError

# Kernel exponents below this are treated as underflow.
LOG_FLOOR = -700.0


class Role(str, Enum):
    PRIOR = "prior"
    POSTERIOR_APPROX = "posterior_approx"
    NOMINAL = "nominal"


@dataclass(frozen=True, eq=False)
class ParticleEnsemble:
    """Immutable snapshot of ``n`` equally weighted particles in ``d`` dimensions."""

    particles: np.ndarray
    role: Role = Role.POSTERIOR_APPROX

    def __post_init__(self):
        arr = np.array(self.particles, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"particles must be a non-empty (n, d) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("particle coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "particles", arr)
        object.__setattr__(self, "role", Role(self.role))

    @property
    def n(self) -> int:
        return self.particles.shape[0]

    @property
    def d(self) -> int:
        return self.particles.shape[1]

    def with_particles(self, particles, role=None) -> "ParticleEnsemble":
        return ParticleEnsemble(particles, self.role if role is None else role)

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.particles, dtype=dtype)


def as_array(x) -> np.ndarray:
    """Return particle coordinates as a float ``(n, d)`` array."""
    if isinstance(x, ParticleEnsemble):
        return x.particles
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D array of points, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class KernelConfig:
    """Gaussian kernel with variance-like bandwidth ``h``."""

    h: float
    normalization: str = field(default="unnormalized")

    def __post_init__(self):
        if not (np.isfinite(self.h) and self.h > 0):
            raise ValueError(f"bandwidth must be positive and finite, got {self.h}")
        if self.normalization not in ("unnormalized", "normalized"):
            raise ValueError(f"unknown normalization {self.normalization!r}")

    def normalized(self) -> "KernelConfig":
        return KernelConfig(self.h, "normalized")


def median_bandwidth(ensemble) -> float:
    """Median heuristic ``h = med^2 / ln(n)`` over distinct particle pairs."""
    x = as_array(ensemble)
    n = x.shape[0]
    if n < 2:
        raise DegenerateEnsembleError(f"median bandwidth needs at least 2 particles, got {n}")
    med = float(np.median(pdist(x)))
    if med <= 0.0:
        raise DegenerateEnsembleError("median pairwise distance is zero (duplicated particles)")
    return med**2 / np.log(n)


def gaussian_kernel(a, b, cfg: KernelConfig) -> float:
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ShapeError(f"kernel arguments differ in dimension: {a.shape} vs {b.shape}")
    value = np.exp(-np.sum((a - b) ** 2) / (2.0 * cfg.h))
    if cfg.normalization == "normalized":
        value *= (2.0 * np.pi * cfg.h) ** (-a.size / 2.0)
    return float(value)


def _log_kernel_matrix(eval_points, samples, h):
    x = as_array(eval_points)
    s = as_array(samples)
    if x.shape[1] != s.shape[1]:
        raise ShapeError(f"dimension mismatch: eval points have d={x.shape[1]}, samples d={s.shape[1]}")
    return x, s, -cdist(x, s, "sqeuclidean") / (2.0 * h)


def kde_score(eval_points, samples, cfg: KernelConfig) -> np.ndarray:
    """Gradient of the log kernel density estimate at each evaluation point.

    Returns an ``(m, d)`` array. Raises :class:`FarFieldError` when every kernel
    weight at some point falls below ``exp(LOG_FLOOR)``.
    """
    x, s, logk = _log_kernel_matrix(eval_points, samples, cfg.h)
    top = logk.max(axis=1)
    bad = np.flatnonzero(top < LOG_FLOOR)
    if bad.size:
        p = x[bad[0]]
        raise FarFieldError(f"all kernel weights underflow at evaluation point {p.tolist()}", point=p)
    w = np.exp(logk - top[:, None])
    w /= w.sum(axis=1, keepdims=True)
    return (w @ s - x) / cfg.h


def kde_log_density(eval_points, samples, cfg: KernelConfig) -> np.ndarray:
    """Log of the normalised kernel density estimate; floored at ``LOG_FLOOR``."""
    x, s, logk = _log_kernel_matrix(eval_points, samples, cfg.h)
    d = x.shape[1]
    top = logk.max(axis=1)
    out = logsumexp(logk, axis=1) - np.log(s.shape[0]) - 0.5 * d * np.log(2.0 * np.pi * cfg.h)
    out[top < LOG_FLOOR] = LOG_FLOOR
    return out


def sample_gaussian(mean, cov, n: int, rng: np.random.Generator, role=Role.NOMINAL) -> ParticleEnsemble:
    """Draw ``n`` particles from a multivariate normal."""
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if cov.shape != (mean.size, mean.size):
        raise ShapeError(f"covariance shape {cov.shape} does not match mean of length {mean.size}")
    chol = np.linalg.cholesky(cov)
    z = rng.standard_normal((n, mean.size))
    return ParticleEnsemble(mean + z @ chol.T, role)
