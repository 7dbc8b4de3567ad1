"""Direct density-ratio estimation between two particle sets.

The main estimator is relative unconstrained least-squares importance fitting
(RuLSIF). It models the relative ratio

    r(x) = p_nu(x) / (alpha p_nu(x) + (1 - alpha) p_de(x))

as a Gaussian-kernel expansion ``sum_c beta_c K(x, c)`` with centres taken from
the numerator sample. The coefficients solve the ridge system
``(H + lam I) beta = h`` in closed form, and ``lam`` is chosen by k-fold
cross-validation of the least-squares objective. A ratio of two kernel density
estimates is kept as a fallback for ablations.

Evaluated ratios are clipped to ``[g_min, g_max]`` because they multiply a step
size downstream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, solve
from scipy.spatial.distance import cdist

from .ensemble import KernelConfig, as_array, kde_log_density, median_bandwidth
from .errors import FactorizationError, ShapeError

RIDGE_GRID = (0.03, 0.1, 0.3, 1.0)


@dataclass(frozen=True)
class RatioSettings:
    alpha_mix: float = 0.1
    ridge_grid: tuple = RIDGE_GRID
    folds: int = 5
    max_centers: int = 200
    g_min: float = 1e-3
    g_max: float = 1e3
    bandwidth: float | None = None  # None: median heuristic on the pooled sample
    method: str = "rulsif"  # or "kde_ratio"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha_mix <= 1.0:
            raise ValueError(f"alpha_mix must lie in [0, 1], got {self.alpha_mix}")
        if not (0 < self.g_min <= self.g_max):
            raise ValueError("clip bounds need 0 < g_min <= g_max")
        if self.method not in ("rulsif", "kde_ratio"):
            raise ValueError(f"unknown ratio method {self.method!r}")


@dataclass(frozen=True)
class DensityRatioModel:
    centers: np.ndarray
    coefficients: np.ndarray
    bandwidth: float
    alpha_mix: float
    ridge: float
    g_min: float
    g_max: float
    method: str = "rulsif"
    # kde_ratio only
    numerator: np.ndarray | None = None
    denominator: np.ndarray | None = None
    denominator_bandwidth: float | None = None

    def raw(self, points) -> np.ndarray:
        x = as_array(points)
        if self.method == "kde_ratio":
            num = kde_log_density(x, self.numerator, KernelConfig(self.bandwidth, "normalized"))
            den = kde_log_density(x, self.denominator, KernelConfig(self.denominator_bandwidth, "normalized"))
            return np.exp(np.clip(num - den, -700.0, 700.0))
        return _design(x, self.centers, self.bandwidth) @ self.coefficients


def _design(x, centers, h):
    return np.exp(-cdist(x, centers, "sqeuclidean") / (2.0 * h))


def _canonical(x):
    # Row order by coordinates, so fold assignment ignores input order.
    return x[np.lexsort(x.T[::-1])]


def _solve(phi_nu, phi_de, alpha, lam):
    n_nu, n_de = phi_nu.shape[0], phi_de.shape[0]
    H = alpha * phi_nu.T @ phi_nu / n_nu + (1.0 - alpha) * phi_de.T @ phi_de / n_de
    hvec = phi_nu.mean(axis=0)
    H[np.diag_indices_from(H)] += lam
    return solve(H, hvec, assume_a="pos")


def _objective(beta, phi_nu, phi_de, alpha):
    g_nu = phi_nu @ beta
    g_de = phi_de @ beta
    return 0.5 * alpha * np.mean(g_nu**2) + 0.5 * (1.0 - alpha) * np.mean(g_de**2) - np.mean(g_nu)


def fit_density_ratio(numerator, denominator, settings: RatioSettings | None = None) -> DensityRatioModel:
    """Fit ``numerator / (alpha numerator + (1 - alpha) denominator)`` from samples."""
    settings = settings or RatioSettings()
    x_nu, x_de = as_array(numerator), as_array(denominator)
    if x_nu.shape[1] != x_de.shape[1]:
        raise ShapeError(f"numerator has d={x_nu.shape[1]} but denominator d={x_de.shape[1]}")
    if len(x_nu) == 0 or len(x_de) == 0:
        raise ShapeError("both samples must be non-empty")
    x_nu, x_de = _canonical(x_nu), _canonical(x_de)
    pooled = np.vstack([x_nu, x_de])
    h = settings.bandwidth if settings.bandwidth is not None else median_bandwidth(pooled)

    if settings.method == "kde_ratio":
        return DensityRatioModel(
            centers=x_nu[:0],
            coefficients=np.zeros(0),
            bandwidth=median_bandwidth(x_nu) if settings.bandwidth is None else h,
            alpha_mix=0.0,
            ridge=0.0,
            g_min=settings.g_min,
            g_max=settings.g_max,
            method="kde_ratio",
            numerator=x_nu,
            denominator=x_de,
            denominator_bandwidth=median_bandwidth(x_de) if settings.bandwidth is None else h,
        )

    if len(x_nu) > settings.max_centers:
        rng = np.random.default_rng(settings.seed)
        idx = np.sort(rng.choice(len(x_nu), settings.max_centers, replace=False))
        centers = x_nu[idx]
    else:
        centers = x_nu

    phi_nu = _design(x_nu, centers, h)
    phi_de = _design(x_de, centers, h)
    alpha = settings.alpha_mix

    k = min(settings.folds, len(x_nu), len(x_de))
    if k >= 2 and len(settings.ridge_grid) > 1:
        fold_nu = np.arange(len(x_nu)) % k
        fold_de = np.arange(len(x_de)) % k
        scores = []
        for lam in settings.ridge_grid:
            total = 0.0
            try:
                for f in range(k):
                    beta = _solve(phi_nu[fold_nu != f], phi_de[fold_de != f], alpha, lam)
                    total += _objective(beta, phi_nu[fold_nu == f], phi_de[fold_de == f], alpha)
            except LinAlgError:
                total = np.inf
            scores.append(total / k)
        order = np.argsort(scores, kind="stable")
        candidates = [settings.ridge_grid[i] for i in order]
    else:
        candidates = sorted(settings.ridge_grid, reverse=True)

    for lam in candidates + [max(settings.ridge_grid)]:
        try:
            beta = _solve(phi_nu, phi_de, alpha, lam)
            break
        except LinAlgError:
            continue
    else:
        raise FactorizationError("density-ratio system is singular for every ridge value")

    return DensityRatioModel(centers.copy(), beta, float(h), alpha, float(lam), settings.g_min, settings.g_max)


def evaluate_ratio(model: DensityRatioModel, points) -> np.ndarray:
    return np.clip(model.raw(points), model.g_min, model.g_max)
