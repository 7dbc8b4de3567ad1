"""Exact 2-Wasserstein distance between equal-size uniform empirical measures.

Between two clouds of ``n`` equally weighted points the optimal coupling is a
permutation, so the distance reduces to a linear assignment problem on the
squared-Euclidean cost matrix. Distances are reported as ``W2`` (not ``W2**2``)
because ambiguity radii are compared against ``W2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .ensemble import ParticleEnsemble, as_array
from .errors import ShapeError


@dataclass(frozen=True)
class TransportPlan:
    """Optimal assignment ``source i -> target assignment[i]`` and its mean squared cost."""

    assignment: np.ndarray
    cost: float


@dataclass(frozen=True)
class AmbiguitySet:
    """All ensembles within ``radius`` (in W2) of a nominal ensemble."""

    nominal: ParticleEnsemble
    radius: float

    def __post_init__(self):
        if not isinstance(self.nominal, ParticleEnsemble):
            object.__setattr__(self, "nominal", ParticleEnsemble(self.nominal, "nominal"))
        if not (self.radius >= 0 and np.isfinite(self.radius)):
            raise ValueError(f"ambiguity radius must be finite and >= 0, got {self.radius}")


def w2_distance(a, b) -> tuple[float, TransportPlan]:
    xa, xb = as_array(a), as_array(b)
    if xa.shape != xb.shape:
        raise ShapeError(f"W2 needs equal-size ensembles of equal dimension, got {xa.shape} and {xb.shape}")
    cost = cdist(xa, xb, "sqeuclidean")
    rows, cols = linear_sum_assignment(cost)
    assignment = np.empty(len(rows), dtype=int)
    assignment[rows] = cols
    mean_cost = float(cost[rows, cols].sum() / len(rows))
    # Guard against tiny negative round-off from cdist.
    mean_cost = max(mean_cost, 0.0)
    return float(np.sqrt(mean_cost)), TransportPlan(assignment, mean_cost)


def within_ambiguity(ambiguity: AmbiguitySet, candidate) -> tuple[bool, float]:
    """Membership test; the boundary ``distance == radius`` counts as inside."""
    dist, _ = w2_distance(ambiguity.nominal, candidate)
    return dist <= ambiguity.radius, dist
