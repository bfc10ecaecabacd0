"""Exact discrete optimal transport between equal-size samples.

Covers the assignment solver, the empirical squared Wasserstein distance,
and the one-dimensional quantile form (plain and trimmed).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .errors import DimensionError, InvalidCost, InvalidTrim, SizeError


@dataclass(frozen=True)
class Dataset:
    """One collection of observations: an (n, d) matrix plus a label."""

    points: np.ndarray
    id: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise SizeError(f"dataset {self.id!r} needs an (n, d) matrix, n >= 1")
        if not np.all(np.isfinite(pts)):
            raise InvalidCost(f"dataset {self.id!r} contains NaN or Inf")
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


def as_points(data):
    """Coerce a Dataset or array-like to an (n, d) float array."""
    pts = data.points if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


@dataclass(frozen=True)
class Assignment:
    """Optimal matching: ``perm[i]`` is the column assigned to row ``i``."""

    perm: np.ndarray
    total_cost: float

    def __post_init__(self):
        object.__setattr__(self, "perm", np.asarray(self.perm, dtype=int))


def hungarian(costs):
    """Minimum-cost assignment for a square cost matrix.

    Returns the permutation minimizing ``sum_i costs[i, perm[i]]`` together
    with that total cost.
    """
    costs = np.asarray(costs, dtype=float)
    if costs.ndim != 2 or costs.shape[0] != costs.shape[1]:
        raise DimensionError(f"cost matrix must be square, got {costs.shape}")
    if not np.all(np.isfinite(costs)):
        raise InvalidCost("cost matrix contains NaN or Inf")
    rows, cols = linear_sum_assignment(costs)
    perm = np.empty(costs.shape[0], dtype=int)
    perm[rows] = cols
    return Assignment(perm=perm, total_cost=float(costs[rows, cols].sum()))


def empirical_w2_sq(X, Y):
    """Squared Wasserstein distance between equal-size empirical samples:
    ``(1/n) min_pi sum_i ||X_i - Y_pi(i)||^2`` via the assignment solver.
    """
    xp, yp = as_points(X), as_points(Y)
    if xp.shape[0] != yp.shape[0]:
        raise SizeError(f"sample sizes differ: {xp.shape[0]} vs {yp.shape[0]}")
    if xp.shape[1] != yp.shape[1]:
        raise SizeError(f"dimensions differ: {xp.shape[1]} vs {yp.shape[1]}")
    result = hungarian(cdist(xp, yp, "sqeuclidean"))
    return result.total_cost / xp.shape[0]


def quantile_w2_sq_1d(x, y):
    """1D squared Wasserstein distance of equal-size samples via order
    statistics: ``(1/n) sum_i (x_(i) - y_(i))^2``.  Inputs may be unsorted.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape[0] != y.shape[0]:
        raise SizeError(f"sample sizes differ: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[0] < 1:
        raise SizeError("samples must be nonempty")
    return float(np.mean((np.sort(x, kind="stable") - np.sort(y, kind="stable")) ** 2))


def quantile_grid(delta, grid_size):
    """Midpoint probability grid covering (delta, 1 - delta)."""
    i = np.arange(1, grid_size + 1)
    return delta + (1.0 - 2.0 * delta) * (i - 0.5) / grid_size


def empirical_quantiles(x, probs):
    """Left-continuous empirical quantile function evaluated at ``probs``."""
    x = np.asarray(x, dtype=float).ravel()
    return np.quantile(x, probs, method="inverted_cdf")


def trimmed_w2_sq_1d(x, y, delta, grid_size=512):
    """Trimmed 1D squared Wasserstein distance on a uniform quantile grid.

    Approximates ``1/(1-2delta) * int_delta^{1-delta} (Fx^-1 - Fy^-1)^2 ds``
    with ``grid_size`` midpoint evaluations; the normalizing factor and the
    grid cell width cancel, leaving the mean squared quantile difference.
    Samples may have unequal sizes.
    """
    if not 0.0 <= delta < 0.5:
        raise InvalidTrim(f"delta must lie in [0, 0.5), got {delta}")
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size < 1 or y.size < 1:
        raise SizeError("samples must be nonempty")
    grid = quantile_grid(delta, grid_size)
    qx = empirical_quantiles(x, grid)
    qy = empirical_quantiles(y, grid)
    return float(np.mean((qx - qy) ** 2))
