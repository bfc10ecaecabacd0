"""Alternative hybridizations: marginal quantile distance, the transformed
Gaussian approximation with polynomial features, and the energy distance.
"""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import DimensionError, InsufficientData, InvalidParam
from .gaussian import GaussianSummary, bures_sq, gaussian_wasserstein_sq
from .reference import standardize
from .transport import as_points, empirical_quantiles, quantile_grid


@dataclass(frozen=True)
class MarginalProfile:
    """Per-coordinate empirical quantile curves on a shared uniform grid."""

    probs: np.ndarray
    per_coord_quantiles: np.ndarray  # (d, G)


def marginal_profile(points, grid_size=512):
    """Quantile curves of each coordinate at midpoint probabilities."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    probs = quantile_grid(0.0, grid_size)
    quantiles = np.stack([empirical_quantiles(pts[:, j], probs) for j in range(pts.shape[1])])
    return MarginalProfile(probs=probs, per_coord_quantiles=quantiles)


def _marginal_term(xp, yp, grid_size):
    probs = quantile_grid(0.0, grid_size)
    total = 0.0
    for j in range(xp.shape[1]):
        qx = empirical_quantiles(xp[:, j], probs)
        qy = empirical_quantiles(yp[:, j], probs)
        total += float(np.mean((qx - qy) ** 2))
    return total


def marginal_hybrid_sq(X, Y, grid_size=512, standardized=True):
    """Gaussian Wasserstein term on raw moments plus the sum of squared 1D
    quantile distances between the (by default standardized) coordinates.
    """
    xp, yp = as_points(X), as_points(Y)
    if xp.shape[1] != yp.shape[1]:
        raise DimensionError(f"dimensions differ: {xp.shape[1]} vs {yp.shape[1]}")
    gx = GaussianSummary.from_points(xp)
    gy = GaussianSummary.from_points(yp)
    gauss = gaussian_wasserstein_sq(gx, gy)
    if standardized:
        xp = standardize(xp).points
        yp = standardize(yp).points
    return gauss + _marginal_term(xp, yp, grid_size)


def monomial_exponents(dim, degree):
    """Index tuples of all monomials of degree 2..degree in ``dim`` variables,
    graded lexicographic (ascending degree, lexicographic within a degree)."""
    if degree < 1:
        raise InvalidParam(f"degree must be >= 1, got {degree}")
    combos = []
    for deg in range(2, degree + 1):
        combos.extend(itertools.combinations_with_replacement(range(dim), deg))
    return combos


def polynomial_features(points, degree):
    """Monomial features of degree 2..degree for each row; an (n, 0) array
    when degree == 1 (the identity map adds nothing beyond the moments)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    combos = monomial_exponents(pts.shape[1], degree)
    if not combos:
        return np.empty((pts.shape[0], 0))
    return np.column_stack([np.prod(pts[:, c], axis=1) for c in combos])


@dataclass(frozen=True)
class PolyMoments:
    """Mean and covariance of the polynomial features of standardized data."""

    degree: int
    summary: GaussianSummary


def poly_moments(points, degree):
    feats = polynomial_features(standardize(points).points, degree)
    return PolyMoments(degree=degree, summary=GaussianSummary.from_points(feats, ridge_rtol=1e-8))


def transformed_gaussian_sq(X, Y, degree=4):
    """Gaussian Wasserstein on raw moments plus the same on the moments of
    polynomial features of the standardized variables.

    Singular feature covariances (e.g. two-point data, whose even powers are
    constant) are ridge-regularized just as in standardization.  With
    degree 1 the feature block is empty and the added term is exactly zero.
    """
    xp, yp = as_points(X), as_points(Y)
    if xp.shape[1] != yp.shape[1]:
        raise DimensionError(f"dimensions differ: {xp.shape[1]} vs {yp.shape[1]}")
    base = gaussian_wasserstein_sq(
        GaussianSummary.from_points(xp), GaussianSummary.from_points(yp)
    )
    px = poly_moments(xp, degree)
    py = poly_moments(yp, degree)
    if px.summary.dim == 0:
        return base
    return base + gaussian_wasserstein_sq(px.summary, py.summary)


def energy_distance(X, Y):
    """Energy distance between two samples, the plug-in V-statistic

        ``2 mean ||X_i - Y_j|| - mean ||X_i - X_j|| - mean ||Y_i - Y_j||``

    with means over all ordered pairs (denominators nm, n^2, m^2).  This is
    the energy distance of the two empirical measures: exactly zero for
    identical samples and nonnegative always.
    """
    xp, yp = as_points(X), as_points(Y)
    n, m = xp.shape[0], yp.shape[0]
    if n < 2 or m < 2:
        raise InsufficientData("energy distance needs at least 2 points per sample")
    if xp.shape[1] != yp.shape[1]:
        raise DimensionError(f"dimensions differ: {xp.shape[1]} vs {yp.shape[1]}")
    cross = cdist(xp, yp).mean()
    within_x = 2.0 * pdist(xp).sum() / (n * n)
    within_y = 2.0 * pdist(yp).sum() / (m * m)
    return max(2.0 * cross - within_x - within_y, 0.0)
