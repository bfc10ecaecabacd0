"""The hybrid transform: permutation-smoothed transport estimates, the
three-part hybrid distance, and its barycenter.

A dataset is represented by the triple (mean, covariance, shape) where the
shape block stores the estimated transport map from the standardized data to
the reference, evaluated at the m anchors shared by every transform built
against one reference.  Because the anchors (and the reference density at
them) are shared, the weighted tangent-space distance between two transforms
reduces to the mean squared difference of their shape blocks.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidParam, ReferenceMismatch, SubsampleError
from .gaussian import (
    GaussianSummary,
    _check_weights,
    bures_barycenter,
    bures_sq,
    spd_sqrt,
)
from .reference import ReferenceMeasure, StandardizedDataset, standardize
from .rng import as_rng
from .transport import Dataset, hungarian


@dataclass(frozen=True)
class TransportEstimate:
    """Permutation-smoothing output for one standardized dataset.

    ``anchors_from`` is the m-point subsample, ``matched_to[i]`` the anchor
    assigned to subsample point i, and ``evaluated_at_anchors[s]`` the map
    value at anchor s under the nearest-neighbor extension over the
    subsample's Voronoi cells.
    """

    anchors_from: np.ndarray
    matched_to: np.ndarray
    evaluated_at_anchors: np.ndarray
    perm: np.ndarray
    knn: int = 1


def _knn_extend(subsample, matched_to, points, knn):
    """Evaluate the estimated map at ``points`` by k-nearest-neighbor
    averaging over the subsample; ties go to the lowest subsample index."""
    d2 = cdist(points, subsample, "sqeuclidean")
    if knn == 1:
        return matched_to[np.argmin(d2, axis=1)]
    idx = np.argsort(d2, axis=1, kind="stable")[:, :knn]
    return matched_to[idx].mean(axis=1)


def estimate_transport(xtilde, ref, m, seed, knn=1):
    """Estimate the transport map from a standardized dataset to the reference.

    Subsamples ``m`` points without replacement (seeded), solves the m-by-m
    assignment onto the reference anchors by minimum total squared distance,
    and extends the matching by nearest neighbor to evaluate at the shared
    anchors.
    """
    pts = xtilde.points if isinstance(xtilde, StandardizedDataset) else np.asarray(xtilde)
    n = pts.shape[0]
    if m > n:
        raise SubsampleError(f"subsample size {m} exceeds dataset size {n}")
    if m != ref.m:
        raise ReferenceMismatch(f"reference carries {ref.m} anchors, requested m={m}")
    if knn < 1:
        raise InvalidParam(f"neighbor count must be >= 1, got {knn}")
    rng = as_rng(seed)
    idx = rng.choice(n, size=m, replace=False)
    sub = pts[idx]
    assign = hungarian(cdist(sub, ref.anchors, "sqeuclidean"))
    matched = ref.anchors[assign.perm]
    evaluated = _knn_extend(sub, matched, ref.anchors, knn)
    return TransportEstimate(
        anchors_from=sub,
        matched_to=matched,
        evaluated_at_anchors=evaluated,
        perm=assign.perm,
        knn=knn,
    )


def empirical_transport_cost(est, xtilde):
    """Mean squared displacement ``(1/n) sum_i ||x_i - That(x_i)||^2`` of the
    estimated map over all standardized points."""
    pts = xtilde.points if isinstance(xtilde, StandardizedDataset) else np.asarray(xtilde)
    values = _knn_extend(est.anchors_from, est.matched_to, pts, est.knn)
    return float(np.mean(np.sum((pts - values) ** 2, axis=1)))


@dataclass(frozen=True)
class HybridTransform:
    """Triple (mean, cov, shape) carrying one distribution, bound to a
    reference by ``ref_id``.

    ``shape`` holds the map values at the shared anchors; ``inv_shape`` holds
    the inverse map at the anchors (exact via the inverse permutation), kept
    so barycenters can be materialized back into sample points.
    """

    mean: np.ndarray
    cov: np.ndarray
    shape: np.ndarray
    inv_shape: np.ndarray
    ref_id: str

    @property
    def dim(self):
        return self.mean.shape[0]

    @property
    def m(self):
        return self.shape.shape[0]

    def gaussian_summary(self):
        return GaussianSummary(self.mean, self.cov)


@dataclass(frozen=True)
class HybridDistanceBreakdown:
    """Location/scale/shape decomposition; ``total_sq`` is their exact sum."""

    location_sq: float
    scale_sq: float
    shape_sq: float

    @property
    def total_sq(self):
        return self.location_sq + self.scale_sq + self.shape_sq


def identity_shape_transform(standardized, ref):
    """Transform with the shape block set to the anchors themselves (the
    map is the identity at every anchor, i.e. a zero tangent vector)."""
    return HybridTransform(
        mean=standardized.source_mean,
        cov=standardized.source_cov,
        shape=ref.anchors.copy(),
        inv_shape=ref.anchors.copy(),
        ref_id=ref.ref_id,
    )


def hybrid_transform(X, ref, m, seed, knn=1):
    """Full transform of a dataset: raw sample moments plus the estimated
    transport map of the standardized points, evaluated at the anchors."""
    std = X if isinstance(X, StandardizedDataset) else standardize(X)
    est = estimate_transport(std, ref, m, seed, knn=knn)
    inverse_perm = np.empty(m, dtype=int)
    inverse_perm[est.perm] = np.arange(m)
    return HybridTransform(
        mean=std.source_mean,
        cov=std.source_cov,
        shape=est.evaluated_at_anchors,
        inv_shape=est.anchors_from[inverse_perm],
        ref_id=ref.ref_id,
    )


def _check_compatible(a, b):
    if a.ref_id != b.ref_id:
        raise ReferenceMismatch(
            f"transforms bound to different references ({a.ref_id} vs {b.ref_id})"
        )
    if a.m != b.m:
        raise ReferenceMismatch(f"anchor counts differ: {a.m} vs {b.m}")


def hybrid_distance_sq(a, b):
    """Squared hybrid distance with its location/scale/shape breakdown:
    ``||mu_a - mu_b||^2 + B^2(cov_a, cov_b) + (1/m) sum_s ||Ta(U_s) - Tb(U_s)||^2``.
    """
    _check_compatible(a, b)
    return HybridDistanceBreakdown(
        location_sq=float(np.sum((a.mean - b.mean) ** 2)),
        scale_sq=bures_sq(a.cov, b.cov),
        shape_sq=float(np.mean(np.sum((a.shape - b.shape) ** 2, axis=1))),
    )


def hybrid_barycenter(transforms, weights=None):
    """Barycenter of transforms sharing one reference: means average, the
    covariance solves the Bures fixed point, and the shape blocks average
    row-wise (valid because all transforms share anchors and density
    weights)."""
    if not transforms:
        raise InvalidParam("need at least one transform")
    first = transforms[0]
    for t in transforms[1:]:
        _check_compatible(first, t)
    if weights is None:
        weights = np.full(len(transforms), 1.0 / len(transforms))
    w = _check_weights(weights, len(transforms))
    mean = np.einsum("j,jd->d", w, np.array([t.mean for t in transforms]))
    cov = bures_barycenter([t.cov for t in transforms], w)
    shape = np.einsum("j,jmd->md", w, np.array([t.shape for t in transforms]))
    inv_shape = np.einsum("j,jmd->md", w, np.array([t.inv_shape for t in transforms]))
    return HybridTransform(
        mean=mean, cov=cov, shape=shape, inv_shape=inv_shape, ref_id=first.ref_id
    )


def materialize_barycenter(bary, ref):
    """Emit m sample points for a (barycenter) transform.

    Uses the averaged inverse map at the anchors: each anchor U_s is pulled
    back through the stored ``inv_shape`` row, then relocated by the
    transform's moments, ``mu + cov^{1/2} Tbar^{-1}(U_s)``.
    """
    if bary.ref_id != ref.ref_id:
        raise ReferenceMismatch("transform is not bound to this reference")
    root = spd_sqrt(bary.cov)
    return Dataset(points=bary.mean + bary.inv_shape @ root, id="barycenter")


def pairwise_hybrid_sq(transforms):
    """Dense matrix of squared hybrid distances.

    Vectorizes the location and shape terms; the scale term loops over pairs
    with per-covariance square roots precomputed.  Entries are bitwise equal
    to ``hybrid_distance_sq`` called pairwise.
    """
    n = len(transforms)
    for t in transforms[1:]:
        _check_compatible(transforms[0], t)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = hybrid_distance_sq(
                transforms[i], transforms[j]
            ).total_sq
    return out
