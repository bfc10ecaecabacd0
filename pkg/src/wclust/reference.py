"""Standardization and the pooled kernel-density reference measure.

Every dataset is centered and whitened with its own sample moments; the
standardized points are pooled and smoothed with a product Gaussian kernel
(per-coordinate Silverman/Scott bandwidth) to form the reference measure.
Anchor points are exact draws from that KDE mixture: pick a pooled point
uniformly, add kernel noise.

All randomness comes from numpy's PCG64 generator
(``numpy.random.default_rng``); operations take an integer seed or a
``Generator`` and are reproducible bit-for-bit for a fixed numpy version.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InsufficientData, InvalidParam
from .gaussian import spd_inv_sqrt, spd_sqrt
from .rng import as_rng
from .transport import Dataset, as_points


@dataclass(frozen=True)
class StandardizedDataset:
    """Centered and whitened observations plus the moments that were removed."""

    points: np.ndarray
    source_mean: np.ndarray
    source_cov: np.ndarray
    source_cov_sqrt: np.ndarray
    source_id: str = ""

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


def standardize(X):
    """Center and whiten a dataset with its sample moments.

    Computes ``(X - mean) @ cov^{-1/2}`` using the n-1 covariance; a ridge
    ``1e-8 * tr(cov)/d * I`` is applied before inversion if the covariance is
    near singular.

    Raises
    ------
    InsufficientData
        If n <= d, or the sample covariance is identically zero.
    """
    pts = as_points(X)
    n, d = pts.shape
    if n <= d:
        raise InsufficientData(f"need n > d observations, got n={n}, d={d}")
    mean = pts.mean(axis=0)
    cov = np.atleast_2d(np.cov(pts, rowvar=False, ddof=1))
    if np.trace(cov) <= 0.0:
        raise InsufficientData("sample covariance is zero (constant dataset)")
    inv_root = spd_inv_sqrt(cov, ridge_rtol=1e-8)
    return StandardizedDataset(
        points=(pts - mean) @ inv_root,
        source_mean=mean,
        source_cov=cov,
        source_cov_sqrt=spd_sqrt(cov),
        source_id=X.id if isinstance(X, Dataset) else "",
    )


@dataclass(frozen=True)
class ReferenceMeasure:
    """Pooled standardized sample smoothed by a product Gaussian KDE.

    ``anchors`` are m draws from the KDE shared by every transport estimate
    built against this reference; ``anchor_density`` caches the KDE density
    at each anchor.  ``ref_id`` fingerprints the construction so transforms
    from different references cannot be mixed.
    """

    pooled: np.ndarray
    bandwidth: np.ndarray
    anchors: np.ndarray
    anchor_density: np.ndarray
    seed: int
    ref_id: str

    @property
    def m(self):
        return self.anchors.shape[0]

    @property
    def dim(self):
        return self.pooled.shape[1]


def silverman_bandwidth(pooled):
    """Per-coordinate rule-of-thumb bandwidth
    ``h_k = sd_k * (4 / ((d + 2) n))^(1 / (d + 4))``.
    """
    pooled = np.atleast_2d(pooled)
    n, d = pooled.shape
    sd = pooled.std(axis=0, ddof=1)
    sd = np.where(sd > 0, sd, 1.0)
    return sd * (4.0 / ((d + 2.0) * n)) ** (1.0 / (d + 4.0))


def kde_density_many(pooled, bandwidth, z, block=262144):
    """Product-Gaussian KDE density of ``pooled`` evaluated at rows of ``z``."""
    pooled = np.atleast_2d(pooled)
    z = np.atleast_2d(np.asarray(z, dtype=float))
    n, d = pooled.shape
    if z.shape[1] != d:
        raise DimensionError(f"points have dim {z.shape[1]}, reference has {d}")
    h = np.asarray(bandwidth, dtype=float)
    norm = n * (2.0 * np.pi) ** (d / 2.0) * np.prod(h)
    out = np.zeros(z.shape[0])
    rows_per_block = max(1, block // max(n, 1))
    for start in range(0, z.shape[0], rows_per_block):
        zz = z[start : start + rows_per_block]
        diff = (zz[:, None, :] - pooled[None, :, :]) / h
        out[start : start + rows_per_block] = (
            np.exp(-0.5 * np.sum(diff * diff, axis=2)).sum(axis=1) / norm
        )
    return out


def kde_density(ref, z):
    """Reference density at a single point."""
    z = np.asarray(z, dtype=float).ravel()
    return float(kde_density_many(ref.pooled, ref.bandwidth, z[None, :])[0])


def sample_reference_from(pooled, bandwidth, size, rng):
    idx = rng.integers(0, pooled.shape[0], size=size)
    noise = rng.standard_normal((size, pooled.shape[1]))
    return pooled[idx] + noise * bandwidth


def sample_reference(ref, size, seed):
    """Draw ``size`` points from the reference KDE mixture."""
    return sample_reference_from(ref.pooled, ref.bandwidth, size, as_rng(seed))


def build_reference(standardized, m, seed):
    """Pool standardized datasets and draw the shared anchor sample.

    The pooled sample realizes the size-weighted mixture of the standardized
    distributions because each point carries equal weight.  Fully determined
    by ``seed``.
    """
    if not standardized:
        raise InvalidParam("need at least one standardized dataset")
    if m < 1:
        raise InvalidParam(f"anchor count must be >= 1, got {m}")
    d = standardized[0].dim
    for s in standardized:
        if s.dim != d:
            raise DimensionError("standardized datasets must share dimensions")
    pooled = np.vstack([s.points for s in standardized])
    bandwidth = silverman_bandwidth(pooled)
    rng = as_rng(seed)
    anchors = sample_reference_from(pooled, bandwidth, m, rng)
    density = kde_density_many(pooled, bandwidth, anchors)
    fingerprint = hashlib.sha256()
    fingerprint.update(np.int64(seed).tobytes())
    fingerprint.update(np.int64(m).tobytes())
    fingerprint.update(bandwidth.tobytes())
    fingerprint.update(pooled.tobytes())
    return ReferenceMeasure(
        pooled=pooled,
        bandwidth=bandwidth,
        anchors=anchors,
        anchor_density=density,
        seed=int(seed) if not isinstance(seed, np.random.Generator) else -1,
        ref_id=fingerprint.hexdigest()[:16],
    )
