"""Symmetric PSD matrix algebra, the Gaussian (Bures) Wasserstein distance,
and the fixed-point covariance barycenter.

All matrix arguments are plain ``(d, d)`` numpy arrays.  Inputs are validated
to be symmetric within a relative tolerance of 1e-10 and positive
semidefinite up to an eigenvalue floor of ``-1e-10 * lambda_max``; tiny
negative eigenvalues from floating point are clamped to zero before square
roots are taken.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, InvalidMatrix, NotPsd

SYM_RTOL = 1e-10
EIG_CLAMP_RTOL = 1e-10


def check_spd(A, name="matrix"):
    """Validate that ``A`` is a symmetric PSD matrix and return it as float64.

    Raises
    ------
    InvalidMatrix
        If ``A`` is not square or not symmetric within tolerance.
    NotPsd
        If an eigenvalue falls below ``-1e-10 * lambda_max``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidMatrix(f"{name} must be square, got shape {A.shape}")
    scale = np.max(np.abs(A))
    if scale > 0 and np.max(np.abs(A - A.T)) > SYM_RTOL * scale:
        raise InvalidMatrix(f"{name} is not symmetric within tolerance")
    w = np.linalg.eigvalsh(A)
    lam_max = max(w[-1], 0.0)
    if w[0] < -EIG_CLAMP_RTOL * max(lam_max, 1.0):
        raise NotPsd(f"{name} has eigenvalue {w[0]:.3e} below tolerance")
    return A


def _clamped_eigh(A):
    """Eigendecomposition with small negative eigenvalues clamped to zero."""
    w, V = np.linalg.eigh((A + A.T) / 2.0)
    return np.clip(w, 0.0, None), V


def spd_sqrt(A):
    """Symmetric PSD square root of ``A``.

    Returns the unique symmetric PSD ``B`` with ``B @ B == A`` up to a
    relative Frobenius error of 1e-8.
    """
    A = check_spd(A)
    w, V = _clamped_eigh(A)
    return (V * np.sqrt(w)) @ V.T


def spd_inv_sqrt(A, ridge_rtol=1e-8):
    """Symmetric inverse square root, ridge-regularized when near singular.

    A ridge ``eps * I`` with ``eps = ridge_rtol * tr(A) / d`` is added before
    inversion whenever the smallest eigenvalue falls under ``eps``.
    """
    A = check_spd(A)
    d = A.shape[0]
    w, V = _clamped_eigh(A)
    eps = ridge_rtol * np.trace(A) / d
    if eps <= 0.0:
        raise NotPsd("matrix has zero trace, no usable inverse square root")
    if w[0] < eps:
        w = w + eps
    return (V / np.sqrt(w)) @ V.T


def bures_sq(A, B):
    """Squared Bures distance ``tr A + tr B - 2 tr((A^1/2) B (A^1/2))^1/2``.

    Clamped at zero if floating point produces a tiny negative value.  The
    arguments are ordered canonically internally so the result is exactly
    symmetric in (A, B).
    """
    A = check_spd(A, "A")
    B = check_spd(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    # canonical order makes bures_sq(A, B) bitwise equal to bures_sq(B, A)
    if A.tobytes() > B.tobytes():
        A, B = B, A
    sa = spd_sqrt(A)
    w, _ = _clamped_eigh(sa @ B @ sa)
    val = np.trace(A) + np.trace(B) - 2.0 * np.sum(np.sqrt(w))
    return max(val, 0.0)


def bures_cross_trace(sqrt_a, B):
    """``tr((A^1/2 B A^1/2)^1/2)`` given a precomputed square root of A.

    Fast path for clustering loops; skips input validation.
    """
    w = np.linalg.eigvalsh(sqrt_a @ B @ sqrt_a)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


@dataclass(frozen=True)
class GaussianSummary:
    """First two moments of one dataset: mean vector and covariance matrix."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float).ravel())
        object.__setattr__(self, "cov", check_spd(self.cov, "cov"))
        if self.cov.shape[0] != self.mean.shape[0]:
            raise DimensionError(
                f"mean has length {self.mean.shape[0]} but cov is {self.cov.shape}"
            )

    @property
    def dim(self):
        return self.mean.shape[0]

    @classmethod
    def from_points(cls, points, ridge_rtol=0.0):
        """Sample mean and covariance (denominator n-1) of an (n, d) array."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        mean = points.mean(axis=0)
        if points.shape[0] < 2:
            cov = np.zeros((points.shape[1], points.shape[1]))
        else:
            cov = np.cov(points, rowvar=False, ddof=1)
            cov = np.atleast_2d(cov)
        if ridge_rtol > 0.0:
            d = cov.shape[0]
            eps = ridge_rtol * max(np.trace(cov), 1e-300) / d
            w = np.linalg.eigvalsh((cov + cov.T) / 2.0)
            if w[0] < eps:
                cov = cov + eps * np.eye(d)
        return cls(mean, cov)


def gaussian_wasserstein_sq(P, Q):
    """Squared Wasserstein distance between the Gaussians matching P and Q:
    ``||mu_P - mu_Q||^2 + bures_sq(cov_P, cov_Q)``.
    """
    if P.dim != Q.dim:
        raise DimensionError(f"dimension mismatch {P.dim} vs {Q.dim}")
    loc = float(np.sum((P.mean - Q.mean) ** 2))
    return loc + bures_sq(P.cov, Q.cov)


def _check_weights(weights, n):
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != n:
        raise DimensionError(f"{n} items but {w.shape[0]} weights")
    if np.any(w < 0):
        raise InvalidMatrix("weights must be nonnegative")
    if abs(w.sum() - 1.0) > 1e-12:
        raise InvalidMatrix(f"weights sum to {w.sum()!r}, expected 1")
    return w


def bures_barycenter(covs, weights=None, max_iter=500, tol=1e-8):
    """Weighted Wasserstein barycenter of covariance matrices.

    Solves the fixed point ``S = sum_j w_j (S^1/2 C_j S^1/2)^1/2`` by
    iterating the conjugated map

        ``S_{t+1} = S_t^{-1/2} (sum_j w_j (S_t^1/2 C_j S_t^1/2)^1/2)^2 S_t^{-1/2}``

    starting from the arithmetic mean.  Near-singular inputs are
    ridge-regularized with ``1e-10 * tr(C) / d * I``.

    Raises
    ------
    ConvergenceError
        If the relative fixed-point residual stays above ``tol`` after
        ``max_iter`` iterations; the error carries the last residual.
    """
    covs = [check_spd(C, f"cov[{i}]") for i, C in enumerate(covs)]
    if not covs:
        raise DimensionError("need at least one covariance")
    d = covs[0].shape[0]
    for C in covs:
        if C.shape != (d, d):
            raise DimensionError("covariances must share dimensions")
    if weights is None:
        weights = np.full(len(covs), 1.0 / len(covs))
    w = _check_weights(weights, len(covs))

    regs = []
    for C in covs:
        lam = np.linalg.eigvalsh(C)
        if lam[0] < 1e-12 * max(lam[-1], 1.0):
            C = C + (1e-10 * np.trace(C) / d + 1e-300) * np.eye(d)
        regs.append(C)

    if len(regs) == 1:
        return regs[0].copy()

    S = np.einsum("j,jkl->kl", w, np.array(regs))
    residual = np.inf
    for _ in range(max_iter):
        root = spd_sqrt(S)
        inv_root = spd_inv_sqrt(S)
        mid = np.zeros_like(S)
        for wj, C in zip(w, regs):
            mid += wj * spd_sqrt(root @ C @ root)
        residual = np.linalg.norm(S - mid, "fro") / max(
            np.linalg.norm(S, "fro"), 1e-300
        )
        if residual <= tol:
            return S
        S = inv_root @ mid @ mid @ inv_root
        S = (S + S.T) / 2.0
    raise ConvergenceError(
        f"barycenter fixed point stalled at residual {residual:.3e}",
        residual=residual,
    )
