"""Classical (Torgerson) multidimensional scaling for visualization
coordinates."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidMatrix, InvalidParam


@dataclass(frozen=True)
class Embedding:
    """MDS coordinates with the eigenvalues that produced them.

    ``distortion`` is the clamped negative-eigenvalue mass relative to the
    total spectrum mass, a diagnostic for non-Euclidean input geometry.
    """

    coords: np.ndarray
    eigenvalues: np.ndarray
    distortion: float


def check_distance_matrix(D, name="distance matrix"):
    """Validate a symmetric nonnegative matrix with an exactly zero diagonal."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidMatrix(f"{name} must be square, got {D.shape}")
    if not np.array_equal(D, D.T):
        raise InvalidMatrix(f"{name} must be exactly symmetric")
    if np.any(np.diag(D) != 0.0):
        raise InvalidMatrix(f"{name} must have a zero diagonal")
    if np.any(D < 0):
        raise InvalidMatrix(f"{name} has negative entries")
    return D


def classical_mds(D, a=2):
    """Embed a distance matrix into ``a`` dimensions by double centering.

    Negative eigenvalues of the centered Gram matrix (Wasserstein geometry is
    not exactly Euclidean) are clamped to zero and reported as ``distortion``.
    If ``a`` exceeds the available rank the surplus coordinates are zero.
    """
    if a < 1:
        raise InvalidParam(f"embedding dimension must be >= 1, got {a}")
    D = check_distance_matrix(D)
    n = D.shape[0]
    J = np.eye(n) - np.ones((n, n)) / n
    B = -0.5 * J @ (D * D) @ J
    w, V = np.linalg.eigh((B + B.T) / 2.0)
    order = np.argsort(w)[::-1]
    w, V = w[order], V[:, order]
    total = np.sum(np.abs(w))
    distortion = float(np.sum(np.abs(w[w < 0])) / total) if total > 0 else 0.0
    top = min(a, n)
    lam = np.clip(w[:top], 0.0, None)
    coords = np.zeros((n, a))
    coords[:, :top] = V[:, :top] * np.sqrt(lam)
    eigenvalues = np.zeros(a)
    eigenvalues[:top] = lam
    return Embedding(coords=coords, eigenvalues=eigenvalues, distortion=distortion)
