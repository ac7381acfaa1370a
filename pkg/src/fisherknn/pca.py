"""Eigenimage extraction with the small-sample (Gram matrix) shortcut.

With p training images of N pixels and p << N, the N x N covariance
``Xc Xc^T`` is never formed.  The p x p Gram matrix ``Xc^T Xc`` shares its
nonzero spectrum, and each Gram eigenvector u maps to a covariance
eigenvector ``Xc u / ||Xc u||``.  Covariance is left unnormalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fisherknn.errors import DegenerateDataError, DimensionError
from fisherknn.linalg import DEFAULT_TOL, apply_sign_convention, as_matrix, symmetric_eigen

# Gram eigenvalues at or below this fraction of trace(G) are treated as zero.
GRAM_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray  # length N
    basis: np.ndarray  # N x d, orthonormal columns
    eigenvalues: np.ndarray  # length d, descending

    @property
    def d(self) -> int:
        return self.basis.shape[1]

    @property
    def n_pixels(self) -> int:
        return self.mean.shape[0]


def auto_pca_dim(n_images: int, n_classes: int) -> int:
    """p - C: the largest PCA dimension that keeps within-class scatter invertible."""
    return n_images - n_classes


def _orthonormalize(v: np.ndarray) -> np.ndarray:
    # one modified Gram-Schmidt pass; columns already nearly orthonormal
    q = v.copy()
    for j in range(q.shape[1]):
        for i in range(j):
            q[:, j] -= (q[:, i] @ q[:, j]) * q[:, i]
        q[:, j] /= np.linalg.norm(q[:, j])
    return q


def fit_pca(x, d: int, tol: float = DEFAULT_TOL) -> PcaModel:
    x = as_matrix(x, "data matrix")
    n, p = x.shape
    if p < 2:
        raise DimensionError(f"PCA needs at least 2 images, got {p}")
    if not 1 <= d <= p - 1:
        raise DimensionError(f"PCA dimension {d} out of range 1..{p - 1}")

    mean = x.mean(axis=1)
    centered = x - mean[:, None]
    gram = centered.T @ centered
    trace = float(np.trace(gram))
    if trace <= 1e-24 * float(np.sum(x * x)) or trace == 0.0:
        raise DegenerateDataError("training images are all identical; no variance to analyse")

    pairs = symmetric_eigen(gram, tol)
    rank = int(np.sum(pairs.values > GRAM_CUTOFF * trace))
    if rank < d:
        raise DegenerateDataError(
            f"data spans only {rank} direction(s) after centering; cannot keep {d} (duplicate images?)"
        )
    u = pairs.vectors[:, :d]
    v = centered @ u
    v /= np.linalg.norm(v, axis=0)
    basis = apply_sign_convention(_orthonormalize(v))
    eigenvalues = np.maximum(pairs.values[:d], 0.0)
    return PcaModel(mean=mean, basis=basis, eigenvalues=eigenvalues)


def project(model: PcaModel, y) -> np.ndarray:
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape != (model.n_pixels,):
        raise DimensionError(f"probe has {y.size} values, model expects {model.n_pixels}")
    return model.basis.T @ (y - model.mean)


def project_matrix(model: PcaModel, x) -> np.ndarray:
    x = as_matrix(x, "image matrix")
    if x.shape[0] != model.n_pixels:
        raise DimensionError(f"matrix has {x.shape[0]} rows, model expects {model.n_pixels}")
    return model.basis.T @ (x - model.mean[:, None])


def reconstruction_error(model: PcaModel, x) -> float:
    """Frobenius norm of what the basis fails to capture of the centred data."""
    centered = as_matrix(x) - model.mean[:, None]
    return float(np.linalg.norm(centered - model.basis @ (model.basis.T @ centered)))
