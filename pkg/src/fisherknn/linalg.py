"""Dense real linear algebra for the feature extractors.

Matrices are plain 2-D ``float64`` numpy arrays.  The eigensolvers are
written out here (cyclic Jacobi, whitening for the generalized problem)
so that results are deterministic bit-for-bit and carry a fixed sign
convention; numpy only supplies storage and elementwise arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fisherknn.errors import ConvergenceError, NotSymmetricError, ShapeError, SingularScatterError

DEFAULT_TOL = 1e-10
MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-9
# Internal decompositions run tighter than the caller's tol: whitening
# amplifies their error by cond(s_w).
_INNER_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class EigenPairs:
    """Eigenvalues in descending order; ``vectors[:, j]`` pairs with ``values[j]``."""

    values: np.ndarray
    vectors: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "left operand")
    b = as_matrix(b, "right operand")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b


def apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry (first on ties) is non-negative."""
    out = np.array(vectors, dtype=np.float64, copy=True)
    if out.size == 0:
        return out
    pivots = np.argmax(np.abs(out), axis=0)
    flip = out[pivots, np.arange(out.shape[1])] < 0
    out[:, flip] *= -1.0
    return out


def _check_symmetric(a: np.ndarray, name: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise NotSymmetricError(f"{name} must be square, got {a.shape[0]}x{a.shape[1]}")
    scale = np.linalg.norm(a)
    asym = float(np.max(np.abs(a - a.T)))
    if asym > SYMMETRY_TOL * scale:
        raise NotSymmetricError(f"{name} is not symmetric (max |A - A^T| = {asym:.3e})")


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def _jacobi(a: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    target = tol * float(np.linalg.norm(a))
    for _ in range(MAX_SWEEPS):
        if _off_norm(a) <= target:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0

                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    off = _off_norm(a)
    if off <= target:
        return np.diag(a).copy(), v
    raise ConvergenceError(
        f"Jacobi did not converge in {MAX_SWEEPS} sweeps (off-diagonal norm {off:.3e})", off
    )


def _sorted_pairs(values: np.ndarray, vectors: np.ndarray) -> EigenPairs:
    order = np.argsort(-values, kind="stable")
    return EigenPairs(values=values[order], vectors=apply_sign_convention(vectors[:, order]))


def symmetric_eigen(a, tol: float = DEFAULT_TOL) -> EigenPairs:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Converged when the off-diagonal Frobenius norm drops to ``tol * ||A||_F``.
    Raises ConvergenceError after MAX_SWEEPS sweeps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_matrix(a)
    _check_symmetric(a, "matrix")
    values, vectors = _jacobi(0.5 * (a + a.T), tol)
    return _sorted_pairs(values, vectors)


def generalized_symmetric_eigen(s_b, s_w, tol: float = DEFAULT_TOL) -> EigenPairs:
    """Solve ``s_b w = lambda s_w w`` for symmetric ``s_b`` and SPD ``s_w``.

    ``s_w`` is whitened through its own eigendecomposition, the ordinary
    symmetric problem is solved in whitened coordinates and the vectors are
    mapped back and scaled to unit Euclidean length.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s_b = as_matrix(s_b, "s_b")
    s_w = as_matrix(s_w, "s_w")
    _check_symmetric(s_b, "s_b")
    _check_symmetric(s_w, "s_w")
    if s_b.shape != s_w.shape:
        raise ShapeError(f"s_b is {s_b.shape[0]}x{s_b.shape[1]} but s_w is {s_w.shape[0]}x{s_w.shape[1]}")

    w_pairs = _sorted_pairs(*_jacobi(0.5 * (s_w + s_w.T), min(tol, _INNER_TOL)))
    smallest = float(w_pairs.values[-1])
    if smallest <= tol * float(np.linalg.norm(s_w)):
        raise SingularScatterError(
            f"within-class scatter is not positive definite (smallest eigenvalue {smallest:.3e}); "
            "reduce the PCA dimension to at most p - C"
        )
    whiten = w_pairs.vectors / np.sqrt(w_pairs.values)
    m = whiten.T @ s_b @ whiten
    values, y = _jacobi(0.5 * (m + m.T), min(tol, _INNER_TOL))
    vectors = whiten @ y
    vectors /= np.linalg.norm(vectors, axis=0)
    return _sorted_pairs(values, vectors)
