"""Fisher discriminant analysis on PCA-reduced features."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from fisherknn.errors import DimensionError, SingularScatterError
from fisherknn.linalg import DEFAULT_TOL, as_matrix, generalized_symmetric_eigen


@dataclass(frozen=True, eq=False)
class FisherModel:
    basis: np.ndarray  # d x f, unit-length columns
    eigenvalues: np.ndarray  # length f, descending
    class_means: np.ndarray  # C x f, row i is the mean of class_names[i] in Fisher space
    class_names: list[str]

    @property
    def f(self) -> int:
        return self.basis.shape[1]

    @property
    def d(self) -> int:
        return self.basis.shape[0]


def _groups(z, labels: Sequence[str]) -> tuple[np.ndarray, list[str], list[np.ndarray]]:
    z = as_matrix(z, "feature matrix")
    labels = list(labels)
    if len(labels) != z.shape[1]:
        raise DimensionError(f"{len(labels)} labels for {z.shape[1]} columns")
    names = sorted(set(labels))
    if len(names) < 2:
        raise DimensionError(f"at least 2 classes required, got {len(names)}")
    label_arr = np.asarray(labels, dtype=object)
    members = [np.flatnonzero(label_arr == name) for name in names]
    return z, names, members


def within_class_scatter(z, labels: Sequence[str]) -> np.ndarray:
    """Sum over classes of the scatter of each class about its own mean."""
    z, _, members = _groups(z, labels)
    s_w = np.zeros((z.shape[0], z.shape[0]))
    for idx in members:
        dev = z[:, idx] - z[:, idx].mean(axis=1, keepdims=True)
        s_w += dev @ dev.T
    return s_w


def between_class_scatter(z, labels: Sequence[str]) -> np.ndarray:
    """Class-size weighted scatter of the class means about the overall mean."""
    z, _, members = _groups(z, labels)
    total_mean = z.mean(axis=1)
    s_b = np.zeros((z.shape[0], z.shape[0]))
    for idx in members:
        diff = z[:, idx].mean(axis=1) - total_mean
        s_b += len(idx) * np.outer(diff, diff)
    return s_b


def fit_lda(z, labels: Sequence[str], f: int | None = None, tol: float = DEFAULT_TOL) -> FisherModel:
    """Top-``f`` discriminant directions of ``s_b w = lambda s_w w`` (default f = C - 1)."""
    z, names, members = _groups(z, labels)
    n_classes = len(names)
    if f is None:
        f = n_classes - 1
    if not 1 <= f <= n_classes - 1:
        raise DimensionError(f"Fisher dimension {f} out of range 1..{n_classes - 1}")

    s_w = within_class_scatter(z, labels)
    s_b = between_class_scatter(z, labels)
    try:
        pairs = generalized_symmetric_eigen(s_b, s_w, tol)
    except SingularScatterError as exc:
        raise SingularScatterError(
            f"{exc} (features have dimension {z.shape[0]}, {z.shape[1]} samples in {n_classes} classes)"
        ) from None

    basis = pairs.vectors[:, :f].copy()
    eigenvalues = np.maximum(pairs.values[:f], 0.0)
    class_means = np.vstack([basis.T @ z[:, idx].mean(axis=1) for idx in members])
    return FisherModel(basis=basis, eigenvalues=eigenvalues, class_means=class_means, class_names=names)


def project_fisher(model: FisherModel, z) -> np.ndarray:
    z = np.ascontiguousarray(z, dtype=np.float64)
    if z.shape != (model.d,):
        raise DimensionError(f"feature vector has {z.size} values, model expects {model.d}")
    return model.basis.T @ z


def fisher_ratio(w, s_b, s_w) -> float:
    w = np.asarray(w, dtype=np.float64)
    return float(w @ s_b @ w) / float(w @ s_w @ w)


def nearest_mean_accuracy(z, labels: Sequence[str]) -> float:
    """Resubstitution accuracy of the nearest-class-mean rule on columns of ``z``."""
    z, names, members = _groups(z, labels)
    means = np.column_stack([z[:, idx].mean(axis=1) for idx in members])
    dist = np.linalg.norm(z[:, :, None] - means[:, None, :], axis=0)
    predicted = [names[i] for i in np.argmin(dist, axis=1)]
    return float(np.mean([a == b for a, b in zip(predicted, labels)]))
