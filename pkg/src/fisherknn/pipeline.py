"""Trainable recognizer: gallery -> PCA -> LDA -> kNN, plus the model file format.

Model file layout (little-endian)::

    magic "FKM1" | version u32 | width u32 | height u32 | d u32 | f u32 | p u32 | C u32 | k u32
    threshold flag u8 [+ f64]
    C x (u32 length + UTF-8 class name)
    p x u32 class index
    f64 arrays: mean (N) | pca eigenvalues (d) | pca basis (N x d, column-major)
                | fisher eigenvalues (f) | fisher basis (d x f, column-major)
                | class means (C rows of f) | exemplars (f x p, column-major)
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from fisherknn.errors import (
    BadMagicError,
    DimensionError,
    GalleryError,
    ModelFormatError,
    ModelInvariantError,
    ModelIOError,
    TruncatedModelError,
    UnsupportedVersionError,
)
from fisherknn.ingestion import ImageVector, LabeledGallery, data_matrix
from fisherknn.knn import DistanceReport, Verdict, classify, distance_report, leave_one_out_min_distances, suggest_threshold
from fisherknn.lda import FisherModel, fit_lda, project_fisher
from fisherknn.pca import PcaModel, auto_pca_dim, fit_pca, project

MAGIC = b"FKM1"
FORMAT_VERSION = 1
DEFAULT_K = 3
DEFAULT_MARGIN = 1.5

_HEADER = struct.Struct("<4s8I")


@dataclass(frozen=True)
class ThresholdPolicy:
    kind: Literal["none", "auto", "fixed"] = "none"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "auto", "fixed"):
            raise ValueError(f"unknown threshold policy {self.kind!r}")
        if self.kind == "auto" and not self.value > 0:
            raise ValueError(f"auto threshold margin must be positive, got {self.value}")
        if self.kind == "fixed" and not (np.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"fixed threshold must be a non-negative number, got {self.value}")

    @classmethod
    def none(cls) -> ThresholdPolicy:
        return cls("none")

    @classmethod
    def auto(cls, margin: float = DEFAULT_MARGIN) -> ThresholdPolicy:
        return cls("auto", float(margin))

    @classmethod
    def fixed(cls, value: float) -> ThresholdPolicy:
        return cls("fixed", float(value))

    @classmethod
    def parse(cls, text: str) -> ThresholdPolicy:
        """Accepts ``none``, ``auto``, ``auto:<margin>`` or ``fixed:<value>``."""
        kind, _, arg = text.strip().partition(":")
        if kind == "none" and not arg:
            return cls.none()
        if kind == "auto":
            return cls.auto(float(arg)) if arg else cls.auto()
        if kind == "fixed" and arg:
            return cls.fixed(float(arg))
        raise ValueError(f"bad threshold setting {text!r} (use none, auto[:margin] or fixed:<value>)")


def _same_array(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and a.astype("<f8").tobytes() == b.astype("<f8").tobytes()


@dataclass(frozen=True, eq=False)
class RecognizerModel:
    pca: PcaModel
    fisher: FisherModel
    exemplars: np.ndarray  # f x p
    labels: list[str]
    k: int
    threshold: float | None
    width: int
    height: int
    format_version: int = FORMAT_VERSION

    @property
    def class_names(self) -> list[str]:
        return self.fisher.class_names

    def embed(self, pixels) -> np.ndarray:
        """Image vector -> Fisher-space feature vector."""
        return project_fisher(self.fisher, project(self.pca, pixels))

    def __eq__(self, other):
        if not isinstance(other, RecognizerModel):
            return NotImplemented
        scalars = ("labels", "k", "width", "height", "format_version")
        if any(getattr(self, s) != getattr(other, s) for s in scalars):
            return False
        if self.class_names != other.class_names:
            return False
        if (self.threshold is None) != (other.threshold is None):
            return False
        if self.threshold is not None and struct.pack("<d", self.threshold) != struct.pack("<d", other.threshold):
            return False
        arrays = [
            (self.pca.mean, other.pca.mean),
            (self.pca.eigenvalues, other.pca.eigenvalues),
            (self.pca.basis, other.pca.basis),
            (self.fisher.eigenvalues, other.fisher.eigenvalues),
            (self.fisher.basis, other.fisher.basis),
            (self.fisher.class_means, other.fisher.class_means),
            (self.exemplars, other.exemplars),
        ]
        return all(_same_array(a, b) for a, b in arrays)

    __hash__ = None


def _check_training_gallery(gallery: LabeledGallery) -> None:
    counts = gallery.class_counts()
    if len(counts) < 2:
        raise GalleryError(f"found {len(counts)} class(es), at least 2 classes required", "")
    for name, n in counts.items():
        if n < 2:
            raise GalleryError(f"class '{name}' has {n} image(s), at least 2 required", name)


def train(
    gallery: LabeledGallery,
    pca_dim: int | Literal["auto"] = "auto",
    fisher_dim: int | Literal["auto"] = "auto",
    k: int = DEFAULT_K,
    threshold_policy: ThresholdPolicy | None = None,
) -> RecognizerModel:
    _check_training_gallery(gallery)
    policy = threshold_policy or ThresholdPolicy.none()
    p, n_classes = len(gallery), len(gallery.class_names)
    if not 1 <= k <= p:
        raise DimensionError(f"k = {k} out of range 1..{p}")
    d = auto_pca_dim(p, n_classes) if pca_dim == "auto" else int(pca_dim)
    f = n_classes - 1 if fisher_dim == "auto" else int(fisher_dim)

    pca = fit_pca(data_matrix(gallery), d)
    # project image by image, exactly as identify() will, so a training probe lands on its exemplar bit-for-bit
    z = np.column_stack([project(pca, img.pixels) for img in gallery.images])
    fisher = fit_lda(z, gallery.labels, f)
    exemplars = np.column_stack([project_fisher(fisher, z[:, i]) for i in range(p)])

    if policy.kind == "auto":
        threshold = suggest_threshold(leave_one_out_min_distances(exemplars), policy.value)
    elif policy.kind == "fixed":
        threshold = policy.value
    else:
        threshold = None
    return RecognizerModel(
        pca=pca,
        fisher=fisher,
        exemplars=exemplars,
        labels=list(gallery.labels),
        k=k,
        threshold=threshold,
        width=gallery.width,
        height=gallery.height,
    )


def identify(model: RecognizerModel, probe: ImageVector) -> tuple[Verdict, DistanceReport]:
    if (probe.width, probe.height) != (model.width, model.height):
        raise DimensionError(
            f"probe is {probe.width}x{probe.height}, model expects {model.width}x{model.height}"
        )
    features = model.embed(probe.pixels)
    report = distance_report(features, model.exemplars)
    verdict = classify(features, model.exemplars, model.labels, model.k, model.threshold, report=report)
    return verdict, report


def leave_one_out_accuracy(model: RecognizerModel) -> float:
    """Fraction of exemplars whose class is recovered from the other exemplars alone."""
    p = model.exemplars.shape[1]
    k = min(model.k, p - 1)
    correct = 0
    for i in range(p):
        rest = np.delete(model.exemplars, i, axis=1)
        labels = model.labels[:i] + model.labels[i + 1 :]
        correct += classify(model.exemplars[:, i], rest, labels, k).candidate == model.labels[i]
    return correct / p


@dataclass
class ClassStats:
    total: int = 0
    correct: int = 0
    rejected: int = 0


@dataclass
class EvaluationSummary:
    per_class: dict[str, ClassStats] = field(default_factory=dict)
    genuine_min_distances: list[float] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(s.total for s in self.per_class.values())

    @property
    def correct(self) -> int:
        return sum(s.correct for s in self.per_class.values())

    @property
    def rejected(self) -> int:
        return sum(s.rejected for s in self.per_class.values())

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def rejection_rate(self) -> float:
        return self.rejected / self.total if self.total else 0.0

    @property
    def mean_genuine_min_distance(self) -> float | None:
        if not self.genuine_min_distances:
            return None
        return float(np.mean(self.genuine_min_distances))


def evaluate(model: RecognizerModel, gallery: LabeledGallery) -> EvaluationSummary:
    """Identify every gallery image. Probes of classes unknown to the model can only be rejected or wrong."""
    if (gallery.width, gallery.height) != (model.width, model.height):
        raise DimensionError(
            f"gallery is {gallery.width}x{gallery.height}, model expects {model.width}x{model.height}"
        )
    known = set(model.class_names)
    summary = EvaluationSummary({name: ClassStats() for name in gallery.class_names})
    for img, truth in zip(gallery.images, gallery.labels):
        verdict, _ = identify(model, img)
        stats = summary.per_class[truth]
        stats.total += 1
        if verdict.rejected:
            stats.rejected += 1
        elif verdict.label == truth:
            stats.correct += 1
        if truth in known:
            summary.genuine_min_distances.append(verdict.min_distance)
    return summary


# ---------------------------------------------------------------- serialization


def _f64(a: np.ndarray) -> bytes:
    return np.asarray(a, dtype="<f8").tobytes(order="F")


def save_model(model: RecognizerModel, path: str | os.PathLike) -> None:
    path = os.fspath(path)
    name_index = {name: i for i, name in enumerate(model.class_names)}
    parts = [
        _HEADER.pack(
            MAGIC,
            model.format_version,
            model.width,
            model.height,
            model.pca.d,
            model.fisher.f,
            model.exemplars.shape[1],
            len(model.class_names),
            model.k,
        )
    ]
    if model.threshold is None:
        parts.append(b"\x00")
    else:
        parts.append(struct.pack("<Bd", 1, model.threshold))
    for name in model.class_names:
        raw = name.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)) + raw)
    parts.append(np.asarray([name_index[lab] for lab in model.labels], dtype="<u4").tobytes())
    parts += [
        _f64(model.pca.mean),
        _f64(model.pca.eigenvalues),
        _f64(model.pca.basis),
        _f64(model.fisher.eigenvalues),
        _f64(model.fisher.basis),
        np.asarray(model.fisher.class_means, dtype="<f8").tobytes(order="C"),
        _f64(model.exemplars),
    ]
    try:
        with open(path, "wb") as fh:
            fh.write(b"".join(parts))
    except OSError as exc:
        raise ModelIOError(f"cannot write model to {path}: {exc.strerror or exc}") from exc


class _Reader:
    def __init__(self, data: bytes, path: str):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        end = self.pos + n
        if end > len(self.data):
            raise TruncatedModelError(
                f"{self.path}: truncated model file (expected at least {end} bytes, got {len(self.data)})",
                end,
                len(self.data),
            )
        chunk = self.data[self.pos : end]
        self.pos = end
        return chunk

    def unpack(self, fmt: str):
        s = struct.Struct(fmt)
        return s.unpack(self.take(s.size))

    def array(self, count: int, shape: tuple[int, ...], order: str = "F") -> np.ndarray:
        flat = np.frombuffer(self.take(8 * count), dtype="<f8").astype(np.float64)
        return flat.reshape(shape, order=order).copy()


def load_model(path: str | os.PathLike) -> RecognizerModel:
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ModelIOError(f"cannot read model from {path}: {exc.strerror or exc}") from exc

    if data[:4] != MAGIC:
        raise BadMagicError(f"{path}: not a model file (magic {data[:4]!r}, expected {MAGIC!r})")
    r = _Reader(data, path)
    _, version, width, height, d, f, p, n_classes, k = r.unpack(_HEADER.format)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported model format version {version}")
    (flag,) = r.unpack("<B")
    if flag not in (0, 1):
        raise ModelFormatError(f"{path}: bad threshold flag {flag}")
    threshold = r.unpack("<d")[0] if flag else None
    names = []
    for _ in range(n_classes):
        (length,) = r.unpack("<I")
        try:
            names.append(r.take(length).decode("utf-8"))
        except UnicodeDecodeError:
            raise ModelFormatError(f"{path}: class name is not valid UTF-8") from None

    n_pixels = width * height
    expected = r.pos + 4 * p + 8 * (n_pixels + d + n_pixels * d + f + d * f + n_classes * f + f * p)
    if len(data) != expected:
        raise TruncatedModelError(
            f"{path}: model file length {len(data)} does not match expected {expected}", expected, len(data)
        )
    index = np.frombuffer(r.take(4 * p), dtype="<u4")
    if np.any(index >= n_classes):
        raise ModelInvariantError(f"{path}: label index out of range for {n_classes} classes")
    labels = [names[i] for i in index]

    mean = r.array(n_pixels, (n_pixels,))
    pca_values = r.array(d, (d,))
    pca_basis = r.array(n_pixels * d, (n_pixels, d))
    fisher_values = r.array(f, (f,))
    fisher_basis = r.array(d * f, (d, f))
    class_means = r.array(n_classes * f, (n_classes, f), order="C")
    exemplars = r.array(f * p, (f, p))

    model = RecognizerModel(
        pca=PcaModel(mean=mean, basis=pca_basis, eigenvalues=pca_values),
        fisher=FisherModel(basis=fisher_basis, eigenvalues=fisher_values, class_means=class_means, class_names=names),
        exemplars=exemplars,
        labels=labels,
        k=k,
        threshold=threshold,
        width=width,
        height=height,
        format_version=version,
    )
    validate_model(model, path)
    return model


def validate_model(model: RecognizerModel, where: str = "model") -> None:
    """Raise ModelInvariantError if any structural or numerical invariant fails."""

    def fail(msg: str):
        raise ModelInvariantError(f"{where}: {msg}")

    pca, fisher = model.pca, model.fisher
    n_classes, p = len(model.class_names), model.exemplars.shape[1]
    if model.width < 1 or model.height < 1:
        fail(f"bad image size {model.width}x{model.height}")
    if pca.mean.shape[0] != model.width * model.height:
        fail("mean length does not match image size")
    if n_classes < 2 or len(set(model.class_names)) != n_classes:
        fail("need at least 2 distinct class names")
    if not 1 <= pca.d <= p - 1:
        fail(f"PCA dimension {pca.d} out of range 1..{p - 1}")
    if not 1 <= fisher.f <= n_classes - 1:
        fail(f"Fisher dimension {fisher.f} out of range 1..{n_classes - 1}")
    if fisher.d != pca.d or model.exemplars.shape[0] != fisher.f or len(model.labels) != p:
        fail("inconsistent dimensions between stages")
    if not 1 <= model.k <= p:
        fail(f"k = {model.k} out of range 1..{p}")
    if set(model.labels) - set(model.class_names):
        fail("labels reference unknown classes")
    arrays = (pca.mean, pca.eigenvalues, pca.basis, fisher.eigenvalues, fisher.basis, fisher.class_means, model.exemplars)
    if not all(np.all(np.isfinite(a)) for a in arrays):
        fail("non-finite values")
    if model.threshold is not None and not (np.isfinite(model.threshold) and model.threshold >= 0):
        fail(f"bad threshold {model.threshold}")
    if np.max(np.abs(pca.basis.T @ pca.basis - np.eye(pca.d))) > 1e-8:
        fail("PCA basis is not orthonormal")
    if np.max(np.abs(np.linalg.norm(fisher.basis, axis=0) - 1.0)) > 1e-8:
        fail("Fisher basis columns are not unit length")
    for values, stage in ((pca.eigenvalues, "PCA"), (fisher.eigenvalues, "Fisher")):
        if np.any(np.diff(values) > 0) or np.any(values < -1e-9):
            fail(f"{stage} eigenvalues not descending and non-negative")
