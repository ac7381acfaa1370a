"""Seeded synthetic face-like galleries for tests and demos.

Each class gets a smooth base pattern (a few Gaussian blobs over a tilted
cosine); each image of the class adds a small smooth perturbation and
pixel noise.  Pixels are quantized to 8-bit levels so that writing and
reloading a generated image is lossless.
"""

from __future__ import annotations

import os

import numpy as np

from fisherknn.ingestion import ImageVector, LabeledGallery, write_pgm

BLOBS = 5
PERTURBATION = 0.03
NOISE = 0.01


def _grid(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    return xs / max(width - 1, 1), ys / max(height - 1, 1)


def _base_pattern(rng: np.random.Generator, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    fx, fy, phase = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0, 2 * np.pi)
    img = 0.5 * np.cos(2 * np.pi * (fx * xs + fy * ys) + phase)
    for _ in range(BLOBS):
        cx, cy = rng.uniform(0.1, 0.9, size=2)
        width = rng.uniform(0.08, 0.25)
        amp = rng.uniform(-1.0, 1.0)
        img += amp * np.exp(-((xs - cx) ** 2 + (ys - cy) ** 2) / (2 * width**2))
    lo, hi = img.min(), img.max()
    return 0.1 + 0.8 * (img - lo) / (hi - lo)


def _variant(rng: np.random.Generator, base: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    fx, fy, phase = rng.uniform(0.2, 1.0, size=2).tolist() + [rng.uniform(0, 2 * np.pi)]
    smooth = PERTURBATION * np.cos(2 * np.pi * (fx * xs + fy * ys) + phase)
    img = base + smooth + rng.normal(0.0, NOISE, size=base.shape)
    return np.rint(np.clip(img, 0.0, 1.0) * 255) / 255


def class_name(prefix: str, index: int) -> str:
    return f"{prefix}{index:02d}"


def synthetic_gallery(
    classes: int = 5,
    per_class: int = 4,
    width: int = 16,
    height: int = 16,
    seed: int = 42,
    prefix: str = "client",
) -> LabeledGallery:
    if classes < 1 or per_class < 1 or width < 1 or height < 1:
        raise ValueError("classes, per_class, width and height must all be >= 1")
    rng = np.random.default_rng(seed)
    xs, ys = _grid(width, height)
    images, labels = [], []
    for c in range(classes):
        base = _base_pattern(rng, xs, ys)
        name = class_name(prefix, c)
        for j in range(per_class):
            path = os.path.join(name, f"{j:02d}.pgm")
            images.append(ImageVector.from_raster(_variant(rng, base, xs, ys), path))
            labels.append(name)
    return LabeledGallery(images, labels)


def write_synthetic_gallery(out_dir: str | os.PathLike, **kwargs) -> LabeledGallery:
    """Generate with ``synthetic_gallery(**kwargs)`` and write ``<out_dir>/<class>/<nn>.pgm``."""
    gallery = synthetic_gallery(**kwargs)
    out_dir = os.fspath(out_dir)
    for name in gallery.class_names:
        os.makedirs(os.path.join(out_dir, name), exist_ok=True)
    for img in gallery.images:
        write_pgm(img, os.path.join(out_dir, img.source_path))
    return gallery


def uniform_image(value: float, width: int = 16, height: int = 16) -> ImageVector:
    return ImageVector.from_raster(np.full((height, width), float(value)), "uniform")
