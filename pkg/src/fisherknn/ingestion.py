"""Binary PGM (P5) loading and class-per-directory galleries.

Images are vectorized column-major: every pixel of column 0 top to
bottom, then column 1, and so on.  This order is part of the model file
contract and must not change.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from fisherknn.errors import (
    GalleryError,
    PgmHeaderError,
    PgmMagicError,
    PgmMaxvalError,
    PgmNotFoundError,
    PgmTruncatedError,
)


@dataclass(frozen=True, eq=False)
class ImageVector:
    pixels: np.ndarray
    width: int
    height: int
    source_path: str = ""

    def __post_init__(self):
        if self.pixels.ndim != 1 or self.pixels.size != self.width * self.height:
            raise ValueError(
                f"pixel vector of length {self.pixels.size} does not match {self.width}x{self.height}"
            )

    @classmethod
    def from_raster(cls, raster: np.ndarray, source_path: str = "") -> ImageVector:
        """Build from a (height, width) array of values in [0, 1]."""
        raster = np.asarray(raster, dtype=np.float64)
        height, width = raster.shape
        return cls(raster.ravel(order="F").copy(), width, height, source_path)

    def raster(self) -> np.ndarray:
        return self.pixels.reshape((self.height, self.width), order="F")


@dataclass(frozen=True, eq=False)
class LabeledGallery:
    images: list[ImageVector]
    labels: list[str]
    class_names: list[str] = field(default_factory=list)
    width: int = 0
    height: int = 0

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise ValueError(f"{len(self.images)} images but {len(self.labels)} labels")
        if not self.class_names:
            object.__setattr__(self, "class_names", sorted(set(self.labels)))
        if self.images and not self.width:
            object.__setattr__(self, "width", self.images[0].width)
            object.__setattr__(self, "height", self.images[0].height)
        for img in self.images:
            if (img.width, img.height) != (self.width, self.height):
                raise GalleryError(
                    f"image is {img.width}x{img.height}, gallery is {self.width}x{self.height}",
                    img.source_path,
                )
        unknown = set(self.labels) - set(self.class_names)
        if unknown:
            raise ValueError(f"labels not among class names: {sorted(unknown)}")

    def __len__(self) -> int:
        return len(self.images)

    def class_counts(self) -> dict[str, int]:
        return {name: self.labels.count(name) for name in self.class_names}


def _read_token(data: bytes, pos: int, path: str) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        ch = data[pos : pos + 1]
        if ch == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif ch.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise PgmHeaderError("unexpected end of header", path)
    return data[start:pos], pos


def load_pgm(path: str | os.PathLike) -> ImageVector:
    """Read an 8-bit binary PGM and return its pixels scaled to [0, 1]."""
    path = os.fspath(path)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except FileNotFoundError:
        raise PgmNotFoundError("no such file", path) from None

    if data[:2] != b"P5":
        raise PgmMagicError(f"expected magic 'P5', found {data[:2]!r}", path)
    pos = 2
    values = []
    for _ in range(3):
        token, pos = _read_token(data, pos, path)
        try:
            values.append(int(token))
        except ValueError:
            raise PgmHeaderError(f"bad header field {token!r}", path) from None
    width, height, maxval = values
    if width < 1 or height < 1:
        raise PgmHeaderError(f"bad dimensions {width}x{height}", path)
    if not 0 < maxval <= 255:
        raise PgmMaxvalError(f"maxval {maxval} unsupported (must be 1..255)", path)
    # exactly one whitespace byte separates the header from the raster
    pos += 1
    expected = width * height
    payload = data[pos : pos + expected]
    if len(payload) < expected:
        raise PgmTruncatedError(f"expected {expected} raster bytes, found {len(payload)}", path)

    raster = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return ImageVector.from_raster(raster.astype(np.float64) / maxval, path)


def write_pgm(image: ImageVector, path: str | os.PathLike, maxval: int = 255) -> None:
    """Write pixels in [0, 1] as an 8-bit P5 file, rounding to the nearest level."""
    raster = np.clip(np.rint(image.raster() * maxval), 0, maxval).astype(np.uint8)
    header = f"P5\n{image.width} {image.height}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + raster.tobytes())


def load_gallery(root_dir: str | os.PathLike, *, min_classes: int = 2, min_per_class: int = 2) -> LabeledGallery:
    """Load ``<root>/<class>/<image>.pgm`` in sorted order.

    The minimum counts default to what LDA training needs; evaluation
    sets may relax them.
    """
    root = os.fspath(root_dir)
    if not os.path.isdir(root):
        raise GalleryError("not a directory", root)
    class_dirs = sorted(e.name for e in os.scandir(root) if e.is_dir())

    images: list[ImageVector] = []
    labels: list[str] = []
    classes: list[str] = []
    for name in class_dirs:
        class_dir = os.path.join(root, name)
        files = sorted(
            e.name for e in os.scandir(class_dir) if e.is_file() and e.name.lower().endswith(".pgm")
        )
        if len(files) < min_per_class:
            raise GalleryError(
                f"class '{name}' has {len(files)} image(s), at least {min_per_class} required", class_dir
            )
        if not files:
            continue
        classes.append(name)
        for fname in files:
            img = load_pgm(os.path.join(class_dir, fname))
            if images and (img.width, img.height) != (images[0].width, images[0].height):
                raise GalleryError(
                    f"heterogeneous dimensions: {img.width}x{img.height} vs "
                    f"{images[0].width}x{images[0].height}",
                    img.source_path,
                )
            images.append(img)
            labels.append(name)

    if len(classes) < min_classes:
        raise GalleryError(f"found {len(classes)} class(es), at least {min_classes} classes required", root)
    return LabeledGallery(images, labels, classes)


def data_matrix(gallery: LabeledGallery) -> np.ndarray:
    """N x p matrix with one image vector per column, in gallery order."""
    if not gallery.images:
        raise GalleryError("gallery is empty", "")
    return np.column_stack([img.pixels for img in gallery.images])
