"""Core image type, level-set machinery and histogram metrics.

Images are rectangular grids of integer grey values stored row-major.
All metrics (entropy, contrast, MSE) are computed in double precision;
entropies are in bits (log base 2 throughout).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Empty or mismatched pixel domain."""


@dataclass(frozen=True)
class Image:
    """Grey-value image on a w x h grid, values in [0, grey_depth - 1]."""

    width: int
    height: int
    pixels: np.ndarray  # shape (width * height,), row-major
    grey_depth: int = 256

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        if self.grey_depth <= 0:
            raise ValueError("grey depth must be positive")
        px = np.ascontiguousarray(np.asarray(self.pixels, dtype=np.int64).ravel())
        if px.size != self.width * self.height:
            raise ValueError(
                "pixel count %d does not match %dx%d"
                % (px.size, self.width, self.height)
            )
        if px.size and (px.min() < 0 or px.max() > self.grey_depth - 1):
            raise ValueError("pixel values outside [0, %d]" % (self.grey_depth - 1))
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def size(self) -> int:
        return self.width * self.height

    def grid(self) -> np.ndarray:
        """Pixels reshaped to (height, width)."""
        return self.pixels.reshape(self.height, self.width)

    @classmethod
    def from_grid(cls, grid, grey_depth: int = 256) -> "Image":
        grid = np.asarray(grid)
        if grid.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls(grid.shape[1], grid.shape[0], grid.ravel(), grey_depth)

    def with_pixels(self, pixels) -> "Image":
        return Image(self.width, self.height, pixels, self.grey_depth)

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.grey_depth == other.grey_depth
            and np.array_equal(self.pixels, other.pixels)
        )


@dataclass(frozen=True)
class Mask:
    """Sorted set of known pixel indices within an image of `image_size` pixels."""

    indices: np.ndarray
    image_size: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        idx = np.unique(idx)  # sorted, duplicate-free
        if idx.size and (idx[0] < 0 or idx[-1] >= self.image_size):
            raise ValueError("mask indices outside [0, %d)" % self.image_size)
        idx.flags.writeable = False
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return int(self.indices.size)

    @classmethod
    def full(cls, image_size: int) -> "Mask":
        return cls(np.arange(image_size), image_size)

    @classmethod
    def from_bool(cls, known: np.ndarray) -> "Mask":
        known = np.asarray(known, dtype=bool).ravel()
        return cls(np.flatnonzero(known), known.size)

    def bool_array(self) -> np.ndarray:
        arr = np.zeros(self.image_size, dtype=bool)
        arr[self.indices] = True
        return arr

    def __eq__(self, other):
        if not isinstance(other, Mask):
            return NotImplemented
        return self.image_size == other.image_size and np.array_equal(
            self.indices, other.indices
        )


@dataclass(frozen=True)
class LevelPartition:
    """Occurring grey values with their (globally indexed) level sets."""

    values: np.ndarray  # strictly increasing
    sets: tuple  # one sorted index array per value
    domain_size: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "sets", tuple(self.sets))

    @property
    def counts(self) -> np.ndarray:
        return np.array([s.size for s in self.sets], dtype=np.int64)


def level_partition(image: Image, mask: Mask | None = None) -> LevelPartition:
    """Group the (masked) pixel indices by grey value."""
    if mask is None:
        idx = np.arange(image.size)
    else:
        if mask.image_size != image.size:
            raise DomainError("mask size does not match image")
        if len(mask) == 0:
            raise DomainError("empty domain")
        idx = mask.indices
    vals = image.pixels[idx]
    values = np.unique(vals)
    sets = tuple(idx[vals == v] for v in values)
    return LevelPartition(values, sets, idx.size)


def entropy(partition: LevelPartition) -> float:
    """Shannon entropy of the level-set histogram, in bits per pixel."""
    p = partition.counts / partition.domain_size
    return float(-np.sum(p * np.log2(p)))


def total_contrast(image: Image, mask: Mask | None = None) -> int:
    """Max minus min grey value over the considered pixels."""
    if mask is None:
        vals = image.pixels
    else:
        if mask.image_size != image.size:
            raise DomainError("mask size does not match image")
        if len(mask) == 0:
            raise DomainError("empty domain")
        vals = image.pixels[mask.indices]
    return int(vals.max() - vals.min())


def mse(a: Image, b: Image) -> float:
    """Mean squared error between two images of identical dimensions."""
    if a.width != b.width or a.height != b.height:
        raise DomainError("image dimensions differ")
    d = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    return float(np.mean(d * d))
