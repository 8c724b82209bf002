import numpy as np
import pytest

from qss import Image, Mask


def make_synthetic(size=64):
    """Piecewise-smooth test image: tilted ramp, flat disk, second smooth
    region and a dark box; 64x64 has ~117 occurring grey levels."""
    y, x = np.mgrid[0:size, 0:size] / (size - 1.0)
    vals = 70 + 90 * x + 8 * y
    vals = np.where((x - 0.35) ** 2 + (y - 0.3) ** 2 < 0.05, 200.0, vals)
    vals = np.where(x + y > 1.45, 90 - 40 * y, vals)
    vals = np.where((x > 0.15) & (x < 0.3) & (y > 0.55) & (y < 0.9), 5.0, vals)
    return Image.from_grid(np.clip(np.round(vals), 0, 255).astype(int))


def random_image(rng, max_side=32, max_levels=64, full_hull=True):
    """Random test image with power-of-two grey depth.

    With `full_hull`, values 0 and Q-1 are guaranteed to occur so that the
    occupied range spans the full depth (keeps the contrast check meaningful
    for pyramidal uniform paths).
    """
    q = int(rng.choice([2, 4, 8, 16, 32, 64]))
    w = int(rng.integers(2, max_side + 1))
    h = int(rng.integers(2, max_side + 1))
    px = rng.integers(0, q, w * h)
    if full_hull:
        px[0], px[1] = 0, q - 1
    return Image(w, h, px, grey_depth=q)


def random_mask(rng, image, lo=0.3, hi=0.9):
    density = rng.uniform(lo, hi)
    k = max(1, int(round(density * image.size)))
    return Mask(rng.choice(image.size, size=k, replace=False), image.size)


@pytest.fixture(scope="session")
def synthetic_image():
    return make_synthetic()
