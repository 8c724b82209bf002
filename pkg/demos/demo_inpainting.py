"""Reconstruct an image from scattered known pixels by harmonic inpainting.

Keeps a random subset of pixels at several densities, fills the rest by
solving the discrete Laplace equation with reflecting boundaries, and
reports the reconstruction error. Writes the densest reconstruction next
to this script as demo_inpainting_out.pgm.
"""

import os

import numpy as np

from qss import Image, Mask, inpaint, mse, round_to_grey, save_pgm


def main():
    side = 48
    x, y = np.meshgrid(np.linspace(0, 1, side), np.linspace(0, 1, side))
    px = np.rint(30 + 180 * (0.5 + 0.5 * np.tanh(8 * (x - y)))).astype(np.int64)
    img = Image(side, side, px.ravel())

    rng = np.random.default_rng(1)
    print("density   known   mse")
    best = None
    for density in (0.5, 0.2, 0.1, 0.05, 0.02):
        k = max(1, int(density * img.size))
        mask = Mask(rng.choice(img.size, size=k, replace=False), img.size)
        u = inpaint(img, mask)
        rec = round_to_grey(u, img.width, img.height)
        err = mse(img, rec)
        print("  %4.0f%%  %6d  %6.2f" % (100 * density, k, err))
        if best is None:
            best = rec

    out = os.path.join(os.path.dirname(__file__), "demo_inpainting_out.pgm")
    save_pgm(out, best)
    print("wrote", out)


if __name__ == "__main__":
    main()
