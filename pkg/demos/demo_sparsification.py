"""Pick good inpainting masks by probabilistic sparsification.

Removes pixels one by one, always discarding candidates whose absence
hurts the reconstruction least. The resulting removal order is nested, so
one run yields masks at every density. Compares the optimised masks
against purely random ones of the same size.
"""

import numpy as np

from qss import Image, Mask, inpaint, mse, probabilistic_sparsify, round_to_grey


def make_image(side=32):
    x, y = np.meshgrid(np.linspace(0, 1, side), np.linspace(0, 1, side))
    px = 60 + 120 * x
    px[(x - 0.3) ** 2 + (y - 0.6) ** 2 < 0.05] = 220
    px[x + y > 1.5] = 20
    return Image(side, side, np.rint(px).astype(np.int64).ravel())


def reconstruction_error(img, mask):
    u = inpaint(img, mask)
    return mse(img, round_to_grey(u, img.width, img.height))


def main():
    img = make_image()
    path = probabilistic_sparsify(img, seed=42)
    rng = np.random.default_rng(0)

    print("density  optimised mse  random mse")
    for density in (0.2, 0.1, 0.05, 0.02):
        k = int(np.ceil(density * img.size))
        good = path.mask_at(img.size - k)
        rand = Mask(rng.choice(img.size, size=k, replace=False), img.size)
        print("  %4.0f%%  %13.2f  %10.2f"
              % (100 * density, reconstruction_error(img, good),
                 reconstruction_error(img, rand)))

    print("\nremoval order is a permutation of all %d pixels;" % img.size)
    print("mask_at(l) keeps the last %d survivors for any scale l" % img.size)


if __name__ == "__main__":
    main()
