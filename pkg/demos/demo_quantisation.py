"""Compare the three grey-level quantisers at matched level counts.

Uniform merging halves the bin count regardless of content, the
clustering quantiser minimises the error on the known histogram, and the
sparsification quantiser minimises the error of the inpainted
reconstruction. All three produce valid scale-space paths.
"""

import numpy as np

from qss import (
    Image,
    Mask,
    apply_path,
    inpaint,
    level_partition,
    mse,
    round_to_grey,
    sparsification_quant_path,
    uniform_path,
    ward_path,
)


def main():
    rng = np.random.default_rng(8)
    side = 24
    x, y = np.meshgrid(np.linspace(0, 1, side), np.linspace(0, 1, side))
    px = np.rint(50 + 140 * x * y + rng.normal(0, 4, x.shape))
    img = Image(side, side, np.clip(px, 0, 255).astype(np.int64).ravel())

    mask = Mask(rng.choice(img.size, size=img.size // 5, replace=False), img.size)
    upath = uniform_path(img.grey_depth)
    wpath = ward_path(level_partition(img, mask))
    spath = sparsification_quant_path(img, mask)

    def rec_error(path, q):
        m = len(path.initial_values) - q
        quantised = apply_path(img, mask, path, m)
        u = inpaint(quantised, mask)
        return mse(img, round_to_grey(u, img.width, img.height))

    q_initial = len(wpath.initial_values)
    print("known pixels: %d of %d, %d occurring levels on the mask"
          % (len(mask), img.size, q_initial))
    print("\nlevels  uniform  cluster  sparsify   (mse of inpainted result)")
    for q in (32, 16, 8, 4, 2):
        if q > q_initial:
            continue
        print("  %4d  %7.1f  %7.1f  %8.1f"
              % (q, rec_error(upath, q), rec_error(wpath, q), rec_error(spath, q)))


if __name__ == "__main__":
    main()
