"""Rate-distortion optimised compression built on inpainting.

Sweeps mask density and quantisation depth for each quantiser, then
prints the lower envelope of the rate-distortion cloud: the best
reconstruction error achievable at or above each compression ratio.
Finally runs the budgeted optimiser for a target ratio of 20:1.
"""

import numpy as np

from qss import Image, mse, probabilistic_sparsify, rd_curve, rd_optimize


def make_image(side=32):
    x, y = np.meshgrid(np.linspace(0, 1, side), np.linspace(0, 1, side))
    px = 70 + 90 * x + 8 * y
    px[(x - 0.35) ** 2 + (y - 0.3) ** 2 < 0.05] = 200
    px[x + y > 1.45] = np.rint(90 - 40 * y[x + y > 1.45])
    return Image(side, side, np.rint(px).astype(np.int64).ravel())


def main():
    img = make_image()
    spath = probabilistic_sparsify(img, seed=7)
    curves = rd_curve(img, spath)

    print("rate-distortion envelopes (ratio : mse)")
    for method, data in curves.items():
        pairs = ["%.0f:%.0f" % (edge, best) for _, edge, best in data["envelope"]
                 if edge >= 5]
        print("  %-14s %s" % (method, "  ".join(pairs)))

    budget = 8.0 * img.size / 20.0
    point, rec = rd_optimize(img, spath, "sparsification", budget)
    print("\ntarget ratio 20:1 -> budget %.0f bits" % budget)
    print("chosen scales: l=%d (%d known pixels), m=%d (%d levels)"
          % (point.l, img.size - point.l, point.m, point.q_levels))
    print("achieved ratio %.1f:1 at mse %.2f"
          % (point.compression_ratio, mse(img, rec)))


if __name__ == "__main__":
    main()
