"""Materialised quantisation scale-spaces and executable property checks.

Verifiers return structured per-step reports rather than booleans so the
same numbers can be dumped as CSV.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field

from .image import Image, Mask, entropy, level_partition, total_contrast
from .quantisation import QuantisationPath, apply_path, apply_steps

ENTROPY_TOL = 1e-12


def generate(image: Image, mask: Mask | None, path: QuantisationPath) -> list:
    """The family f^0 ... f^L of quantised images along the path."""
    images = [apply_path(image, mask, path, 0)]
    for m in range(1, len(path) + 1):
        images.append(apply_steps(images[-1], mask, path.steps[m - 1 : m]))
    return images


@dataclass
class LyapunovReport:
    entropies: list = field(default_factory=list)
    active_levels: list = field(default_factory=list)
    violations: list = field(default_factory=list)  # non-increase failures
    strict_violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations and not self.strict_violations


def verify_lyapunov_entropy(sequence, mask: Mask | None = None) -> LyapunovReport:
    """Check that entropy never increases and strictly drops on real merges.

    A merge of two non-empty level sets is visible as a drop in the number
    of occurring values; there the decrease must be strict. Steps touching
    an empty level set leave the histogram (and entropy) unchanged.
    """
    report = LyapunovReport()
    for img in sequence:
        part = level_partition(img, mask)
        report.entropies.append(entropy(part))
        report.active_levels.append(len(part.sets))
    for m in range(len(sequence) - 1):
        h0, h1 = report.entropies[m], report.entropies[m + 1]
        if h1 > h0 + ENTROPY_TOL:
            report.violations.append(m)
        both_nonempty = report.active_levels[m + 1] < report.active_levels[m]
        if both_nonempty and not h1 <= h0 - ENTROPY_TOL:
            report.strict_violations.append(m)
    return report


@dataclass
class BoundReport:
    values: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_maxmin(sequence, mask: Mask | None = None) -> BoundReport:
    """All scales stay within [min f^0, max f^0]."""
    report = BoundReport()
    first = sequence[0].pixels if mask is None else sequence[0].pixels[mask.indices]
    lo, hi = int(first.min()), int(first.max())
    for m, img in enumerate(sequence):
        vals = img.pixels if mask is None else img.pixels[mask.indices]
        report.values.append((int(vals.min()), int(vals.max())))
        if vals.min() < lo or vals.max() > hi:
            report.violations.append(m)
    return report


def verify_contrast_lyapunov(sequence, mask: Mask | None = None) -> BoundReport:
    """Total contrast is non-increasing along the sequence."""
    report = BoundReport()
    prev = None
    for m, img in enumerate(sequence):
        contrast = total_contrast(img, mask)
        report.values.append(contrast)
        if prev is not None and contrast > prev:
            report.violations.append(m - 1)
        prev = contrast
    return report


def verify_semigroup(
    image: Image, mask: Mask | None, path: QuantisationPath, l: int, n: int
) -> bool:
    """f^{l+n} from f^0 equals n further steps applied to f^l, exactly."""
    direct = apply_path(image, mask, path, l + n)
    staged = apply_path(image, mask, path, l)
    staged = apply_steps(staged, mask, path.steps[l : l + n])
    return direct == staged


def report_csv(sequence, mask: Mask | None = None, original: Image | None = None) -> str:
    """Per-step CSV: step, active_levels, entropy_bits, contrast, mse, pass flags.

    MSE is taken against the original over the considered domain (the mask
    when one is supplied, the whole image otherwise).
    """
    import numpy as np

    ref = original if original is not None else sequence[0]
    if mask is None:
        ref_vals = ref.pixels.astype(float)
    else:
        ref_vals = ref.pixels[mask.indices].astype(float)

    def _domain_mse(img):
        vals = img.pixels if mask is None else img.pixels[mask.indices]
        d = vals - ref_vals
        return float(np.mean(d * d))

    lyap = verify_lyapunov_entropy(sequence, mask)
    contrast = verify_contrast_lyapunov(sequence, mask)
    bounds = verify_maxmin(sequence, mask)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["step", "active_levels", "entropy_bits", "contrast", "mse",
         "entropy_ok", "contrast_ok", "maxmin_ok"]
    )
    for m, img in enumerate(sequence):
        writer.writerow(
            [
                m,
                lyap.active_levels[m],
                "%.12g" % lyap.entropies[m],
                contrast.values[m],
                "%.12g" % _domain_mse(img),
                int(m - 1 not in lyap.violations and m - 1 not in lyap.strict_violations),
                int(m - 1 not in contrast.violations),
                int(m not in bounds.violations),
            ]
        )
    return buf.getvalue()
