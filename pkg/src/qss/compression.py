"""Rate-distortion optimisation over mask scale l and quantisation scale m.

Coding cost is the idealised entropy-coder budget: known-pixel count times
the Shannon entropy of the known values, plus side information for the
quantisation table (a constant 8 bits for uniform quantisation, 8 bits per
stored grey value otherwise). Positions of the known data are not charged;
they are identical for all quantisation methods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import DomainError, Image, Mask, level_partition, mse
from .inpainting import InpaintSolver, round_to_grey
from .quantisation import (
    QuantisationPath,
    apply_path,
    sparsification_quant_path,
    uniform_path,
    ward_path,
)
from .sparsification import SparsificationPath

METHODS = ("uniform", "ward", "sparsification")

DEFAULT_DENSITIES = (1.0, 0.64, 0.32, 0.16, 0.08, 0.04, 0.02, 0.01)


class InfeasibleBudgetError(ValueError):
    """No (l, m) pair fits the bit budget."""

    def __init__(self, minimal_bits: float):
        super().__init__(
            "budget infeasible: minimal achievable cost is %.3f bits" % minimal_bits
        )
        self.minimal_bits = minimal_bits


@dataclass(frozen=True)
class CostModel:
    method: str
    per_value_bits: float
    n_known: int
    overhead_bits: float

    @property
    def total_bits(self) -> float:
        return self.n_known * self.per_value_bits + self.overhead_bits


@dataclass(frozen=True)
class RateDistortionPoint:
    l: int
    m: int
    q_levels: int
    total_bits: float
    mse: float
    compression_ratio: float


def coding_cost(known_values: np.ndarray, q_levels: int, method: str) -> CostModel:
    """Entropy-based bit budget for storing the known grey values."""
    if method not in METHODS:
        raise ValueError("unknown method %r" % method)
    if q_levels < 1:
        raise ValueError("q_levels must be >= 1")
    values = np.asarray(known_values).ravel()
    if values.size == 0:
        raise DomainError("empty known data")
    _, counts = np.unique(values, return_counts=True)
    p = counts / values.size
    per_value = float(-np.sum(p * np.log2(p)))
    overhead = 8.0 if method == "uniform" else 8.0 * q_levels
    return CostModel(method, per_value, int(values.size), overhead)


def default_l_grid(image_size: int, densities=DEFAULT_DENSITIES):
    """Mask scales corresponding to logarithmically spaced densities."""
    grid = sorted({image_size - math.ceil(d * image_size) for d in densities})
    return [l for l in grid if 0 <= l < image_size]


def build_quant_path(
    image: Image,
    mask: Mask,
    method: str,
    tolerance: float = 1e-9,
    candidate_limit: int | None = None,
) -> QuantisationPath:
    """Quantisation path for the known data of one mask."""
    if method == "uniform":
        return uniform_path(image.grey_depth)
    if method == "ward":
        return ward_path(level_partition(image, mask))
    if method == "sparsification":
        return sparsification_quant_path(image, mask, tolerance, candidate_limit)
    raise ValueError("unknown method %r" % method)


def evaluate_grid(
    image: Image,
    spars_path: SparsificationPath,
    method: str,
    l_grid,
    m_grid=None,
    tolerance: float = 1e-9,
    candidate_limit: int | None = None,
    budget: float = math.inf,
):
    """All rate-distortion points of one method over the (l, m) grid.

    Points over the bit budget are returned with mse = NaN (their
    reconstruction is never computed). Committed paths are rebuilt per l
    since the known values change with the mask.
    """
    points = []
    recs = []
    for l in l_grid:
        mask = spars_path.mask_at(l)
        solver = InpaintSolver(mask, image.width, image.height)
        path = build_quant_path(image, mask, method, tolerance, candidate_limit)
        ms = range(len(path) + 1) if m_grid is None else [
            m for m in m_grid if 0 <= m <= len(path)
        ]
        for m in ms:
            quantised = apply_path(image, mask, path, m)
            g = quantised.pixels[mask.indices]
            cost = coding_cost(g, len(path.initial_values) - m, method)
            ratio = 8.0 * image.size / cost.total_bits
            if cost.total_bits < budget:
                u = solver.solve(g, tolerance)
                rec = round_to_grey(u, image.width, image.height, image.grey_depth)
                err = mse(image, rec)
            else:
                rec, err = None, math.nan
            points.append(
                RateDistortionPoint(
                    l, m, len(path.initial_values) - m, cost.total_bits, err, ratio
                )
            )
            recs.append(rec)
    return points, recs


def rd_optimize(
    image: Image,
    spars_path: SparsificationPath,
    method: str,
    budget: float = math.inf,
    l_grid=None,
    tolerance: float = 1e-9,
    candidate_limit: int | None = None,
):
    """Best (l, m) under the budget; ties go to larger l, then larger m.

    Returns the winning point and its reconstruction.
    """
    if l_grid is None:
        l_grid = default_l_grid(image.size)
    if not l_grid:
        raise ValueError("empty l grid")
    points, recs = evaluate_grid(
        image, spars_path, method, l_grid, None, tolerance, candidate_limit, budget
    )
    best = None
    best_rec = None
    minimal = math.inf
    for point, rec in zip(points, recs):
        minimal = min(minimal, point.total_bits)
        if point.total_bits >= budget:
            continue
        # grid is scanned in ascending (l, m); replacing on equality
        # implements the larger-l, larger-m tie preference
        if best is None or point.mse <= best.mse:
            best, best_rec = point, rec
    if best is None:
        raise InfeasibleBudgetError(minimal)
    return best, best_rec


def rate_distortion_envelope(points, buckets_per_decade: int = 10):
    """Lower envelope over geometric compression-ratio buckets.

    For every bucket containing at least one point, reports the best MSE
    among all points whose ratio reaches the bucket's lower edge, which
    makes the envelope monotone by construction.
    """
    usable = [p for p in points if not math.isnan(p.mse)]
    buckets = sorted(
        {math.floor(buckets_per_decade * math.log10(p.compression_ratio)) for p in usable}
    )
    envelope = []
    for b in buckets:
        edge = 10 ** (b / buckets_per_decade)
        best = min(p.mse for p in usable if p.compression_ratio >= edge)
        envelope.append((b, edge, best))
    return envelope


def rd_curve(
    image: Image,
    spars_path: SparsificationPath,
    methods=METHODS,
    l_grid=None,
    m_grid=None,
    tolerance: float = 1e-9,
    buckets_per_decade: int = 10,
):
    """Per-method rate-distortion points and their envelopes."""
    if l_grid is None:
        l_grid = default_l_grid(image.size)
    curves = {}
    for method in methods:
        points, _ = evaluate_grid(image, spars_path, method, l_grid, m_grid, tolerance)
        curves[method] = {
            "points": points,
            "envelope": rate_distortion_envelope(points, buckets_per_decade),
        }
    return curves


def curve_csv(curves) -> str:
    """CSV of the envelopes: method, ratio, mse."""
    lines = ["method,ratio,mse"]
    for method, data in curves.items():
        for _, edge, best in data["envelope"]:
            lines.append("%s,%.6g,%.6g" % (method, edge, best))
    return "\n".join(lines) + "\n"
