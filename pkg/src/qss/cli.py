"""Command-line frontend.

Subcommands: sparsify, quantise, scalespace, compress. Exit codes:
0 success, 2 input error, 3 numerical failure, 4 infeasible budget.
All output files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile

import numpy as np

from . import compression, pgm, scale_space, sparsification
from .image import DomainError, Image, Mask
from .inpainting import InpaintingError
from .quantisation import PathError, apply_path, write_quant_path_file
from .sparsification import SparsificationPath

EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_INFEASIBLE = 4

_METHOD_ALIASES = {"spars": "sparsification"}


def _atomic_write_text(path, text: str) -> None:
    directory = os.path.dirname(os.fspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_image(path) -> Image:
    try:
        return pgm.load_pgm(path)
    except OSError as exc:
        raise SystemExit_with(EXIT_INPUT, "cannot read %s: %s" % (path, exc))
    except pgm.PgmError as exc:
        raise SystemExit_with(EXIT_INPUT, "invalid PGM %s: %s" % (path, exc))


class SystemExit_with(SystemExit):
    def __init__(self, code, message):
        print("error: %s" % message, file=sys.stderr)
        super().__init__(code)


def _parse_mask_arg(arg: str, image: Image) -> tuple[SparsificationPath, Mask, int]:
    """Parse 'pathfile@density' into (path, mask, scale)."""
    if "@" not in arg:
        raise SystemExit_with(EXIT_INPUT, "mask must be given as pathfile@density")
    file_part, density_part = arg.rsplit("@", 1)
    try:
        density = float(density_part)
    except ValueError:
        raise SystemExit_with(EXIT_INPUT, "bad mask density %r" % density_part)
    if not 0 < density <= 1:
        raise SystemExit_with(EXIT_INPUT, "mask density must be in (0, 1]")
    try:
        with open(file_part) as fh:
            path = sparsification.read_path_file(fh.read())
    except (OSError, ValueError) as exc:
        raise SystemExit_with(EXIT_INPUT, "cannot load mask path: %s" % exc)
    if path.image_size != image.size:
        raise SystemExit_with(EXIT_INPUT, "mask path size does not match image")
    scale = image.size - math.ceil(density * image.size)
    return path, path.mask_at(scale), scale


def cmd_sparsify(args) -> int:
    image = _load_image(args.input)
    try:
        path = sparsification.probabilistic_sparsify(
            image, args.p, args.q, args.density, args.seed
        )
    except InpaintingError as exc:
        raise SystemExit_with(EXIT_NUMERICAL, str(exc))
    except ValueError as exc:
        raise SystemExit_with(EXIT_INPUT, str(exc))
    _atomic_write_text(args.out, sparsification.write_path_file(path))
    if args.preview:
        target = image.size - math.ceil(args.density * image.size)
        mask = path.mask_at(target)
        preview = np.zeros(image.size, dtype=np.int64)
        preview[mask.indices] = 255
        pgm.save_pgm(args.preview, Image(image.width, image.height, preview))
    return 0


def _resolve_mask(args, image):
    if args.mask:
        spath, mask, scale = _parse_mask_arg(args.mask, image)
    else:
        spath, mask, scale = None, None, 0
    return spath, mask, scale


def cmd_quantise(args) -> int:
    image = _load_image(args.input)
    method = _METHOD_ALIASES.get(args.method, args.method)
    _, mask, _ = _resolve_mask(args, image)
    if method == "sparsification" and mask is None:
        raise SystemExit_with(EXIT_INPUT, "the sparsification method needs --mask")
    build_mask = mask if mask is not None else Mask.full(image.size)
    try:
        path = compression.build_quant_path(
            image, build_mask, method, candidate_limit=args.candidates
        )
    except InpaintingError as exc:
        raise SystemExit_with(EXIT_NUMERICAL, str(exc))
    available = len(path.initial_values)
    if not 1 <= args.levels <= available:
        raise SystemExit_with(
            EXIT_INPUT, "levels %d not in [1, %d]" % (args.levels, available)
        )
    quantised = apply_path(image, mask, path, available - args.levels)
    pgm.save_pgm(args.out + ".pgm", quantised)
    _atomic_write_text(args.out + ".qpath", write_quant_path_file(path))
    return 0


def cmd_scalespace(args) -> int:
    image = _load_image(args.input)
    method = _METHOD_ALIASES.get(args.method, args.method)
    _, mask, _ = _resolve_mask(args, image)
    if method == "sparsification" and mask is None:
        raise SystemExit_with(EXIT_INPUT, "the sparsification method needs --mask")
    build_mask = mask if mask is not None else Mask.full(image.size)
    try:
        path = compression.build_quant_path(image, build_mask, method)
        sequence = scale_space.generate(image, mask, path)
    except InpaintingError as exc:
        raise SystemExit_with(EXIT_NUMERICAL, str(exc))
    _atomic_write_text(args.report, scale_space.report_csv(sequence, mask, image))
    lyap = scale_space.verify_lyapunov_entropy(sequence, mask)
    print(
        "scalespace %s: %d steps, entropy %s"
        % (method, len(path), "ok" if lyap.passed else "VIOLATED")
    )
    if not lyap.passed:
        raise SystemExit_with(EXIT_NUMERICAL, "entropy Lyapunov check failed")
    return 0


def _format_manifest(items) -> str:
    lines = []
    for key, value in items:
        if isinstance(value, float):
            lines.append("%s=%.10g" % (key, value))
        else:
            lines.append("%s=%s" % (key, value))
    return "\n".join(lines) + "\n"


def cmd_compress(args) -> int:
    image = _load_image(args.input)
    method = _METHOD_ALIASES.get(args.method, args.method)
    if (args.budget is None) == (args.ratio is None):
        raise SystemExit_with(EXIT_INPUT, "give exactly one of --budget / --ratio")
    budget = args.budget if args.budget is not None else 8.0 * image.size / args.ratio
    try:
        spath = sparsification.probabilistic_sparsify(image, args.p, args.q, seed=args.seed)
        point, rec = compression.rd_optimize(
            image, spath, method, budget, candidate_limit=args.candidates
        )
    except compression.InfeasibleBudgetError as exc:
        raise SystemExit_with(EXIT_INFEASIBLE, str(exc))
    except InpaintingError as exc:
        raise SystemExit_with(EXIT_NUMERICAL, str(exc))
    mask = spath.mask_at(point.l)
    quantised = apply_path(
        image,
        mask,
        compression.build_quant_path(image, mask, method, candidate_limit=args.candidates),
        point.m,
    )
    cost = compression.coding_cost(
        quantised.pixels[mask.indices], point.q_levels, method
    )
    manifest = _format_manifest(
        [
            ("method", method),
            ("seed", args.seed),
            ("candidate_fraction", args.p),
            ("keep_fraction", args.q),
            ("budget_bits", float(budget)),
            ("approximate", "yes" if args.candidates is not None else "no"),
            ("l", point.l),
            ("m", point.m),
            ("q_levels", point.q_levels),
            ("n_known", cost.n_known),
            ("entropy_bits_per_value", cost.per_value_bits),
            ("overhead_bits", cost.overhead_bits),
            ("total_bits", point.total_bits),
            ("compression_ratio", point.compression_ratio),
            ("mse", point.mse),
        ]
    )
    _atomic_write_text(args.out, manifest)
    out_image = args.out_image or (os.path.splitext(args.out)[0] + ".pgm")
    pgm.save_pgm(out_image, rec)
    print("compress %s: l=%d m=%d ratio=%.2f mse=%.3f"
          % (method, point.l, point.m, point.compression_ratio, point.mse))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qss", description="quantisation scale-space toolbox"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sparsify", help="build a spatial sparsification path")
    p.add_argument("input")
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--p", type=float, default=0.02, help="candidate fraction")
    p.add_argument("--q", type=float, default=0.02, help="re-added fraction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--preview", help="write the target-density mask as PGM")
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("quantise", help="quantise an image to a level count")
    p.add_argument("input")
    p.add_argument("--method", choices=["uniform", "ward", "spars"], required=True)
    p.add_argument("--mask", help="sparsification path file as pathfile@density")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--candidates", type=int, help="restrict merge candidates per step")
    p.add_argument("--out", required=True, help="output prefix (.pgm and .qpath)")
    p.set_defaults(func=cmd_quantise)

    p = sub.add_parser("scalespace", help="emit per-step scale-space report")
    p.add_argument("input")
    p.add_argument("--method", choices=["uniform", "ward", "spars"], required=True)
    p.add_argument("--mask", help="sparsification path file as pathfile@density")
    p.add_argument("--report", required=True, help="CSV output file")
    p.set_defaults(func=cmd_scalespace)

    p = sub.add_parser("compress", help="rate-distortion optimised compression")
    p.add_argument("input")
    p.add_argument("--method", choices=["uniform", "ward", "spars"], required=True)
    p.add_argument("--budget", type=float, help="bit budget")
    p.add_argument("--ratio", type=float, help="target compression ratio")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.02)
    p.add_argument("--q", type=float, default=0.02)
    p.add_argument("--candidates", type=int)
    p.add_argument("--out", required=True, help="manifest output file")
    p.add_argument("--out-image", help="reconstruction PGM (default: manifest.pgm)")
    p.set_defaults(func=cmd_compress)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit_with as exc:
        return exc.code
    except (DomainError, PathError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    except InpaintingError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
