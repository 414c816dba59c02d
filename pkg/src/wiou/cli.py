"""Command-line entry point: ``wiou {eval,weights,gen-dataset,benchmark}``.

Exit codes: 0 success, 1 I/O or decode failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import benchmark as bench
from .boundary import DEFAULT_THETA
from .distance import NormKind, scene_distance_field
from .metrics import alpha_key, evaluate_pair
from .pngio import KITTI_PALETTE, LabelImageError, Palette, PaletteError, decode_label_image
from .weighting import DEFAULT_ALPHAS, check_alpha, export_weight_png, weight_map


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _alpha(text: str) -> float:
    try:
        return check_alpha(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _theta(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid theta {text!r}") from None
    if not v >= 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"theta must be a finite non-negative number, got {text}")
    return v


def _threads() -> int:
    raw = os.environ.get("WIOU_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"WIOU_THREADS must be an integer, got {raw!r}", 2) from None
    if n < 0:
        raise CliError("WIOU_THREADS must be >= 0", 2)
    return n


def _palette(path: str | None) -> Palette:
    if path is None:
        return KITTI_PALETTE
    try:
        return Palette.load(path)
    except OSError as e:
        raise CliError(f"{path}: {e.strerror or e}", 1) from None
    except PaletteError as e:
        raise CliError(f"{path}: {e}", 2) from None


def _load_map(path: str, palette: Palette):
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CliError(f"{path}: {e.strerror or e}", 1) from None
    try:
        return decode_label_image(data, palette)
    except PaletteError as e:
        raise CliError(f"{path}: {e}", 2) from None
    except LabelImageError as e:
        raise CliError(f"{path}: {e}", 1) from None


def _write(path: Path, data: str | bytes) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(data, bytes):
            path.write_bytes(data)
        else:
            path.write_text(data)
    except OSError as e:
        raise CliError(f"{path}: {e.strerror or e}", 1) from None


def cmd_eval(args) -> int:
    palette = _palette(args.palette)
    gt = _load_map(args.gt, palette)
    pred = _load_map(args.pred, palette)
    if gt.shape != pred.shape:
        raise CliError(
            f"dimension mismatch: {args.gt} is {gt.width}x{gt.height}, "
            f"{args.pred} is {pred.width}x{pred.height}", 2)
    report = evaluate_pair(gt, pred, args.alpha or [1.0], args.theta, args.norm,
                           args.connectivity, class_names=palette.names)
    if args.out:
        out = Path(args.out)
        _write(out, report.to_csv() if args.format == "csv" else report.to_json())
    print(report.summary_line())
    return 0


def cmd_weights(args) -> int:
    palette = _palette(args.palette)
    gt = _load_map(args.gt, palette)
    dfield = scene_distance_field(gt, args.norm, args.connectivity)
    out = Path(args.out)
    for a in args.alpha or [1.0]:
        path = out / f"weights_a{alpha_key(a)}.png"
        _write(path, export_weight_png(weight_map(dfield, a)))
        print(path)
    return 0


def cmd_gen_dataset(args) -> int:
    try:
        root = bench.build_dataset(args.out, args.seed, args.levels)
    except OSError as e:
        raise CliError(f"{args.out}: {e.strerror or e}", 1) from None
    print(f"wrote {2 * args.levels + 1} variants x 3 scenes to {root}")
    return 0


def cmd_benchmark(args) -> int:
    dataset_dir = Path(args.dataset)
    if args.generate:
        try:
            bench.build_dataset(dataset_dir, args.seed)
        except OSError as e:
            raise CliError(f"{dataset_dir}: {e.strerror or e}", 1) from None
    try:
        items, specs, _ = bench.read_dataset(dataset_dir)
    except (OSError, KeyError, ValueError) as e:
        raise CliError(f"{dataset_dir}: cannot read dataset ({e})", 1) from None
    alphas = args.alpha or list(DEFAULT_ALPHAS)
    matrix, rows = bench.run_benchmark(items, alphas, args.theta, args.norm, args.connectivity,
                                       threads=_threads())
    triplet = None
    if specs and args.error_count > 0:
        triplet = bench.run_triplet(specs[0], args.error_count, alphas, args.theta, args.norm,
                                    args.connectivity)
    try:
        bench.write_benchmark(args.out, matrix, rows, triplet)
    except OSError as e:
        raise CliError(f"{args.out}: {e.strerror or e}", 1) from None
    for r in rows:
        print(f"{r['scene']}/{r['variant']} mIoU={r['IoU']:.12g} "
              + " ".join(f"mwIoU[a={alpha_key(a)}]={r[f'wIoU@{alpha_key(a)}']:.12g}" for a in alphas)
              + f" edgeF1={r['edgeF1']:.12g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wiou", description="Boundary-weighted IoU evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def metric_flags(p, alpha_help):
        p.add_argument("--alpha", type=_alpha, action="append", help=alpha_help)
        p.add_argument("--norm", type=NormKind.parse, default=NormKind.L2,
                       metavar="{l1,l2,linf}", help="distance norm (default l2)")
        p.add_argument("--connectivity", type=int, choices=(4, 8), default=4)

    p = sub.add_parser("eval", help="score one prediction against its ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--palette", help="palette JSON (default: built-in KITTI colors)")
    metric_flags(p, "boundary importance factor, repeatable (default 1)")
    p.add_argument("--theta", type=_theta, default=DEFAULT_THETA)
    p.add_argument("--out", help="report file")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("weights", help="write weight-map PNGs for a ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--palette")
    metric_flags(p, "boundary importance factor, repeatable (default 1)")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("gen-dataset", help="write the synthetic 33-pair dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--levels", type=int, default=5, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("benchmark", help="compare metrics over a generated dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--generate", action="store_true", help="build the dataset first")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    metric_flags(p, "boundary importance factor, repeatable (default 0.01 0.1 1 10 100)")
    p.add_argument("--theta", type=_theta, default=DEFAULT_THETA)
    p.add_argument("--error-count", type=int, default=bench.DEFAULT_ERROR_COUNT,
                   help="error pixels per equal-error triplet member (0 to skip)")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"wiou {args.command}: {e}", file=sys.stderr)
        return e.code
    except ValueError as e:
        print(f"wiou {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
