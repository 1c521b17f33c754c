"""Command-line driver: batch evaluation, synthetic sweeps, and self-checks.

Exit codes: 0 success, 1 usage error, 2 malformed or unreadable input data,
3 self-check property violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

from . import io as segio
from .errors import InvalidKError, SegrandError
from .metrics import MetricReport, aggregate, evaluate_pair
from .selfcheck import run_selfcheck
from .synth import GridSpec, prediction_at, sweep_curves

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROPERTY = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for data errors
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _usage(message: str) -> int:
    print(f"segrand: error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _parse_background(spec: str) -> frozenset[int]:
    spec = spec.strip()
    if not spec or spec.lower() == "none":
        return frozenset()
    try:
        return frozenset(int(tok) for tok in spec.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad background id list {spec!r}") from None


def _default_threads() -> int:
    raw = os.environ.get("SEGRAND_THREADS", "").strip()
    if not raw:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(_usage(f"SEGRAND_THREADS must be an integer, got {raw!r}"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="segrand", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="score (truth, prediction) label-map pairs")
    p_eval.add_argument("--manifest", type=Path, help="CSV manifest: sample_id,truth,pred")
    p_eval.add_argument("--truth", type=Path, help="single ground-truth label map")
    p_eval.add_argument("--pred", type=Path, help="single predicted label map")
    p_eval.add_argument(
        "--background-ids",
        type=_parse_background,
        default=frozenset({0}),
        metavar="IDS",
        help="comma-separated truth labels treated as background (default: 0; '' for none)",
    )
    p_eval.add_argument(
        "--fg",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="compute foreground-masked metrics (default: on)",
    )
    p_eval.add_argument(
        "--global",
        dest="global_metrics",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="compute metrics over all pixels (default: off)",
    )
    p_eval.add_argument("--group-by", choices=("none", "objects"), default="none")
    p_eval.add_argument("--out", type=Path, help="output path (default: stdout)")
    p_eval.add_argument("--format", choices=("csv", "json"), default="csv")
    mode = p_eval.add_mutually_exclusive_group()
    mode.add_argument("--per-sample", action="store_true", help="write one row per sample")
    mode.add_argument("--summary-only", action="store_true", help="write only the aggregate summary")
    p_eval.add_argument("--threads", type=int, default=None, metavar="N",
                        help="worker threads; 0 = auto (default: $SEGRAND_THREADS or 0)")
    p_eval.add_argument("--strict", action="store_true",
                        help="abort the batch on the first sample failure")
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="merge/split degradation sweep on a checkerboard")
    p_sweep.add_argument("--grid", type=int, nargs=2, default=[4, 4], metavar=("R", "C"))
    p_sweep.add_argument("--cell", type=int, nargs=2, default=[16, 16], metavar=("H", "W"))
    p_sweep.add_argument("--k-min", type=int, default=1)
    p_sweep.add_argument("--k-max", type=int, default=40)
    p_sweep.add_argument("--out", type=Path, help="output path (default: stdout)")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--emit-maps", type=Path, metavar="DIR",
                         help="also write every generated prediction as PGM into DIR")
    p_sweep.set_defaults(func=cmd_sweep)

    p_check = sub.add_parser("selfcheck", help="validate the closed forms against brute force")
    p_check.add_argument("--instances", type=int, default=250)
    p_check.add_argument("--max-pixels", type=int, default=64)
    p_check.add_argument("--seed", type=int, default=0)
    p_check.set_defaults(func=cmd_selfcheck)
    return parser


def _resolve_entries(args) -> list[segio.ManifestEntry]:
    if args.manifest is not None:
        if args.truth is not None or args.pred is not None:
            raise SystemExit(_usage("--manifest conflicts with --truth/--pred"))
        manifest = segio.read_manifest(args.manifest)
        return list(manifest.entries)
    if args.truth is None or args.pred is None:
        raise SystemExit(_usage("need either --manifest or both --truth and --pred"))
    return [segio.ManifestEntry(sample_id=args.truth.stem, truth_path=args.truth,
                                pred_path=args.pred)]


def _evaluate_entry(entry: segio.ManifestEntry, args) -> MetricReport:
    truth = segio.read_label_map(entry.truth_path)
    pred = segio.read_label_map(entry.pred_path)
    return evaluate_pair(
        truth,
        pred,
        background_ids=args.background_ids,
        compute_fg=args.fg,
        compute_global=args.global_metrics,
    )


def cmd_eval(args) -> int:
    if not args.fg and not args.global_metrics:
        return _usage("nothing to compute: both --no-fg and --no-global given")
    if args.per_sample and args.group_by == "objects":
        return _usage("--per-sample conflicts with --group-by objects")
    threads = args.threads if args.threads is not None else _default_threads()
    if threads < 0:
        return _usage(f"--threads must be >= 0, got {threads}")
    workers = threads if threads > 0 else (os.cpu_count() or 1)

    try:
        entries = _resolve_entries(args)
    except SegrandError as exc:
        print(f"segrand eval: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA

    results: list[Optional[MetricReport]] = [None] * len(entries)
    failures: list[tuple[str, Exception]] = []

    if workers == 1 or args.strict or len(entries) == 1:
        for index, entry in enumerate(entries):
            try:
                results[index] = _evaluate_entry(entry, args)
            except (SegrandError, TypeError, ValueError) as exc:
                failures.append((entry.sample_id, exc))
                print(f"sample {entry.sample_id}: {type(exc).__name__}: {exc}", file=sys.stderr)
                if args.strict:
                    return EXIT_DATA
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_evaluate_entry, entry, args) for entry in entries]
            for index, (entry, future) in enumerate(zip(entries, futures)):
                try:
                    results[index] = future.result()
                except (SegrandError, TypeError, ValueError) as exc:
                    failures.append((entry.sample_id, exc))
                    print(f"sample {entry.sample_id}: {type(exc).__name__}: {exc}",
                          file=sys.stderr)

    scored = [
        (entry.sample_id, report)
        for entry, report in zip(entries, results)
        if report is not None
    ]
    summary_mode = args.summary_only or args.group_by == "objects"
    if summary_mode:
        if not scored:
            print("segrand eval: no samples could be scored", file=sys.stderr)
            return EXIT_DATA
        group_by = "truth_object_count" if args.group_by == "objects" else "none"
        payload = aggregate([rep for _, rep in scored], group_by=group_by)
    else:
        payload = scored

    try:
        if args.out is None:
            sys.stdout.write(segio.render_report(payload, args.format))
        else:
            segio.write_report(payload, args.out, args.format)
    except SegrandError as exc:
        print(f"segrand eval: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_DATA if failures else EXIT_OK


def cmd_sweep(args) -> int:
    try:
        spec = GridSpec(
            grid_rows=args.grid[0],
            grid_cols=args.grid[1],
            cell_height=args.cell[0],
            cell_width=args.cell[1],
        )
    except ValueError as exc:
        return _usage(str(exc))
    try:
        curve = sweep_curves(spec, k_min=args.k_min, k_max=args.k_max)
    except InvalidKError as exc:
        return _usage(str(exc))

    try:
        if args.emit_maps is not None:
            args.emit_maps.mkdir(parents=True, exist_ok=True)
            for row in curve.rows:
                pred = prediction_at(spec, row.k)
                segio.write_label_map(pred, args.emit_maps / f"pred_k{row.k:04d}.pgm", "pgm")
        if args.out is None:
            sys.stdout.write(segio.render_report(curve, args.format))
        else:
            segio.write_report(curve, args.out, args.format)
    except SegrandError as exc:
        print(f"segrand sweep: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    if args.instances < 1:
        return _usage(f"--instances must be >= 1, got {args.instances}")
    if args.max_pixels < 2:
        return _usage(f"--max-pixels must be >= 2, got {args.max_pixels}")
    violation = run_selfcheck(args.instances, max_pixels=args.max_pixels, seed=args.seed)
    if violation is not None:
        print(f"segrand selfcheck: FAIL\n{violation}", file=sys.stderr)
        return EXIT_PROPERTY
    print(
        f"segrand selfcheck: OK ({args.instances} instances, "
        f"max {args.max_pixels} pixels, seed {args.seed})"
    )
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)


def entrypoint() -> None:
    sys.exit(main())
