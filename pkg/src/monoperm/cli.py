"""Command-line interface: ``monoperm {recover,ptr,simulate,metrics,hard-instance}``.

Exit codes: 0 success, 2 input or validation error, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .core import Permutation
from .errors import ConvergenceError, MonopermError
from .estimators import Method, estimate, estimate_blp, estimate_ptr
from .harness import ExperimentConfig, emit, emit_raw_csv, run_experiment
from .metrics import loss_report
from .models import hard_instance

log = logging.getLogger("monoperm")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def read_matrix(path, header: bool = False) -> np.ndarray:
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    except ValueError as exc:
        raise MonopermError(f"could not parse matrix CSV {path}: {exc}") from None
    return data


def read_permutation(path) -> Permutation:
    """Single column of 1-based indices; a header row is skipped.

    Files written by ``recover`` (with a ``column`` field) are accepted too.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise MonopermError(f"empty permutation file {path}")
    col = 0
    try:
        int(rows[0][0])
    except ValueError:
        head = [c.strip() for c in rows[0]]
        col = head.index("column") if "column" in head else 0
        rows = rows[1:]
    try:
        values = [int(r[col]) for r in rows]
    except (ValueError, IndexError):
        raise MonopermError(f"permutation file {path} must hold integer indices") from None
    return Permutation.from_one_based(values)


def write_permutation(path, perm: Permutation) -> None:
    Path(path).write_text("".join(f"{v}\n" for v in perm.one_based()))


def _sidecar(path, suffix: str) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}_{suffix}.csv")


def cmd_recover(args) -> int:
    y = read_matrix(args.input, args.header)
    out = estimate(y, args.method, tol=args.tol)
    perm = out.permutation
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["position", "column", "score"])
        for k, col in enumerate(perm.mapping):
            w.writerow([k + 1, int(col) + 1, repr(float(out.projection_scores[col]))])
    if out.projection_vector is not None:
        with open(_sidecar(args.output, "weights"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample", "weight"])
            for i, v in enumerate(out.projection_vector):
                w.writerow([i + 1, repr(float(v))])
    if out.degenerate:
        log.warning("degenerate input: all projection scores tie")
    return EXIT_OK


def cmd_ptr(args) -> int:
    y = read_matrix(args.input, args.header)
    order = estimate_blp(y).permutation if args.order == "auto" else read_permutation(args.order)
    base = "e" if args.log_base == "e" else float(args.log_base)
    ratios = estimate_ptr(y, order, base)
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample", "eptr"])
        for i, v in enumerate(ratios):
            w.writerow([i + 1, repr(float(v))])
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = ExperimentConfig.from_json(Path(args.config).read_text())
    result = run_experiment(config, parallelism=args.jobs)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "aggregates.csv").write_text(emit(result, "csv"))
    (outdir / "aggregates.json").write_text(emit(result, "json"))
    if "zero_one" in config.metrics:
        (outdir / "table.md").write_text(emit(result, "markdown_table"))
    if config.keep_raw:
        (outdir / "raw_losses.csv").write_text(emit_raw_csv(result))
    for g, msgs in sorted(result.errors.items()):
        for m in msgs:
            log.warning("grid point %d: %s", g, m)
    return EXIT_OK


def cmd_metrics(args) -> int:
    a, b = read_permutation(args.a), read_permutation(args.b)
    rep = loss_report(a, b, up_to_reversal=args.up_to_reversal)
    print(f"zero_one: {rep.zero_one}")
    print(f"kendall_tau: {rep.kendall_tau!r}")
    print(f"spearman_footrule: {rep.spearman_footrule!r}")
    if args.up_to_reversal:
        print(f"reversal_used: {str(rep.reversal_used).lower()}")
    return EXIT_OK


def cmd_hard_instance(args) -> int:
    kind = {"exact": "exact_lb", "partial": "partial_lb"}[args.kind]
    theta, perm = hard_instance(args.p, args.n, args.sigma, kind, which=args.which, t=args.t,
                                gap_scale=args.gap_scale)
    np.savetxt(args.output, theta, delimiter=",", fmt="%.17g")
    if args.perm_output:
        write_permutation(args.perm_output, perm)
    return EXIT_OK


def _positive_tol(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("tolerance must be a positive number")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monoperm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recover", help="estimate the column ordering of a matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--header", action="store_true", help="first CSV row is a header")
    p.add_argument("--method", choices=[m.value for m in Method], default="blp")
    p.add_argument("--tol", type=_positive_tol, default=1e-10)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("ptr", help="per-sample peak-to-trough ratios")
    p.add_argument("--input", required=True)
    p.add_argument("--header", action="store_true")
    p.add_argument("--order", required=True, help="permutation CSV, or 'auto' to run blp first")
    p.add_argument("--log-base", choices=["e", "2"], default="e")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_ptr)

    p = sub.add_parser("simulate", help="run a Monte Carlo experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", help="compare two permutations")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--up-to-reversal", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("hard-instance", help="write a lower-bound signal matrix")
    p.add_argument("--kind", choices=["exact", "partial"], required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--which", type=int, default=0)
    p.add_argument("--gap-scale", type=float, default=1.0)
    p.add_argument("--perm-output")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_hard_instance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (MonopermError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
