"""Command line interface.

Exit codes: 0 success, 1 identity check failed, 2 invalid input or usage,
3 metric not defined for the data.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__, io
from .analytic import ClosedFormInputs, augrc_closed_form
from .core import generalized_risk_curve, selective_risk_curve
from .errors import NotBinary, ScEvalError
from .metrics import METRICS, accuracy, augrc, get_metric, oc_auroc_f, pair_counts
from .ranking import DEFAULT_ALPHA, compare_rankings, evaluate_bootstrap, rank
from .stats import DEFAULT_B_SAMPLES, bootstrap_plan

log = logging.getLogger("sc_eval")

IDENTITY_TOL = 1e-10


def _load(args) -> io.ExperimentGrid:
    return io.load_records(args.input, fmt=args.format, variant=args.variant)


def _metric_value(name: str, es, review_fraction: float):
    if name == "oc_auroc_f":
        return oc_auroc_f(es, review_fraction)
    return get_metric(name).fn(es)


def cmd_metrics(args) -> int:
    grid = _load(args)
    out = io.ensure_dir(args.output_dir)
    names = args.metric or ["augrc", "aurc"]
    rows = []
    for csf in grid.csf_ids:
        for name in names:
            results = [_metric_value(name, es, args.review_fraction) for es in grid.runs[csf]]
            value = sum(r.value for r in results) / len(results)
            scale = results[0].scale_hint
            rows.append(
                [
                    csf,
                    name,
                    io.fmt_real(value),
                    scale,
                    io.fmt_real(value * scale),
                    f"{value * scale:.2f}",
                    ";".join(io.fmt_real(r.value) for r in results),
                ]
            )
            print(f"{csf:<20} {name:<12} {value * scale:>12.2f}  (x{scale})")
    io.write_csv(
        out / "metrics.csv",
        ["csf_id", "metric", "value", "scale", "scaled_value", "display", "per_run"],
        rows,
    )
    io.write_json(
        out / "provenance.json",
        io.provenance("metrics", [args.input], metrics=names, variant=args.variant,
                      review_fraction=args.review_fraction),
    )
    return 0


def cmd_curve(args) -> int:
    grid = _load(args)
    out = io.ensure_dir(args.output_dir)
    kinds = ["selective", "generalized"] if args.kind == "both" else [args.kind]
    builders = {"selective": selective_risk_curve, "generalized": generalized_risk_curve}
    written = []
    for csf in grid.csf_ids:
        run_ids = grid.run_ids.get(csf) or tuple(str(i) for i in range(len(grid.runs[csf])))
        for run, es in zip(run_ids, grid.runs[csf]):
            for kind in kinds:
                curve = builders[kind](es)
                name = f"curve_{io.safe_name(csf)}_{io.safe_name(run)}_{kind}.csv"
                io.write_curve(out / name, curve.coverage, curve.risk)
                written.append(name)
    io.write_json(out / "provenance.json", io.provenance("curve", [args.input], kind=args.kind,
                                                         variant=args.variant, files=written))
    for name in written:
        print(name)
    return 0


def _ranking(grid, metric: str, plan, alpha: float, threads):
    matrix = evaluate_bootstrap(grid, metric, plan, threads=threads)
    return matrix, rank(matrix, alpha)


def _write_ranking(out: Path, report, matrix) -> None:
    tag = io.safe_name(report.metric_name)
    io.write_json(out / f"ranking_{tag}.json", report.to_dict())
    io.write_significance_csv(out / f"significance_{tag}.csv", report.csf_ids, report.significance)
    io.write_csv(
        out / f"bootstrap_{tag}.csv",
        list(matrix.csf_ids),
        [[io.fmt_real(v) for v in row] for row in matrix.values],
    )


def _print_report(report) -> None:
    print(f"ranking by {report.metric_name} (alpha={report.alpha})")
    for i, csf in enumerate(report.order, start=1):
        print(f"  {i:>2}. {csf:<20} mean rank {report.rank_of(csf):.3f}")
    for w in report.warnings:
        print(f"  warning: {w}")


def cmd_rank(args, parser) -> int:
    grid = _load(args)
    if len(grid.csf_ids) < 2:
        parser.error("rank needs at least two CSFs")
    metric = (args.metric or ["augrc"])[0]
    out = io.ensure_dir(args.output_dir)
    plan = bootstrap_plan(grid.n, args.b_samples, args.seed)
    matrix, report = _ranking(grid, metric, plan, args.alpha, args.threads)
    _write_ranking(out, report, matrix)
    io.write_json(
        out / "provenance.json",
        io.provenance("rank", [args.input], metric=metric, b_samples=args.b_samples,
                      seed=args.seed, alpha=args.alpha, variant=args.variant),
    )
    _print_report(report)
    return 0


def cmd_compare(args, parser) -> int:
    metrics = args.metric or ["aurc", "augrc"]
    if len(metrics) != 2:
        parser.error("compare needs exactly two --metric options")
    grid = _load(args)
    if len(grid.csf_ids) < 2:
        parser.error("compare needs at least two CSFs")
    out = io.ensure_dir(args.output_dir)
    plan = bootstrap_plan(grid.n, args.b_samples, args.seed)
    reports = []
    for metric in metrics:
        matrix, report = _ranking(grid, metric, plan, args.alpha, args.threads)
        _write_ranking(out, report, matrix)
        reports.append(report)
        _print_report(report)
    summary = compare_rankings(reports[0], reports[1], args.top_k)
    io.write_json(out / "comparison.json", summary.to_dict())
    io.write_json(
        out / "provenance.json",
        io.provenance("compare", [args.input], metrics=metrics, b_samples=args.b_samples,
                      seed=args.seed, alpha=args.alpha, top_k=args.top_k, variant=args.variant),
    )
    verdict = "changed" if summary.top_k_changed else "unchanged"
    print(f"top-{args.top_k} {verdict}; kendall tau = {summary.kendall_tau:.4f}")
    return 0


def cmd_identity_check(args) -> int:
    """Check AUGRC against its accuracy/AUROC_f closed form on every set."""
    grid = _load(args)
    out = io.ensure_dir(args.output_dir)
    rows = []
    ok = True
    for csf in grid.csf_ids:
        run_ids = grid.run_ids.get(csf) or tuple(str(i) for i in range(len(grid.runs[csf])))
        for run, es in zip(run_ids, grid.runs[csf]):
            if not es.is_binary:
                raise NotBinary(f"identity check needs binary errors (csf {csf!r}, run {run!r})")
            acc = accuracy(es).value
            wins, n_correct, n_fail = pair_counts(es)
            # with a single class the AUROC_f term carries zero weight
            auc = wins / (n_correct * n_fail) if n_correct and n_fail else 1.0
            value = augrc(es).value
            expected = augrc_closed_form(ClosedFormInputs(acc, auc))
            diff = abs(value - expected)
            passed = diff <= args.tolerance
            ok &= passed
            has_ties = es.group_starts.size < es.n
            rows.append([csf, run, io.fmt_real(value), io.fmt_real(expected),
                         io.fmt_real(diff), int(has_ties), int(passed)])
            print(f"{csf:<20} {run:<8} augrc={value:.12f} closed={expected:.12f} "
                  f"diff={diff:.2e} {'ok' if passed else 'FAIL'}")
    io.write_csv(out / "identity.csv",
                 ["csf_id", "run_id", "augrc", "closed_form", "abs_diff", "has_ties", "passed"], rows)
    io.write_json(out / "provenance.json",
                  io.provenance("identity-check", [args.input], tolerance=args.tolerance,
                                variant=args.variant))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sc-eval", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="record file (csv or jsonl)")
    common.add_argument("--format", choices=["csv", "jsonl"], default=None,
                        help="input format; inferred from the suffix by default")
    common.add_argument("--variant", choices=["error", "labels"], default="error",
                        help="'labels' derives a 0/1 error from label and prediction columns")
    common.add_argument("--output-dir", default="sc_eval_output")
    metric_names = sorted(METRICS)

    p = sub.add_parser("metrics", parents=[common], help="scalar metrics per CSF")
    p.add_argument("--metric", action="append", choices=metric_names)
    p.add_argument("--review-fraction", type=float, default=0.005,
                   help="oracle review fraction for oc_auroc_f")

    p = sub.add_parser("curve", parents=[common], help="risk-coverage curve points per CSF and run")
    p.add_argument("--kind", choices=["selective", "generalized", "both"], default="both")

    boot = argparse.ArgumentParser(add_help=False)
    boot.add_argument("--b-samples", type=int, default=DEFAULT_B_SAMPLES)
    boot.add_argument("--seed", type=int, default=0)
    boot.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    boot.add_argument("--threads", type=int, default=None,
                      help="worker threads (default: $SC_EVAL_THREADS or CPU count)")

    p = sub.add_parser("rank", parents=[common, boot], help="bootstrap ranking with significance map")
    p.add_argument("--metric", action="append", choices=metric_names)

    p = sub.add_parser("compare", parents=[common, boot],
                       help="compare rankings under two metrics on one bootstrap plan")
    p.add_argument("--metric", action="append", choices=metric_names)
    p.add_argument("--top-k", type=int, default=3)

    p = sub.add_parser("identity-check", parents=[common],
                       help="check AUGRC against its accuracy/AUROC_f closed form")
    p.add_argument("--tolerance", type=float, default=IDENTITY_TOL)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "b_samples", 1) < 1:
        parser.error("--b-samples must be >= 1")
    try:
        if args.command == "metrics":
            return cmd_metrics(args)
        if args.command == "curve":
            return cmd_curve(args)
        if args.command == "rank":
            return cmd_rank(args, parser)
        if args.command == "compare":
            return cmd_compare(args, parser)
        return cmd_identity_check(args)
    except ScEvalError as exc:
        print(f"sc-eval: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"sc-eval: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
