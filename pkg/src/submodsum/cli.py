"""Command-line entry point: summarize, cover, evaluate, bench, gen."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import DEFAULT_BUDGETS, DPP_MAX_N, format_table, run_bench, write_report
from .ground import DataError
from .io import load_ground_set
from .metrics import (CLUSTER, OUTLIER, SCENE, SegmentAnnotation, coverage_score, diversity_score,
                      query_cluster_score, representation_score)
from .optimizers import BudgetSpec, CoverSpec
from .pipeline import SummarizationJob, run_job
from .synthetic import SCENARIOS, generate_synthetic

METRICS = ("R", "C", "D", "M")
# errors raised by the library for bad data or requests; anything else is a bug
MODULE_ERRORS = (ValueError, RuntimeError, OSError, LookupError, TypeError)


def _csv(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _emit(doc, out):
    text = json.dumps(doc, indent=1)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _add_job_flags(p, cover_alias=False):
    p.add_argument("--job", help="JSON job file; other flags then only override output paths")
    p.add_argument("--manifest", help="ground set manifest JSON")
    p.add_argument("--function", help="objective kind, e.g. facility_location")
    p.add_argument("--param", action="append", type=_param, default=[], metavar="KEY=VALUE",
                   help="objective parameter (alpha, lambda, jitter, psi); repeatable")
    p.add_argument("--modalities", type=_csv, help="comma-separated modality names for the kernel")
    p.add_argument("--sparsify-k", type=int, help="keep k nearest neighbours per kernel row")
    p.add_argument("--beta", type=float, default=0.0, help="weight of the importance term")
    if not cover_alias:
        p.add_argument("--budget", type=float, help="item count, or total cost with --knapsack")
        p.add_argument("--knapsack", action="store_true", help="budget limits the summed item cost")
        p.add_argument("--keep-negative", action="store_true",
                       help="keep adding items after the best gain turns negative")
    p.add_argument("--cover-tau", type=float, default=1.0 if cover_alias else None,
                   help="cover mode: stop once f(X) >= tau * f(V)")
    lazy = p.add_mutually_exclusive_group()
    lazy.add_argument("--lazy", dest="lazy", action="store_true", default=True)
    lazy.add_argument("--no-lazy", dest="lazy", action="store_false")
    p.add_argument("--query", help="concept name selecting the query ground set")
    p.add_argument("--relevance", help="CSV of per-item relevance scores selecting the query ground set")
    p.add_argument("--threshold", type=float, default=0.5, help="relevance threshold (default 0.5)")
    p.add_argument("--annotations", help="segment annotation JSON; adds metrics to the report")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="submodsum", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_job_flags(sub.add_parser("summarize", help="budgeted or cover summarization"))
    _add_job_flags(sub.add_parser("cover", help="summarize in cover mode (default tau 1)"),
                   cover_alias=True)

    ev = sub.add_parser("evaluate", help="score a summary report")
    ev.add_argument("--summary", required=True, help="report JSON with an 'order' list")
    ev.add_argument("--annotations", help="segment annotation JSON (R, D, M)")
    ev.add_argument("--manifest", help="ground set manifest; its concept table feeds C")
    ev.add_argument("--metrics", type=_csv, default=list(METRICS), help="subset of R,C,D,M")
    ev.add_argument("--out")

    b = sub.add_parser("bench", help="memoized against unmemoized greedy timing")
    b.add_argument("--n", type=int, default=7200)
    b.add_argument("--functions", type=_csv, default=["all"])
    b.add_argument("--budgets", type=lambda s: [float(x) for x in _csv(s)],
                   default=list(DEFAULT_BUDGETS), help="percent of n, e.g. 5,15,30")
    b.add_argument("--repeats", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--dpp-max-n", type=int, default=DPP_MAX_N)
    b.add_argument("--parallel", action="store_true", help="run cells in worker processes")
    b.add_argument("--out", help="JSON report path; the text table goes next to it as .txt")

    g = sub.add_parser("gen", help="write a synthetic data bundle")
    g.add_argument("--scenario", choices=SCENARIOS, default="clustered_with_outliers")
    g.add_argument("--n", type=int, default=300)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output directory")
    return parser


def _job_from_args(args, parser) -> SummarizationJob:
    if args.job:
        job = SummarizationJob.load(args.job)
        for key in ("annotations", "out"):
            value = getattr(args, key)
            if value is not None:
                setattr(job, "output" if key == "out" else key, value)
        return job
    if not args.manifest or not args.function:
        parser.error("--manifest and --function are required without --job")
    budget_given = getattr(args, "budget", None) is not None
    if args.cover_tau is not None and budget_given:
        parser.error("give either --budget or --cover-tau")
    if args.cover_tau is None and not budget_given:
        parser.error("one of --budget or --cover-tau is required")
    common = dict(manifest=args.manifest, function=args.function, params=dict(args.param),
                  modalities=args.modalities, sparsify_k=args.sparsify_k, beta=args.beta,
                  lazy=args.lazy, query=args.query, relevance=args.relevance,
                  threshold=args.threshold, annotations=args.annotations, output=args.out)
    if args.cover_tau is not None:
        return SummarizationJob(mode="cover", cover=CoverSpec(args.cover_tau), **common)
    budget = BudgetSpec("knapsack" if args.knapsack else "cardinality", args.budget,
                        stop_on_negative_gain=False if args.keep_negative else None)
    return SummarizationJob(mode="budget", budget=budget, **common)


def cmd_summarize(args, parser) -> int:
    job = _job_from_args(args, parser)
    _, report = run_job(job)
    if not job.output:
        print(json.dumps(report, indent=1))
    return 0


def cmd_evaluate(args, parser) -> int:
    unknown = [m for m in args.metrics if m not in METRICS]
    if unknown:
        parser.error(f"unknown metric {unknown[0]!r}; choose from {','.join(METRICS)}")
    with open(args.summary) as fh:
        order = [int(i) for i in json.load(fh)["order"]]
    gs = load_ground_set(args.manifest) if args.manifest else None
    ann = None
    if args.annotations:
        ann = SegmentAnnotation.load(args.annotations, gs.n if gs is not None else None)
    needs = {"R": SCENE, "D": OUTLIER, "M": CLUSTER}
    out = {}
    for m in args.metrics:
        if m == "C":
            if gs is None or gs.concepts is None:
                raise DataError("metric C needs --manifest with a concept table")
            out["C"] = coverage_score(order, gs.concepts)
            continue
        if ann is None or not ann.has(needs[m]):
            raise DataError(f"metric {m} needs {needs[m]} segments in --annotations")
        out[m] = {"R": representation_score, "D": diversity_score,
                  "M": query_cluster_score}[m](order, ann)
    _emit({"version": 1, "metrics": out}, args.out)
    return 0


def cmd_bench(args, parser) -> int:
    report = run_bench(args.n, args.functions, args.budgets, args.repeats, args.seed,
                       args.dpp_max_n, args.parallel)
    table = format_table(report)
    print(table)
    if args.out:
        write_report(report, args.out)
        Path(args.out).with_suffix(".txt").write_text(table + "\n")
    if not report["all_identical"]:
        bad = [f"{c['function']}@{c['budget_pct']}%" for c in report["cells"] if not c["identical"]]
        raise RuntimeError(f"memoized and unmemoized arms selected different sets: {', '.join(bad)}")
    return 0


def cmd_gen(args, parser) -> int:
    path, ann = generate_synthetic(args.scenario, args.n, args.seed, args.out)
    print(json.dumps({"version": 1, "manifest": str(path), "segments": len(ann.segments)}))
    return 0


COMMANDS = {"summarize": cmd_summarize, "cover": cmd_summarize, "evaluate": cmd_evaluate,
            "bench": cmd_bench, "gen": cmd_gen}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, parser)
    except MODULE_ERRORS as exc:
        msg = " ".join(str(exc).split())
        print(json.dumps({"error": type(exc).__name__, "message": msg}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
