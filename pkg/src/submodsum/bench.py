"""Timing harness: greedy with memoized gains against greedy with full re-evaluation."""
from __future__ import annotations

import json
import logging
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .ground import ConceptTable, FeatureMatrix, GroundSet, build_kernel
from .objectives import KINDS
from .optimizers import BudgetSpec, greedy_budget
from .pipeline import build_objective
from .synthetic import clustered_with_outliers

log = logging.getLogger(__name__)

DEFAULT_BUDGETS = (5, 15, 30)
DPP_MAX_N = 2000
LABELS = {
    "facility_location": "Fac Loc", "saturated_coverage": "Sat Cov", "graph_cut": "Gr Cut",
    "feature_based": "Feat B", "set_cover": "Set Cov", "prob_set_cover": "PSC",
    "dpp_logdet": "DPP", "disparity_min": "DM", "disparity_sum": "DS",
    "disparity_min_sum": "DMS", "modular": "Mod",
}


class BenchError(RuntimeError):
    pass


def bench_ground_set(n: int, seed: int = 0) -> GroundSet:
    """Video-like timing data: one scene per ~120 frames plus rare outlier frames.

    Adds a nonnegative ``features`` modality for the feature-based function.
    """
    if n < 10:
        rng = np.random.default_rng(seed)
        emb = rng.normal(size=(n, 8))
        return GroundSet.from_arrays(
            n, modalities={"embedding": FeatureMatrix(emb, "embedding"),
                           "features": FeatureMatrix(np.abs(emb), "histogram")},
            concepts=ConceptTable.from_probabilities(["c0", "c1"], rng.random((n, 2))),
            importance=rng.random(n))
    scenes = max(1, n // 120)
    gs, _ = clustered_with_outliers(n=n, seed=seed, n_clusters=scenes,
                                    n_outliers=max(1, n // 100), dim=64)
    emb = gs.modalities["embedding"]
    return replace(gs, modalities={"embedding": emb,
                                   "features": FeatureMatrix(np.abs(emb.values), "histogram")})


def budget_items(n: int, pct: float) -> int:
    return int(min(n, max(1, round(n * pct / 100.0))))


def _objective(gs, kind, kernel):
    if kind == "feature_based":
        return build_objective(gs, kind, modalities=["features"])
    # one shared kernel for every kernel/distance kind
    with_kernel = replace(gs, kernel=kernel)
    if kind == "dpp_logdet":
        return build_objective(with_kernel, kind, params={"jitter": 1e-3})
    return build_objective(with_kernel, kind)


def run_cell(f, b: int, repeats: int = 1) -> dict:
    """Time both arms on one objective and budget."""
    spec = BudgetSpec("cardinality", b, stop_on_negative_gain=False)
    arms = {}
    for memo in (True, False):
        times, sol = [], None
        for _ in range(max(1, repeats)):
            sol = greedy_budget(f, None, spec, lazy=True, memoize=memo)
            times.append(sol.stats["wall_ms"] / 1e3)
        arms["memo" if memo else "no_memo"] = {
            "wall_s": statistics.median(times),
            "evals": sol.stats["evals"],
            "resorts": sol.stats["resorts"],
            "iterations": sol.stats["iterations"],
            "lazy": sol.stats["lazy"],
            "objective": sol.objective,
            "order": sol.order,
        }
    m, nm = arms["memo"], arms["no_memo"]
    return {
        "b": b,
        "memo": {k: v for k, v in m.items() if k != "order"},
        "no_memo": {k: v for k, v in nm.items() if k != "order"},
        "speedup": nm["wall_s"] / m["wall_s"] if m["wall_s"] > 0 else float("inf"),
        "identical": m["order"] == nm["order"],
        "order": m["order"],
    }


def _cell_job(args):
    n, seed, kind, pct, repeats, dpp_max_n = args
    gs = bench_ground_set(n, seed)
    kernel = build_kernel(gs, ["embedding"])
    f = _objective(gs, kind, kernel)
    return kind, pct, run_cell(f, budget_items(n, pct), repeats)


def run_bench(n: int, functions="all", budgets=DEFAULT_BUDGETS, repeats: int = 1, seed: int = 0,
              dpp_max_n: int = DPP_MAX_N, parallel: bool = False) -> dict:
    """Run every (function, budget %) cell in both arms; returns a JSON-ready report."""
    notes = []
    if functions == "all" or functions == ["all"]:
        kinds = [k for k in KINDS if k != "modular"]
        if n > dpp_max_n:
            kinds.remove("dpp_logdet")
            notes.append(f"dpp_logdet skipped at n={n} > --dpp-max-n={dpp_max_n}")
    else:
        kinds = list(functions)
        unknown = [k for k in kinds if k not in KINDS]
        if unknown:
            raise BenchError(f"unknown function {unknown[0]!r}")
        if "dpp_logdet" in kinds and n > dpp_max_n:
            raise BenchError(f"dpp_logdet refused at n={n}: log-det greedy is cubic in the "
                             f"summary size; raise --dpp-max-n (currently {dpp_max_n}) to force it")

    cells = []
    if parallel:
        workers = int(os.environ.get("SUBMOD_THREADS", os.cpu_count() or 1))
        jobs = [(n, seed, k, p, repeats, dpp_max_n) for k in kinds for p in budgets]
        with ProcessPoolExecutor(max_workers=max(1, workers)) as ex:
            results = list(ex.map(_cell_job, jobs))
    else:
        gs = bench_ground_set(n, seed)
        kernel = build_kernel(gs, ["embedding"])
        results = []
        for kind in kinds:
            f = _objective(gs, kind, kernel)
            for pct in budgets:
                log.info("bench %s at %s%%", kind, pct)
                results.append((kind, pct, run_cell(f, budget_items(n, pct), repeats)))
    for kind, pct, cell in results:
        cell.update(function=kind, budget_pct=pct)
        cells.append(cell)
    return {"version": 1, "n": n, "seed": seed, "repeats": repeats, "budgets": list(budgets),
            "cells": cells, "notes": notes,
            "all_identical": all(c["identical"] for c in cells)}


def format_table(report: dict) -> str:
    """Aligned text table: memoized seconds per budget, then unmemoized, then speedups."""
    budgets = report["budgets"]
    by = {(c["function"], c["budget_pct"]): c for c in report["cells"]}
    kinds = list(dict.fromkeys(c["function"] for c in report["cells"]))
    head = ["Function"] + [f"memo {p:g}%" for p in budgets] + [f"no-memo {p:g}%" for p in budgets] \
        + [f"x {p:g}%" for p in budgets]
    rows = [head]
    for k in kinds:
        row = [LABELS.get(k, k)]
        row += [f"{by[k, p]['memo']['wall_s']:.3f}" for p in budgets]
        row += [f"{by[k, p]['no_memo']['wall_s']:.3f}" for p in budgets]
        row += [f"{by[k, p]['speedup']:.1f}" for p in budgets]
        rows.append(row)
    widths = [max(len(r[i]) for r in rows) for i in range(len(head))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows]
    lines.insert(1, "-" * len(lines[0]))
    for note in report.get("notes", []):
        lines.append(f"note: {note}")
    return "\n".join(lines)


def write_report(report: dict, path) -> None:
    slim = dict(report)
    slim["cells"] = [{k: v for k, v in c.items() if k != "order"} for c in report["cells"]]
    with open(path, "w") as fh:
        json.dump(slim, fh, indent=1)
        fh.write("\n")
