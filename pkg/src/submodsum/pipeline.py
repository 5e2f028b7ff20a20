"""End-to-end summarization jobs: load, filter, build objective, solve, score."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .ground import DataError, GroundSet, build_kernel, filter_by_query, to_distance
from .io import load_ground_set
from .metrics import SegmentAnnotation, metric_report
from .objectives import (DISTANCE_KINDS, KINDS, DisparityMin, DisparityMinSum, DisparitySum,
                         FacilityLocation, FeatureBased, GraphCut, LogDet, Mixture, Modular,
                         ProbabilisticSetCover, SaturatedCoverage, SetCover)
from .optimizers import (BudgetSpec, CoverSpec, SummarySolution, dispersion_greedy,
                         greedy_budget, greedy_cover)


class EmptyQueryError(DataError):
    pass


def build_objective(gs: GroundSet, kind: str, params: Optional[dict] = None,
                    modalities=None, modality_weights=None, sparsify_k=None):
    """Instantiate objective ``kind`` over the data attached to ``gs``.

    Kernel and distance kinds use ``gs.kernel`` when present, otherwise a
    kernel built from ``modalities``. ``feature_based`` concatenates the
    named modalities' features (default: every histogram modality, since
    it needs nonnegative features).
    """
    params = dict(params or {})
    if kind not in KINDS:
        raise DataError(f"unknown function {kind!r}; choose from {sorted(KINDS)}")

    def kernel():
        if gs.kernel is not None and modalities is None and sparsify_k is None:
            return gs.kernel
        if not gs.modalities:
            raise DataError(f"{kind} needs feature modalities or a precomputed kernel")
        return build_kernel(gs, modalities, modality_weights, sparsify_k)

    if kind == "facility_location":
        return FacilityLocation(kernel())
    if kind == "saturated_coverage":
        return SaturatedCoverage(kernel(), alpha=params.get("alpha", 0.2))
    if kind == "graph_cut":
        return GraphCut(kernel(), lam=params.get("lambda", params.get("lam", 1.0)))
    if kind == "dpp_logdet":
        return LogDet(kernel(), jitter=params.get("jitter", 1e-6))
    if kind in DISTANCE_KINDS:
        d = to_distance(kernel())
        return {"disparity_min": DisparityMin, "disparity_sum": DisparitySum,
                "disparity_min_sum": DisparityMinSum}[kind](d)
    if kind == "feature_based":
        if modalities is None:
            names = [k for k, m in gs.modalities.items() if m.kind == "histogram"]
        else:
            names = list(modalities)
        if not names:
            raise DataError("feature_based needs a histogram modality or explicit --modalities")
        q = np.hstack([gs.modalities[m].values for m in names])
        return FeatureBased(q, psi=params.get("psi", "sqrt"))
    if kind == "set_cover":
        if gs.concepts is None:
            raise DataError("set_cover needs a concept table")
        return SetCover(gs.concepts)
    if kind == "prob_set_cover":
        if gs.concepts is None or gs.concepts.probabilities is None:
            raise DataError("prob_set_cover needs concept probabilities")
        return ProbabilisticSetCover(gs.concepts)
    if gs.importance is None:
        raise DataError("modular needs importance scores")
    return Modular(gs.importance)


@dataclass
class SummarizationJob:
    manifest: str
    function: str
    params: dict = field(default_factory=dict)
    modalities: Optional[list] = None
    modality_weights: Optional[list] = None
    sparsify_k: Optional[int] = None
    beta: float = 0.0
    mode: str = "budget"
    budget: Optional[BudgetSpec] = None
    cover: Optional[CoverSpec] = None
    lazy: bool = True
    query: Optional[str] = None
    relevance: Optional[str] = None
    threshold: float = 0.5
    annotations: Optional[str] = None
    output: Optional[str] = None
    optimizer: str = "auto"

    def __post_init__(self):
        if self.mode not in ("budget", "cover"):
            raise DataError(f"unknown mode {self.mode!r}")
        if self.mode == "budget" and self.budget is None:
            raise DataError("budget mode needs a budget")
        if self.mode == "cover" and self.cover is None:
            self.cover = CoverSpec()
        if self.query is not None and self.relevance is not None:
            raise DataError("give either a concept query or a relevance file, not both")
        if self.beta < 0:
            raise DataError("beta must be nonnegative")

    @classmethod
    def from_dict(cls, doc: dict, base: Path = Path(".")) -> "SummarizationJob":
        doc = dict(doc)
        doc.pop("version", None)
        for key in ("manifest", "annotations", "relevance", "output"):
            if doc.get(key) is not None:
                doc[key] = str(base / doc[key])
        if "budget" in doc and doc["budget"] is not None:
            b = doc["budget"]
            doc["budget"] = BudgetSpec(**b) if isinstance(b, dict) else BudgetSpec("cardinality", b)
        if "cover" in doc and doc["cover"] is not None:
            c = doc["cover"]
            doc["cover"] = CoverSpec(**c) if isinstance(c, dict) else CoverSpec(float(c))
            doc.setdefault("mode", "cover")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "SummarizationJob":
        path = Path(path)
        if not path.is_file():
            raise DataError(f"missing file: {path}")
        with open(path) as fh:
            return cls.from_dict(json.load(fh), path.parent)


def solve(f, gs: GroundSet, job: SummarizationJob) -> SummarySolution:
    if job.mode == "cover":
        return greedy_cover(f, gs, job.cover, lazy=job.lazy)
    spec = job.budget
    use_dispersion = job.optimizer == "dispersion" or (
        job.optimizer == "auto" and job.function in DISTANCE_KINDS and job.beta == 0
        and spec.mode == "cardinality" and int(spec.budget) >= 2)
    if use_dispersion:
        return dispersion_greedy(f, gs, min(int(spec.budget), gs.n))
    return greedy_budget(f, gs, spec, lazy=job.lazy)


def run_job(job: SummarizationJob):
    """Run ``job``; returns (solution in ground-set indices, report dict)."""
    full = load_ground_set(job.manifest)
    gs, keep = full, np.arange(full.n)
    if job.query is not None or job.relevance is not None:
        q = job.query if job.query is not None else Path(job.relevance)
        keep = filter_by_query(full, q, job.threshold)
        if keep.size == 0:
            raise EmptyQueryError("empty query ground set")
        gs = full.subset(keep)

    f = build_objective(gs, job.function, job.params, job.modalities, job.modality_weights,
                        job.sparsify_k)
    if job.beta > 0:
        if gs.importance is None:
            raise DataError("beta > 0 needs importance scores")
        f = Mixture([(1.0, f), (job.beta, Modular(gs.importance))])
    sol = solve(f, gs, job)

    # report positions in the unfiltered ground set
    sol.order = [int(keep[i]) for i in sol.order]
    report = sol.to_dict()
    report["function"] = job.function
    report["ground_size"] = int(gs.n)
    report["selected_ids"] = [full.item_ids[i] for i in sol.order]
    if job.annotations:
        ann = SegmentAnnotation.load(job.annotations, full.n)
        report["metrics"] = metric_report(sol.order, ann, full.concepts)
    if job.output:
        with open(job.output, "w") as fh:
            json.dump(report, fh, indent=1)
            fh.write("\n")
    return sol, report
