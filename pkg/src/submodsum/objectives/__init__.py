"""Set functions with full evaluation, naive gains, and memoized gains."""
from .base import (Objective, PrecomputeState, commit, evaluate, gain_memoized, gain_naive,
                   init_state)
from .coverage import CONCAVE, FeatureBased, ProbabilisticSetCover, SetCover
from .diversity import DisparityMin, DisparityMinSum, DisparitySum, LogDet, NotPositiveDefinite
from .modular import Mixture, Modular
from .representation import FacilityLocation, GraphCut, SaturatedCoverage

KINDS = {
    cls.kind: cls
    for cls in (FacilityLocation, SaturatedCoverage, GraphCut, FeatureBased, SetCover,
                ProbabilisticSetCover, LogDet, DisparityMin, DisparitySum, DisparityMinSum,
                Modular)
}
KERNEL_KINDS = ("facility_location", "saturated_coverage", "graph_cut", "dpp_logdet")
DISTANCE_KINDS = ("disparity_min", "disparity_sum", "disparity_min_sum")

__all__ = [
    "Objective", "PrecomputeState", "evaluate", "gain_naive", "init_state", "gain_memoized",
    "commit", "FacilityLocation", "SaturatedCoverage", "GraphCut", "FeatureBased", "SetCover",
    "ProbabilisticSetCover", "LogDet", "DisparityMin", "DisparitySum", "DisparityMinSum",
    "Modular", "Mixture", "NotPositiveDefinite", "CONCAVE", "KINDS", "KERNEL_KINDS",
    "DISTANCE_KINDS",
]
