"""Submodular subset selection for extractive, query and entity summarization."""
from .ground import (ConceptTable, DataError, DistanceMatrix, FeatureMatrix, GroundSet,
                     SimilarityKernel, build_kernel, filter_by_query, to_distance)
from .io import load_ground_set
from .metrics import (SegmentAnnotation, coverage_score, diversity_score, query_cluster_score,
                      representation_score)
from .objectives import (KINDS, DisparityMin, DisparityMinSum, DisparitySum, FacilityLocation,
                         FeatureBased, GraphCut, LogDet, Mixture, Modular, Objective,
                         ProbabilisticSetCover, SaturatedCoverage, SetCover, commit, evaluate,
                         gain_memoized, gain_naive, init_state)
from .optimizers import (BudgetSpec, CoverSpec, SummarySolution, dispersion_greedy,
                         exhaustive_oracle, greedy_budget, greedy_cover)

__version__ = "0.1.0"
