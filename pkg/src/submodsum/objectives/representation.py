"""Kernel-based representation functions: facility location, saturated coverage, graph cut."""
from __future__ import annotations

import numpy as np

from ..ground import SimilarityKernel
from .base import Objective, chunked


def _as_kernel(kernel) -> SimilarityKernel:
    return kernel if isinstance(kernel, SimilarityKernel) else SimilarityKernel(kernel)


class FacilityLocation(Objective):
    """f(X) = sum_i max_{k in X} s_ik.

    Memoizes the current best similarity of every item to the selection.
    """

    kind = "facility_location"
    monotone = True
    submodular = True

    def __init__(self, kernel):
        self.kernel = _as_kernel(kernel)
        super().__init__(self.kernel.n)

    def _evaluate(self, idx):
        return self.kernel.columns(idx).max(axis=1).sum()

    def _init_stats(self):
        return {"best": np.zeros(self.n)}

    def _gains(self, state, cands):
        best = state.stats["best"]
        out = np.empty(cands.size)
        pos = 0
        for chunk in chunked(cands, self.n):
            block = self.kernel.columns(chunk).T
            out[pos:pos + chunk.size] = np.maximum(block - best, 0.0).sum(axis=1)
            pos += chunk.size
        return out

    def _commit(self, state, j):
        np.maximum(state.stats["best"], self.kernel.column(j), out=state.stats["best"])

    def state_value(self, state):
        return float(state.stats["best"].sum())


class SaturatedCoverage(Objective):
    """f(X) = sum_i min(sum_{j in X} s_ij, alpha_i) with alpha_i = alpha * sum_{j in V} s_ij."""

    kind = "saturated_coverage"
    monotone = True
    submodular = True

    def __init__(self, kernel, alpha: float = 0.2):
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        self.kernel = _as_kernel(kernel)
        self.alpha = float(alpha)
        self.caps = self.alpha * self.kernel.row_sums()
        super().__init__(self.kernel.n)

    def _evaluate(self, idx):
        return np.minimum(self.kernel.columns(idx).sum(axis=1), self.caps).sum()

    def _init_stats(self):
        return {"mass": np.zeros(self.n)}

    def _gains(self, state, cands):
        mass = state.stats["mass"]
        base = np.minimum(mass, self.caps).sum()
        out = np.empty(cands.size)
        pos = 0
        for chunk in chunked(cands, self.n):
            block = self.kernel.columns(chunk).T + mass
            out[pos:pos + chunk.size] = np.minimum(block, self.caps).sum(axis=1) - base
            pos += chunk.size
        return out

    def _commit(self, state, j):
        state.stats["mass"] += self.kernel.column(j)

    def state_value(self, state):
        return float(np.minimum(state.stats["mass"], self.caps).sum())


class GraphCut(Objective):
    """f(X) = lam * sum_{i in V} sum_{j in X} s_ij - sum_{i, j in X} s_ij."""

    kind = "graph_cut"
    submodular = True

    def __init__(self, kernel, lam: float = 1.0):
        self.kernel = _as_kernel(kernel)
        self.lam = float(lam)
        self.totals = self.kernel.row_sums()
        self.diag = np.ones(self.kernel.n)
        super().__init__(self.kernel.n)

    def _evaluate(self, idx):
        return self.lam * self.totals[idx].sum() - self.kernel.submatrix(idx).sum()

    def _init_stats(self):
        return {"mass": np.zeros(self.n)}

    def _gains(self, state, cands):
        mass = state.stats["mass"]
        return self.lam * self.totals[cands] - 2.0 * mass[cands] - self.diag[cands]

    def _commit(self, state, j):
        state.stats["mass"] += self.kernel.column(j)
