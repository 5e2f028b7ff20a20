"""Concept and feature coverage functions."""
from __future__ import annotations

import numpy as np

from ..ground import ConceptTable
from .base import Objective

CONCAVE = {
    "sqrt": np.sqrt,
    "log": np.log1p,
    "inverse": lambda x: x / (1.0 + x),
    "identity": lambda x: x,
}


class FeatureBased(Objective):
    """f(X) = sum_f psi(sum_{j in X} q_jf) over nonnegative item features ``q`` (n x |F|)."""

    kind = "feature_based"
    monotone = True
    submodular = True

    def __init__(self, features, psi: str = "sqrt"):
        q = np.asarray(features, dtype=np.float64)
        if q.ndim != 2:
            raise ValueError("features must be an n x |F| matrix")
        if np.any(q < 0) or not np.all(np.isfinite(q)):
            raise ValueError("feature_based needs finite nonnegative features")
        if psi not in CONCAVE:
            raise ValueError(f"unknown concave function {psi!r}; choose from {sorted(CONCAVE)}")
        self.q = q
        self.psi_name = psi
        self.psi = CONCAVE[psi]
        super().__init__(q.shape[0])

    def _evaluate(self, idx):
        return self.psi(self.q[idx].sum(axis=0)).sum()

    def _init_stats(self):
        return {"acc": np.zeros(self.q.shape[1])}

    def _gains(self, state, cands):
        acc = state.stats["acc"]
        return self.psi(self.q[cands] + acc).sum(axis=1) - self.psi(acc).sum()

    def _commit(self, state, j):
        state.stats["acc"] += self.q[j]

    def state_value(self, state):
        return float(self.psi(state.stats["acc"]).sum())


def _table(concepts, weights):
    if isinstance(concepts, ConceptTable):
        return concepts.incidence, concepts.weights if weights is None else weights, concepts.probabilities
    return np.asarray(concepts), weights, None


class SetCover(Objective):
    """f(X) = w(union of U_i for i in X), with U given as an n x m incidence matrix."""

    kind = "set_cover"
    monotone = True
    submodular = True

    def __init__(self, concepts, weights=None):
        inc, weights, _ = _table(concepts, weights)
        self.incidence = np.asarray(inc, dtype=bool)
        m = self.incidence.shape[1]
        self.weights = np.ones(m) if weights is None else np.asarray(weights, dtype=np.float64)
        if self.weights.shape != (m,) or np.any(self.weights < 0):
            raise ValueError("need m nonnegative concept weights")
        super().__init__(self.incidence.shape[0])

    def _evaluate(self, idx):
        # same arithmetic pattern as ProbabilisticSetCover so 0/1 data agrees bit for bit
        covered = self.incidence[idx].any(axis=0).astype(np.float64)
        return np.sum(self.weights * covered)

    def _init_stats(self):
        return {"covered": np.zeros(self.incidence.shape[1], dtype=bool)}

    def _gains(self, state, cands):
        fresh = self.incidence[cands] & ~state.stats["covered"]
        return fresh @ self.weights

    def _commit(self, state, j):
        state.stats["covered"] |= self.incidence[j]

    def state_value(self, state):
        return float(np.sum(self.weights * state.stats["covered"]))


class ProbabilisticSetCover(Objective):
    """f(X) = sum_u w_u [1 - prod_{k in X} (1 - p_ku)] over an n x m probability matrix."""

    kind = "prob_set_cover"
    monotone = True
    submodular = True

    def __init__(self, probabilities, weights=None):
        if isinstance(probabilities, ConceptTable):
            if probabilities.probabilities is None:
                raise ValueError("concept table has no probability matrix")
            weights = probabilities.weights if weights is None else weights
            probabilities = probabilities.probabilities
        p = np.asarray(probabilities, dtype=np.float64)
        if p.ndim != 2 or np.any(p < 0) or np.any(p > 1):
            raise ValueError("probabilities must be an n x m matrix in [0, 1]")
        self.p = p
        m = p.shape[1]
        self.weights = np.ones(m) if weights is None else np.asarray(weights, dtype=np.float64)
        if self.weights.shape != (m,) or np.any(self.weights < 0):
            raise ValueError("need m nonnegative concept weights")
        super().__init__(p.shape[0])

    def _evaluate(self, idx):
        miss = np.prod(1.0 - self.p[idx], axis=0)
        return np.sum(self.weights * (1.0 - miss))

    def _init_stats(self):
        return {"miss": np.ones(self.p.shape[1])}

    def _gains(self, state, cands):
        return self.p[cands] @ (self.weights * state.stats["miss"])

    def _commit(self, state, j):
        state.stats["miss"] *= 1.0 - self.p[j]

    def state_value(self, state):
        return float(np.sum(self.weights * (1.0 - state.stats["miss"])))
