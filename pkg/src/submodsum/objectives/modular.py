"""Modular importance scores and weighted mixtures of objectives."""
from __future__ import annotations

import numpy as np

from .base import Objective, PrecomputeState


class Modular(Objective):
    """f(X) = sum of per-item scores over X."""

    kind = "modular"
    monotone = True
    submodular = True

    def __init__(self, scores):
        w = np.asarray(scores, dtype=np.float64).ravel()
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("modular scores must be finite and nonnegative")
        self.scores = w
        super().__init__(w.size)

    def _evaluate(self, idx):
        return self.scores[idx].sum()

    def _gains(self, state, cands):
        return self.scores[cands]

    def _commit(self, state, j):
        pass


class Mixture(Objective):
    """Nonnegative weighted sum of objectives, each with its own memoized state.

    Typical use is ``Mixture([(1.0, f), (beta, Modular(importance))])``.
    """

    kind = "mixture"

    def __init__(self, terms):
        terms = [(float(w), f) for w, f in terms]
        if not terms:
            raise ValueError("empty mixture")
        if any(w < 0 for w, _ in terms):
            raise ValueError("mixture weights must be nonnegative")
        sizes = {f.n for _, f in terms}
        if len(sizes) != 1:
            raise ValueError("mixture components disagree on ground set size")
        self.terms = terms
        self.monotone = all(f.monotone for _, f in terms)
        self.submodular = all(f.submodular for _, f in terms)
        self.supermodular = all(f.supermodular for _, f in terms)
        super().__init__(sizes.pop())

    def __repr__(self):
        return "Mixture(" + " + ".join(f"{w:g}*{f.kind}" for w, f in self.terms) + ")"

    def _evaluate(self, idx):
        return sum(w * f.evaluate(idx) for w, f in self.terms)

    def init_state(self) -> PrecomputeState:
        state = super().init_state()
        state.stats["parts"] = [f.init_state() for _, f in self.terms]
        return state

    def _gains(self, state, cands):
        parts = state.stats["parts"]
        return sum(w * f.gains(s, cands) for (w, f), s in zip(self.terms, parts))

    def _commit(self, state, j):
        for (_, f), s in zip(self.terms, state.stats["parts"]):
            f.commit(s, j)

    def state_value(self, state):
        return float(sum(w * f.state_value(s) for (w, f), s in zip(self.terms, state.stats["parts"])))
