"""Diversity functions: log-determinant DPP and the three dispersion variants."""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from ..ground import DistanceMatrix, SimilarityKernel
from .base import Objective


class NotPositiveDefinite(ValueError):
    pass


class LogDet(Objective):
    """f(X) = log det(S_X + eps I); memoizes a growing Cholesky factor of S_X."""

    kind = "dpp_logdet"
    submodular = True

    def __init__(self, kernel, jitter: float = 1e-6):
        if isinstance(kernel, SimilarityKernel):
            kernel = kernel.dense()
        self.S = np.asarray(kernel, dtype=np.float64)
        self.jitter = float(jitter)
        self.diag = np.diag(self.S) + self.jitter
        super().__init__(self.S.shape[0])

    def _evaluate(self, idx):
        sub = self.S[np.ix_(idx, idx)] + self.jitter * np.eye(idx.size)
        try:
            L = np.linalg.cholesky(sub)
        except np.linalg.LinAlgError:
            raise NotPositiveDefinite(f"kernel restricted to {idx.tolist()} is not positive definite") from None
        return 2.0 * np.log(np.diag(L)).sum()

    def _init_stats(self):
        return {"L": np.zeros((0, 0))}

    def _schur(self, state, cands):
        L = state.stats["L"]
        if L.shape[0] == 0:
            return self.diag[cands], np.zeros((0, cands.size))
        cross = self.S[np.ix_(state.selected, cands)]
        c = solve_triangular(L, cross, lower=True, check_finite=False)
        return self.diag[cands] - np.einsum("ij,ij->j", c, c), c

    def _gains(self, state, cands):
        schur, _ = self._schur(state, cands)
        bad = schur <= 0
        if np.any(bad):
            j = int(cands[np.flatnonzero(bad)[0]])
            raise NotPositiveDefinite(f"non-positive Schur complement adding item {j}; "
                                      "kernel is not positive definite (raise jitter)")
        return np.log(schur)

    def _commit(self, state, j):
        schur, c = self._schur(state, np.array([j]))
        L = state.stats["L"]
        k = L.shape[0]
        grown = np.zeros((k + 1, k + 1))
        grown[:k, :k] = L
        grown[k, :k] = c[:, 0]
        grown[k, k] = np.sqrt(schur[0])
        state.stats["L"] = grown

    def state_value(self, state):
        return float(2.0 * np.log(np.diag(state.stats["L"])).sum())


def _as_distance(distances) -> np.ndarray:
    if isinstance(distances, DistanceMatrix):
        return distances.values
    return DistanceMatrix(distances).values


class DisparityMin(Objective):
    """f(X) = min over distinct pairs in X of d_kl (0 when |X| < 2)."""

    kind = "disparity_min"

    def __init__(self, distances):
        self.D = _as_distance(distances)
        super().__init__(self.D.shape[0])

    def _evaluate(self, idx):
        if idx.size < 2:
            return 0.0
        iu = np.triu_indices(idx.size, 1)
        return self.D[np.ix_(idx, idx)][iu].min()

    def _init_stats(self):
        return {"nearest": np.full(self.n, np.inf), "current": np.inf}

    def _gains(self, state, cands):
        k = len(state.selected)
        nearest = state.stats["nearest"][cands]
        if k == 0:
            return np.zeros(cands.size)
        if k == 1:
            return nearest
        cur = state.stats["current"]
        return np.minimum(cur, nearest) - cur

    def _commit(self, state, j):
        st = state.stats
        if state.selected:
            st["current"] = min(st["current"], st["nearest"][j])
        np.minimum(st["nearest"], self.D[j], out=st["nearest"])

    def state_value(self, state):
        return 0.0 if len(state.selected) < 2 else float(state.stats["current"])


class DisparitySum(Objective):
    """f(X) = sum over unordered pairs in X of d_kl. Supermodular."""

    kind = "disparity_sum"
    monotone = True
    supermodular = True

    def __init__(self, distances):
        self.D = _as_distance(distances)
        super().__init__(self.D.shape[0])

    def _evaluate(self, idx):
        iu = np.triu_indices(idx.size, 1)
        return self.D[np.ix_(idx, idx)][iu].sum()

    def _init_stats(self):
        return {"spread": np.zeros(self.n)}

    def _gains(self, state, cands):
        return state.stats["spread"][cands]

    def _commit(self, state, j):
        state.stats["spread"] += self.D[j]


class DisparityMinSum(Objective):
    """f(X) = sum_{k in X} min_{l in X, l != k} d_kl (0 when |X| < 2).

    Not declared submodular: the singleton convention alone breaks
    diminishing returns (f(j | {}) = 0 < f(j | {k}) = 2 d_jk).
    """

    kind = "disparity_min_sum"

    def __init__(self, distances):
        self.D = _as_distance(distances)
        super().__init__(self.D.shape[0])

    def _evaluate(self, idx):
        if idx.size < 2:
            return 0.0
        sub = np.array(self.D[np.ix_(idx, idx)])
        np.fill_diagonal(sub, np.inf)
        return sub.min(axis=1).sum()

    def _init_stats(self):
        # own: for members, distance to nearest other member; nearest: for everyone, to nearest member
        return {"own": np.full(self.n, np.inf), "nearest": np.full(self.n, np.inf)}

    def _current(self, state):
        if len(state.selected) < 2:
            return 0.0
        return state.stats["own"][state.selected].sum()

    def _gains(self, state, cands):
        sel = state.selected
        if not sel:
            return np.zeros(cands.size)
        own = state.stats["own"][sel]
        cross = self.D[np.ix_(sel, cands)]
        new = np.minimum(own[:, None], cross).sum(axis=0) + state.stats["nearest"][cands]
        return new - self._current(state)

    def _commit(self, state, j):
        st = state.stats
        sel = state.selected
        if sel:
            st["own"][sel] = np.minimum(st["own"][sel], self.D[sel, j])
        st["own"][j] = st["nearest"][j]
        np.minimum(st["nearest"], self.D[j], out=st["nearest"])

    def state_value(self, state):
        return float(self._current(state))
