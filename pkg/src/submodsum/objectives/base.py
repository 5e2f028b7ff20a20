from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class PrecomputeState:
    """Memoized statistics for one set X, owned by a single optimizer run."""

    selected: list
    mask: np.ndarray
    stats: dict = field(default_factory=dict)
    value: float = 0.0

    def __contains__(self, j) -> bool:
        return bool(self.mask[j])

    def __len__(self) -> int:
        return len(self.selected)


class Objective:
    """A set function over items ``0..n-1`` with naive and memoized gains.

    Subclasses implement ``_evaluate`` (full evaluation on an index array),
    ``_init_stats``, ``_gains`` (vectorized memoized gains for a batch of
    candidates) and ``_commit``.
    """

    kind = "abstract"
    monotone = False
    submodular = False
    supermodular = False

    def __init__(self, n: int):
        self.n = int(n)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"

    def _index(self, X) -> np.ndarray:
        idx = np.asarray(list(X) if not isinstance(X, np.ndarray) else X, dtype=np.intp).ravel()
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            bad = idx[(idx < 0) | (idx >= self.n)][0]
            raise IndexError(f"index {bad} out of range for ground set of size {self.n}")
        if np.unique(idx).size != idx.size:
            raise ValueError("duplicate indices in set")
        return idx

    def evaluate(self, X) -> float:
        idx = self._index(X)
        if idx.size == 0:
            return 0.0
        return float(self._evaluate(idx))

    def gain_naive(self, X, j: int) -> float:
        """f(X + j) - f(X) by two full evaluations."""
        idx = self._index(X)
        j = int(j)
        if np.any(idx == j):
            raise ValueError(f"item {j} already in set")
        return self.evaluate(np.append(idx, j)) - self.evaluate(idx)

    def init_state(self) -> PrecomputeState:
        return PrecomputeState([], np.zeros(self.n, dtype=bool), self._init_stats(), 0.0)

    def _check_candidates(self, state, cands) -> np.ndarray:
        cands = np.asarray(cands, dtype=np.intp).ravel()
        if cands.size and (cands.min() < 0 or cands.max() >= self.n):
            raise IndexError(f"candidate out of range for ground set of size {self.n}")
        if np.any(state.mask[cands]):
            j = int(cands[state.mask[cands]][0])
            raise ValueError(f"item {j} already in set")
        return cands

    def gains(self, state: PrecomputeState, cands) -> np.ndarray:
        """Memoized gains f(j | X) for every j in ``cands``."""
        cands = self._check_candidates(state, cands)
        if cands.size == 0:
            return np.zeros(0)
        return np.asarray(self._gains(state, cands), dtype=np.float64)

    def gain(self, state: PrecomputeState, j: int) -> float:
        return float(self.gains(state, [j])[0])

    def commit(self, state: PrecomputeState, j: int) -> PrecomputeState:
        """Advance ``state`` from X to X + j in place and return it."""
        j = int(j)
        g = self.gain(state, j)
        self._commit(state, j)
        state.selected.append(j)
        state.mask[j] = True
        state.value += g
        return state

    def state_value(self, state: PrecomputeState) -> float:
        """f(X) as carried by the memoized state."""
        return state.value

    # subclass hooks
    def _evaluate(self, idx: np.ndarray) -> float:
        raise NotImplementedError

    def _init_stats(self) -> dict:
        return {}

    def _gains(self, state: PrecomputeState, cands: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _commit(self, state: PrecomputeState, j: int) -> None:
        raise NotImplementedError

    @property
    def traits(self) -> dict:
        return {"monotone": self.monotone, "submodular": self.submodular,
                "supermodular": self.supermodular}


def chunked(cands: np.ndarray, n: int, budget: int = 1 << 22):
    """Split ``cands`` so each chunk touches at most ``budget`` kernel entries."""
    step = max(1, budget // max(n, 1))
    for start in range(0, cands.size, step):
        yield cands[start:start + step]


# thin functional surface mirroring the object methods
def evaluate(f: Objective, X) -> float:
    return f.evaluate(X)


def gain_naive(f: Objective, X, j: int) -> float:
    return f.gain_naive(X, j)


def init_state(f: Objective) -> PrecomputeState:
    return f.init_state()


def gain_memoized(f: Objective, state: PrecomputeState, j: int) -> float:
    return f.gain(state, j)


def commit(f: Objective, state: PrecomputeState, j: int) -> PrecomputeState:
    return f.commit(state, j)

