"""Greedy solvers for budgeted maximization and submodular cover.

All solvers break ties by the lowest item index, so the lazy and plain
variants select identical sequences on submodular objectives.
"""
from __future__ import annotations

import heapq
import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .objectives import DisparityMin, DisparityMinSum, DisparitySum, Objective

log = logging.getLogger(__name__)

CARDINALITY = "cardinality"
KNAPSACK = "knapsack"
ORACLE_MAX_N = 20
# ratios closer than this fraction of the largest first-step ratio count as ties
TIE_RELATIVE = 1e-9


@dataclass(frozen=True)
class BudgetSpec:
    mode: str = CARDINALITY
    budget: float = 1
    stop_on_negative_gain: Optional[bool] = None  # None: stop only for non-monotone objectives

    def __post_init__(self):
        if self.mode not in (CARDINALITY, KNAPSACK):
            raise ValueError(f"unknown budget mode {self.mode!r}")
        if not self.budget > 0:
            raise ValueError("budget must be positive")
        if self.mode == CARDINALITY and float(self.budget) != int(self.budget):
            raise ValueError("cardinality budget must be an integer")


@dataclass(frozen=True)
class CoverSpec:
    tau: float = 1.0
    tolerance: float = 1e-9

    def __post_init__(self):
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0, 1]")


@dataclass
class SummarySolution:
    order: list
    gains: list
    objective: float
    cost: float
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "order": [int(i) for i in self.order],
            "gains": [float(g) for g in self.gains],
            "objective": float(self.objective),
            "cost": float(self.cost),
            "stats": self.stats,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc: dict) -> "SummarySolution":
        return cls(list(doc["order"]), list(doc.get("gains", [])), float(doc.get("objective", 0.0)),
                   float(doc.get("cost", 0.0)), dict(doc.get("stats", {})))


def _costs(f: Objective, gs) -> np.ndarray:
    if gs is None:
        return np.ones(f.n)
    if gs.n != f.n:
        raise ValueError(f"objective covers {f.n} items but ground set has {gs.n}")
    return np.asarray(gs.costs, dtype=np.float64)


class _Tracker:
    """Selected set plus gain oracle; memoized or by full re-evaluation."""

    def __init__(self, f: Objective, memoize: bool):
        self.f = f
        self.memoize = memoize
        self.state = f.init_state()
        self.evals = 0

    @property
    def selected(self):
        return self.state.selected

    def gains(self, cands) -> np.ndarray:
        self.evals += len(cands)
        if self.memoize:
            # candidates come from the solver, already in range and unselected
            return self.f._gains(self.state, np.asarray(cands, dtype=np.intp))
        sel = list(self.state.selected)
        return np.array([self.f.gain_naive(sel, j) for j in cands], dtype=np.float64)

    def add(self, j: int) -> None:
        if self.memoize:
            self.f.commit(self.state, j)
        else:
            self.state.selected.append(j)
            self.state.mask[j] = True

    def value(self) -> float:
        if self.memoize:
            return self.f.state_value(self.state)
        return self.f.evaluate(self.state.selected)


def _tie_quantum(ratios) -> float:
    scale = float(np.max(np.abs(ratios))) if len(ratios) else 0.0
    if not scale > 0:
        return TIE_RELATIVE
    # power of two so both gain oracles land on the same grid
    return 2.0 ** math.floor(math.log2(TIE_RELATIVE * scale))


def _greedy(f, costs, capacity, *, lazy, memoize, stop_negative, target=None):
    """Ratio greedy until capacity, target value, or candidates run out.

    Candidates are ranked by floor(ratio / quantum) and then by lowest
    index, which keeps tie-breaking stable under float noise in the gains.
    """
    n = f.n
    tr = _Tracker(f, memoize)
    order, gains = [], []
    remaining = float(capacity)
    resorts = iterations = 0
    slack = 1e-12 * max(1.0, abs(remaining))
    singles = None

    def reached():
        return target is not None and tr.value() >= target

    if lazy:
        cands = np.flatnonzero(costs <= remaining + slack)
        g0 = tr.gains(cands)
        singles = (cands, g0)
        q = _tie_quantum(g0 / costs[cands])
        # entries: (-ratio key, index, step the bound was computed at, raw gain)
        heap = [(-math.floor(g / costs[j] / q), int(j), 0, g) for j, g in zip(cands, g0)]
        heapq.heapify(heap)
        step = 0
        while heap and not reached():
            picked = None
            while heap:
                negr, j, stamp, g = heapq.heappop(heap)
                if costs[j] > remaining + slack:
                    continue
                if stamp == step:
                    picked = (j, g)
                    break
                g = tr.gains([j])[0]
                resorts += 1
                heapq.heappush(heap, (-math.floor(g / costs[j] / q), j, step, g))
            if picked is None:
                break
            j, g = picked
            if stop_negative and g / costs[j] < 0:
                break
            tr.add(j)
            order.append(j)
            gains.append(float(g))
            remaining -= costs[j]
            step += 1
            iterations += 1
    else:
        mask = np.zeros(n, dtype=bool)
        q = None
        while not reached():
            cands = np.flatnonzero(~mask & (costs <= remaining + slack))
            if cands.size == 0:
                break
            g = tr.gains(cands)
            if singles is None:
                singles = (cands, g)
            ratio = g / costs[cands]
            if q is None:
                q = _tie_quantum(ratio)
            b = int(np.argmax(np.floor(ratio / q)))
            if stop_negative and ratio[b] < 0:
                break
            j = int(cands[b])
            tr.add(j)
            mask[j] = True
            order.append(j)
            gains.append(float(g[b]))
            remaining -= costs[j]
            iterations += 1
    return tr, order, gains, singles, {"iterations": iterations, "evals": tr.evals, "resorts": resorts}


def _solution(f, costs, order, gains, stats, t0) -> SummarySolution:
    stats = dict(stats)
    stats["wall_ms"] = (time.perf_counter() - t0) * 1e3
    return SummarySolution([int(j) for j in order], [float(g) for g in gains],
                           f.evaluate(order), float(costs[order].sum()) if order else 0.0, stats)


def greedy_budget(f: Objective, gs=None, spec: BudgetSpec = BudgetSpec(), lazy: bool = True,
                  memoize: bool = True) -> SummarySolution:
    """Maximize f under a cardinality or knapsack budget by the gain/cost ratio rule.

    In knapsack mode the result is the better of the greedy run and the best
    feasible singleton.
    """
    t0 = time.perf_counter()
    if f.n < 1:
        raise ValueError("empty ground set")
    costs = _costs(f, gs)
    run_costs = np.ones(f.n) if spec.mode == CARDINALITY else costs
    stop_negative = (not f.monotone) if spec.stop_on_negative_gain is None else spec.stop_on_negative_gain
    fallback = lazy and not f.submodular
    if fallback:
        log.info("lazy greedy needs a submodular objective; %s runs plain greedy", f.kind)
    stats = {"lazy": lazy and not fallback, "memoize": memoize, "lazy_fallback": fallback}

    if not np.any(run_costs <= spec.budget):
        stats.update(iterations=0, evals=0, resorts=0,
                     warning="budget is below every item cost")
        return _solution(f, costs, [], [], stats, t0)

    _, order, gains, singles, counts = _greedy(
        f, run_costs, spec.budget, lazy=lazy and not fallback, memoize=memoize,
        stop_negative=stop_negative)
    stats.update(counts)

    if spec.mode == KNAPSACK and singles is not None and len(singles[0]):
        cands, g0 = singles
        b = int(np.argmax(g0))
        if g0[b] > f.evaluate(order) and not (len(order) == 1 and order[0] == cands[b]):
            order, gains = [int(cands[b])], [float(g0[b])]
            stats["singleton_patch"] = True
    return _solution(f, costs, order, gains, stats, t0)


def greedy_cover(f: Objective, gs=None, spec: CoverSpec = CoverSpec(), lazy: bool = True,
                 memoize: bool = True) -> SummarySolution:
    """Grow X greedily until f(X) >= tau * f(V) (unit costs)."""
    t0 = time.perf_counter()
    if not f.monotone:
        raise ValueError(f"submodular cover needs a monotone objective; {f.kind} is not")
    costs = _costs(f, gs)
    full = f.evaluate(np.arange(f.n))
    target = spec.tau * full - spec.tolerance
    fallback = lazy and not f.submodular
    tr, order, gains, _, counts = _greedy(
        f, np.ones(f.n), math.inf, lazy=lazy and not fallback, memoize=memoize,
        stop_negative=False, target=target)
    if tr.value() < target:
        raise ValueError(f"cover target {target:g} unreachable (best {tr.value():g})")
    stats = {"lazy": lazy and not fallback, "memoize": memoize, "lazy_fallback": fallback,
             "target": target, "f_V": full, **counts}
    return _solution(f, costs, order, gains, stats, t0)


def dispersion_greedy(f: Objective, gs=None, b: int = 2) -> SummarySolution:
    """Farthest-point insertion for the dispersion objectives.

    Starts from the item with the largest total distance, then repeatedly
    adds the candidate farthest from the selection (min-distance for
    disparity_min / disparity_min_sum, summed distance for disparity_sum).
    """
    t0 = time.perf_counter()
    if not isinstance(f, (DisparityMin, DisparitySum, DisparityMinSum)):
        raise TypeError("dispersion_greedy needs a disparity objective")
    costs = _costs(f, gs)
    D = f.D
    n = f.n
    if b > n:
        raise ValueError(f"budget {b} exceeds ground set size {n}")
    if b < 2 and n >= 2:
        raise ValueError("dispersion needs a budget of at least 2")
    use_sum = isinstance(f, DisparitySum)

    state = f.init_state()
    order, gains = [], []
    score = D.sum(axis=1)
    first = int(np.argmax(score))
    chosen = np.zeros(n, dtype=bool)
    j = first
    evals = n
    for _ in range(b):
        if order:
            masked = np.where(chosen, -np.inf, score)
            j = int(np.argmax(masked))
            evals += n - len(order)
        gains.append(f.gain(state, j))
        f.commit(state, j)
        order.append(j)
        chosen[j] = True
        if use_sum:
            score = score + D[j] if len(order) > 1 else D[j].copy()
        else:
            score = D[j].copy() if len(order) == 1 else np.minimum(score, D[j])
    stats = {"iterations": len(order), "evals": evals, "resorts": 0, "lazy": False, "memoize": True}
    return _solution(f, costs, order, gains, stats, t0)


def exhaustive_oracle(f: Objective, gs=None, b: int = 1, max_n: int = ORACLE_MAX_N):
    """Best set of size <= b by brute-force enumeration (small n only)."""
    if f.n > max_n:
        raise ValueError(f"exhaustive oracle refuses n={f.n} > {max_n}")
    if gs is not None:
        _costs(f, gs)
    best, best_val = (), 0.0
    for size in range(1, min(int(b), f.n) + 1):
        for combo in itertools.combinations(range(f.n), size):
            v = f.evaluate(combo)
            if v > best_val:
                best, best_val = combo, v
    return best, best_val
