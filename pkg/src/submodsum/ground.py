"""Ground set, ingested item data, and similarity/distance construction."""
from __future__ import annotations

from dataclasses import dataclass, field
from os import PathLike
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp

EMBEDDING = "embedding"
HISTOGRAM = "histogram"


class DataError(ValueError):
    """Raised when ingested data violates a ground-set invariant."""


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray
    kind: str = EMBEDDING

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DataError("feature matrix must be 2-D")
        if self.kind not in (EMBEDDING, HISTOGRAM):
            raise DataError(f"unknown feature kind {self.kind!r}")
        if not np.all(np.isfinite(values)):
            raise DataError("non-finite value in feature matrix")
        if self.kind == HISTOGRAM and np.any(values < 0):
            raise DataError("histogram features must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1]

    def take(self, idx) -> "FeatureMatrix":
        return FeatureMatrix(self.values[idx], self.kind)


@dataclass(frozen=True)
class ConceptTable:
    """Per-item concept labels with concept weights and optional soft probabilities.

    ``incidence`` is the n x m boolean matrix of hard labels: entry (i, u) is
    set when concept u belongs to U_i.
    """

    names: tuple
    incidence: np.ndarray
    weights: Optional[np.ndarray] = None
    probabilities: Optional[np.ndarray] = None
    threshold: float = 0.5

    def __post_init__(self):
        names = tuple(self.names)
        if len(set(names)) != len(names):
            raise DataError("concept names must be unique")
        m = len(names)
        inc = np.asarray(self.incidence, dtype=bool)
        if inc.ndim != 2 or inc.shape[1] != m:
            raise DataError(f"incidence must be n x {m}")
        w = np.ones(m) if self.weights is None else np.asarray(self.weights, dtype=np.float64)
        if w.shape != (m,) or not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DataError("concept weights must be m finite nonnegative reals")
        p = self.probabilities
        if p is not None:
            p = np.asarray(p, dtype=np.float64)
            if p.shape != inc.shape:
                raise DataError("row-count mismatch: probabilities vs labels")
            if not np.all(np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
                raise DataError("concept probabilities must lie in [0, 1]")
            if not np.array_equal(inc, p >= self.threshold):
                raise DataError("hard labels disagree with thresholded probabilities")
            p.setflags(write=False)
        inc.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "incidence", inc)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def from_labels(cls, names, items: Sequence[Sequence[str]], weights=None) -> "ConceptTable":
        names = list(names)
        pos = {name: u for u, name in enumerate(names)}
        inc = np.zeros((len(items), len(names)), dtype=bool)
        for i, labels in enumerate(items):
            for label in labels:
                if label not in pos:
                    raise DataError(f"item {i} references unknown concept {label!r}")
                inc[i, pos[label]] = True
        return cls(names, inc, weights)

    @classmethod
    def from_probabilities(cls, names, probabilities, weights=None, threshold: float = 0.5) -> "ConceptTable":
        p = np.asarray(probabilities, dtype=np.float64)
        return cls(names, p >= threshold, weights, p, threshold)

    @property
    def n(self) -> int:
        return self.incidence.shape[0]

    @property
    def m(self) -> int:
        return len(self.names)

    def labels(self, i: int) -> frozenset:
        """Concept indices U_i of item ``i``."""
        return frozenset(np.flatnonzero(self.incidence[i]).tolist())

    def take(self, idx) -> "ConceptTable":
        p = None if self.probabilities is None else self.probabilities[idx]
        return ConceptTable(self.names, self.incidence[idx], self.weights, p, self.threshold)


class SimilarityKernel:
    """Symmetric n x n similarity matrix with entries in [0, 1] and unit diagonal.

    Backed by a dense ndarray or a scipy CSR matrix (absent entries are 0).
    """

    def __init__(self, matrix, check: bool = True):
        if sp.issparse(matrix):
            matrix = sp.csr_matrix(matrix, dtype=np.float64)
            matrix.sort_indices()
        else:
            matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DataError("kernel must be square")
        self.matrix = matrix
        if check:
            self._check()
        if not self.is_sparse:
            self.matrix.setflags(write=False)

    def _check(self, tol: float = 1e-12):
        m = self.matrix
        if self.is_sparse:
            vals = m.data
            diag = m.diagonal()
            asym = abs(m - m.T).max() if m.nnz else 0.0
        else:
            vals = m
            diag = np.diag(m)
            asym = np.max(np.abs(m - m.T)) if m.size else 0.0
        if not np.all(np.isfinite(vals)):
            raise DataError("non-finite kernel entry")
        if np.any(vals < 0) or np.any(vals > 1):
            raise DataError("kernel entries must lie in [0, 1]")
        if not np.all(diag == 1.0):
            raise DataError("kernel diagonal must be 1")
        if asym > tol:
            raise DataError("kernel must be symmetric")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    symmetric = True

    def column(self, j: int) -> np.ndarray:
        # symmetric, so row j doubles as column j and is contiguous
        if self.is_sparse:
            return self.matrix.getrow(j).toarray().ravel()
        return self.matrix[j]

    def columns(self, idx) -> np.ndarray:
        """Dense n x len(idx) block of the given columns."""
        idx = np.asarray(idx, dtype=np.intp)
        if self.is_sparse:
            return self.matrix[idx].toarray().T
        return self.matrix[idx].T

    def submatrix(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.intp)
        if self.is_sparse:
            return self.matrix[idx][:, idx].toarray()
        return self.matrix[np.ix_(idx, idx)]

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else self.matrix

    def take(self, idx) -> "SimilarityKernel":
        idx = np.asarray(idx, dtype=np.intp)
        if self.is_sparse:
            return SimilarityKernel(self.matrix[idx][:, idx], check=False)
        return SimilarityKernel(self.matrix[np.ix_(idx, idx)], check=False)


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.values, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise DataError("distance matrix must be square")
        if np.any(np.diag(d) != 0) or np.any(d < 0) or np.any(d > 1):
            raise DataError("distances must lie in [0, 1] with zero diagonal")
        d.setflags(write=False)
        object.__setattr__(self, "values", d)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class GroundSet:
    """The universe of selectable items and everything attached to them."""

    item_ids: tuple
    costs: np.ndarray
    modalities: Mapping[str, FeatureMatrix] = field(default_factory=dict)
    concepts: Optional[ConceptTable] = None
    importance: Optional[np.ndarray] = None
    kernel: Optional[SimilarityKernel] = None

    def __post_init__(self):
        n = len(self.item_ids)
        if n < 1:
            raise DataError("ground set must contain at least one item")
        costs = np.asarray(self.costs, dtype=np.float64)
        if costs.shape != (n,):
            raise DataError(f"row-count mismatch: {costs.shape[0] if costs.ndim else 0} costs for {n} items")
        if not np.all(np.isfinite(costs)):
            raise DataError("non-finite cost")
        if np.any(costs <= 0):
            raise DataError(f"non-positive cost at item {int(np.flatnonzero(costs <= 0)[0])}")
        costs.setflags(write=False)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "item_ids", tuple(self.item_ids))
        mods = dict(self.modalities)
        for name, fm in mods.items():
            if not isinstance(fm, FeatureMatrix):
                fm = mods[name] = FeatureMatrix(fm)
            if fm.rows != n:
                raise DataError(f"row-count mismatch: modality {name!r} has {fm.rows} rows, expected {n}")
        object.__setattr__(self, "modalities", mods)
        if self.concepts is not None and self.concepts.n != n:
            raise DataError(f"row-count mismatch: concept table has {self.concepts.n} rows, expected {n}")
        if self.importance is not None:
            imp = np.asarray(self.importance, dtype=np.float64)
            if imp.shape != (n,):
                raise DataError(f"row-count mismatch: importance has {imp.size} rows, expected {n}")
            if not np.all(np.isfinite(imp)) or np.any(imp < 0):
                raise DataError("importance scores must be finite and nonnegative")
            imp.setflags(write=False)
            object.__setattr__(self, "importance", imp)
        if self.kernel is not None and self.kernel.n != n:
            raise DataError(f"row-count mismatch: kernel is {self.kernel.n}x{self.kernel.n}, expected {n}")

    @classmethod
    def from_arrays(cls, n: Optional[int] = None, *, item_ids=None, costs=None, modalities=None,
                    concepts=None, importance=None, kernel=None) -> "GroundSet":
        """Convenience constructor; unspecified ids and costs get defaults."""
        if n is None:
            for src in (modalities and next(iter(modalities.values())), importance, costs, kernel, concepts):
                if src is None:
                    continue
                if isinstance(src, FeatureMatrix):
                    n = src.rows
                elif isinstance(src, (SimilarityKernel, ConceptTable)):
                    n = src.n
                else:
                    n = len(src)
                break
        if n is None:
            raise DataError("cannot infer ground set size")
        if kernel is not None and not isinstance(kernel, SimilarityKernel):
            kernel = SimilarityKernel(kernel)
        return cls(
            item_ids=tuple(str(i) for i in range(n)) if item_ids is None else item_ids,
            costs=np.ones(n) if costs is None else costs,
            modalities=modalities or {},
            concepts=concepts,
            importance=importance,
            kernel=kernel,
        )

    @property
    def n(self) -> int:
        return len(self.item_ids)

    def subset(self, idx) -> "GroundSet":
        """Restrict every attached structure to the items ``idx`` (order kept)."""
        idx = np.asarray(idx, dtype=np.intp)
        return GroundSet(
            item_ids=tuple(self.item_ids[i] for i in idx),
            costs=self.costs[idx],
            modalities={k: v.take(idx) for k, v in self.modalities.items()},
            concepts=None if self.concepts is None else self.concepts.take(idx),
            importance=None if self.importance is None else self.importance[idx],
            kernel=None if self.kernel is None else self.kernel.take(idx),
        )


def _cosine_term(x: np.ndarray, item_names) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1)
    bad = np.flatnonzero(norms == 0)
    if bad.size:
        raise DataError(f"zero-norm feature row at item {item_names[bad[0]]!r}")
    xn = x / norms[:, None]
    return (xn @ xn.T + 1.0) / 2.0


def _correlation_term(h: np.ndarray) -> np.ndarray:
    centered = h - h.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centered, axis=1)
    flat = norms == 0
    safe = np.where(flat, 1.0, norms)
    z = centered / safe[:, None]
    term = (z @ z.T + 1.0) / 2.0
    if flat.any():
        # zero-variance rows: 1 against an identical row, otherwise uncorrelated
        for i in np.flatnonzero(flat):
            same = np.all(h == h[i], axis=1)
            term[i, :] = np.where(same, 1.0, 0.5)
            term[:, i] = term[i, :]
    return term


def build_kernel(gs: GroundSet, modality_names: Optional[Sequence[str]] = None,
                 weights: Optional[Sequence[float]] = None,
                 sparsify_k: Optional[int] = None) -> SimilarityKernel:
    """Weighted average of per-modality similarities mapped into [0, 1].

    Embeddings contribute ``(cos + 1) / 2``; histograms contribute
    ``(pearson + 1) / 2``. With ``sparsify_k`` each row keeps its k largest
    off-diagonal entries and the result is symmetrized by elementwise max.
    """
    if modality_names is None:
        modality_names = list(gs.modalities)
    modality_names = list(modality_names)
    if not modality_names:
        raise DataError("no modalities to build a kernel from")
    if weights is None:
        weights = [1.0] * len(modality_names)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (len(modality_names),):
        raise DataError("need one weight per modality")
    if np.any(weights < 0) or not np.any(weights > 0):
        raise DataError("modality weights must be nonnegative with at least one positive")
    missing = [m for m in modality_names if m not in gs.modalities]
    if missing:
        raise DataError(f"unknown modality {missing[0]!r}")

    total = weights.sum()
    k = np.zeros((gs.n, gs.n))
    for name, w in zip(modality_names, weights):
        if w == 0:
            continue
        fm = gs.modalities[name]
        if fm.kind == EMBEDDING:
            term = _cosine_term(fm.values, gs.item_ids)
        else:
            term = _correlation_term(fm.values)
        k += (w / total) * term
    k = (k + k.T) / 2.0
    np.clip(k, 0.0, 1.0, out=k)
    np.fill_diagonal(k, 1.0)
    if sparsify_k is not None:
        return SimilarityKernel(sparsify(k, sparsify_k))
    return SimilarityKernel(k)


def sparsify(k: np.ndarray, neighbors: int) -> sp.csr_matrix:
    """k-nearest-neighbor sparsification of a dense kernel, max-symmetrized."""
    n = k.shape[0]
    if neighbors < 0:
        raise DataError("sparsify_k must be nonnegative")
    neighbors = min(neighbors, n - 1)
    off = np.array(k, copy=True)
    np.fill_diagonal(off, -np.inf)
    # stable sort on -s keeps the lowest index among equal similarities
    order = np.argsort(-off, axis=1, kind="stable")[:, :neighbors]
    rows = np.repeat(np.arange(n), neighbors)
    cols = order.ravel()
    vals = k[rows, cols]
    a = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    a = a.maximum(a.T).tolil()
    a.setdiag(1.0)
    a = a.tocsr()
    a.eliminate_zeros()
    return a


def to_distance(kernel: SimilarityKernel) -> DistanceMatrix:
    return DistanceMatrix(1.0 - kernel.dense())


def filter_by_query(gs: GroundSet, query, threshold: float = 0.5) -> np.ndarray:
    """Indices of the items relevant to ``query``, in ground-set order.

    ``query`` is a concept name (str), a path to a relevance CSV, or an
    array of per-item relevance scores compared against ``threshold``.
    """
    if isinstance(query, str):
        if gs.concepts is None:
            raise DataError("concept query on a ground set without concepts")
        try:
            u = gs.concepts.names.index(query)
        except ValueError:
            raise DataError(f"unknown concept {query!r}") from None
        return np.flatnonzero(gs.concepts.incidence[:, u])
    if isinstance(query, PathLike):
        from .io import read_vector
        query = read_vector(query)
    rel = np.asarray(query, dtype=np.float64)
    if rel.shape != (gs.n,):
        raise DataError(f"row-count mismatch: relevance has {rel.size} rows, expected {gs.n}")
    return np.flatnonzero(rel >= threshold)
