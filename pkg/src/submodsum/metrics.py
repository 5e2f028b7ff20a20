"""Summary evaluation measures against annotated segments and concept tables.

R(X): fraction of scenes hit at least once.
C(X): fraction of the ground set's concepts covered by X.
D(X): number of outlier events hit (unnormalized).
M(X): fraction of query clusters hit, computed with the R(X) formula.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ground import ConceptTable, DataError

SCENE, OUTLIER, CLUSTER = "scene", "outlier", "cluster"
SEGMENT_KINDS = (SCENE, OUTLIER, CLUSTER)


@dataclass(frozen=True)
class Segment:
    name: str
    members: frozenset
    kind: str


@dataclass(frozen=True)
class SegmentAnnotation:
    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for kind in SEGMENT_KINDS:
            seen = set()
            for s in segs:
                if s.kind not in SEGMENT_KINDS:
                    raise DataError(f"segment {s.name!r} has unknown kind {s.kind!r}")
                if s.kind != kind:
                    continue
                if seen & s.members:
                    raise DataError(f"{kind} segments overlap at {sorted(seen & s.members)[0]}")
                seen |= s.members

    @classmethod
    def from_dict(cls, doc: dict, n=None) -> "SegmentAnnotation":
        segs = []
        for s in doc.get("segments", []):
            members = frozenset(int(i) for i in s["members"])
            if n is not None and any(i < 0 or i >= n for i in members):
                raise DataError(f"segment {s['name']!r} references items outside the ground set")
            segs.append(Segment(str(s["name"]), members, s["kind"]))
        return cls(tuple(segs))

    @classmethod
    def load(cls, path, n=None) -> "SegmentAnnotation":
        path = Path(path)
        if not path.is_file():
            raise DataError(f"missing file: {path}")
        with open(path) as fh:
            return cls.from_dict(json.load(fh), n)

    def to_dict(self) -> dict:
        return {"version": 1, "segments": [
            {"name": s.name, "kind": s.kind, "members": sorted(s.members)} for s in self.segments]}

    def of_kind(self, kind: str) -> list:
        return [s for s in self.segments if s.kind == kind]

    def has(self, kind: str) -> bool:
        return any(s.kind == kind for s in self.segments)


def _hits(X, segments) -> int:
    chosen = set(int(i) for i in X)
    return sum(1 for s in segments if chosen & s.members)


def _hit_fraction(X, ann: SegmentAnnotation, kind: str) -> float:
    segs = ann.of_kind(kind)
    if not segs:
        raise DataError(f"annotation has no {kind} segments")
    return _hits(X, segs) / len(segs)


def representation_score(X, ann: SegmentAnnotation) -> float:
    return _hit_fraction(X, ann, SCENE)


def query_cluster_score(X, ann: SegmentAnnotation) -> float:
    return _hit_fraction(X, ann, CLUSTER)


def diversity_score(X, ann: SegmentAnnotation) -> int:
    segs = ann.of_kind(OUTLIER)
    if not segs:
        raise DataError("annotation has no outlier segments")
    return _hits(X, segs)


def coverage_score(X, concepts: ConceptTable) -> float:
    universe = concepts.incidence.any(axis=0)
    if not universe.any():
        raise DataError("no item carries any concept")
    idx = np.asarray(list(X), dtype=np.intp)
    covered = concepts.incidence[idx].any(axis=0) if idx.size else np.zeros_like(universe)
    return int(covered.sum()) / int(universe.sum())


def metric_report(X, ann: SegmentAnnotation = None, concepts: ConceptTable = None) -> dict:
    """Every measure whose annotation kind is available."""
    out = {}
    if ann is not None:
        if ann.has(SCENE):
            out["R"] = representation_score(X, ann)
        if ann.has(OUTLIER):
            d = diversity_score(X, ann)
            out["D"] = d
            out["D_normalized"] = d / len(ann.of_kind(OUTLIER))
        if ann.has(CLUSTER):
            out["M"] = query_cluster_score(X, ann)
            out["M_form"] = "M(X), R-form"
    if concepts is not None and concepts.incidence.any():
        out["C"] = coverage_score(X, concepts)
    return out
