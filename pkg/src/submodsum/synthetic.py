"""Seeded synthetic ground sets with known structure.

``clustered_with_outliers``
    Scenes are noisy arcs on the unit sphere (static shots or camera pans
    of random sweep) that share a common "video" direction; a few isolated
    outlier frames point elsewhere.
    Each scene owns three concepts, each outlier one private concept, and
    a handful of frames carry planted importance.
``uniform``
    Structureless features with random concepts; no segments.
``concept_grid``
    Item i shows concept i mod m only; features are noisy one-hots.

Every array is rounded through float32 so that data written to SBMD files
reloads bit-identically.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ground import ConceptTable, FeatureMatrix, GroundSet
from .io import write_concepts, write_matrix, write_vector
from .metrics import CLUSTER, OUTLIER, SCENE, Segment, SegmentAnnotation

SCENARIOS = ("clustered_with_outliers", "uniform", "concept_grid")


def _f32(a):
    return np.asarray(a, dtype=np.float32).astype(np.float64)


def _unit(x):
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def _split(n, k, rng):
    """Uneven positive sizes summing to n."""
    w = rng.dirichlet(np.full(k, 5.0))
    sizes = np.maximum(1, np.floor(w * n).astype(int))
    sizes[np.argmax(sizes)] += n - sizes.sum()
    return sizes


def clustered_with_outliers(n=300, seed=0, n_clusters=5, n_outliers=10, dim=32,
                            n_important=10, pan=1.6, noise=0.05):
    rng = np.random.default_rng(seed)
    n_scene = n - n_outliers
    if n_scene < n_clusters:
        raise ValueError("n too small for the requested clusters")
    sizes = _split(n_scene, n_clusters, rng)
    common = _unit(rng.normal(size=dim))
    starts = _unit(0.9 * common + 0.44 * _unit(rng.normal(size=(n_clusters, dim))))
    # each scene is a camera pan: an arc from its start direction through a
    # random tangent, with a per-scene sweep angle (near 0 means a static shot)
    sweeps = rng.uniform(0.0, pan, size=n_clusters)

    feats, labels = [], []
    for c, size in enumerate(sizes):
        a = starts[c]
        t = rng.normal(size=dim)
        t = _unit(t - (t @ a) * a)
        phi = np.sort(rng.uniform(0.0, sweeps[c], size=size))
        pts = np.cos(phi)[:, None] * a + np.sin(phi)[:, None] * t
        pts += noise * rng.normal(size=(size, dim)) / np.sqrt(dim)
        feats.append(_unit(pts))
        labels += [c] * size
    outliers = _unit(rng.normal(size=(n_outliers, dim)) - 0.5 * common)
    feats.append(outliers)
    labels += [-1] * n_outliers
    X = np.vstack(feats)
    labels = np.array(labels)

    # interleave so scenes are not index-sorted
    perm = rng.permutation(n)
    X, labels = X[perm], labels[perm]

    m = 3 * n_clusters + n_outliers
    names = [f"scene{c}_c{k}" for c in range(n_clusters) for k in range(3)]
    names += [f"event{o}" for o in range(n_outliers)]
    prob = rng.uniform(0.0, 0.3, size=(n, m))
    out_ids = np.flatnonzero(labels == -1)
    for i in range(n):
        c = labels[i]
        if c >= 0:
            cols = slice(3 * c, 3 * c + 3)
            prob[i, cols] = np.where(rng.random(3) < 0.7, rng.uniform(0.6, 1.0, 3),
                                     rng.uniform(0.0, 0.4, 3))
    for o, i in enumerate(out_ids):
        prob[i, 3 * n_clusters + o] = rng.uniform(0.7, 1.0)
    prob = _f32(prob)
    concepts = ConceptTable.from_probabilities(names, prob, threshold=0.5)

    importance = rng.uniform(0.0, 0.1, size=n)
    planted = rng.choice(n, size=min(n_important, n), replace=False)
    importance[planted] = rng.uniform(0.8, 1.0, size=planted.size)

    gs = GroundSet.from_arrays(
        n, item_ids=tuple(f"frame{i:05d}" for i in range(n)),
        modalities={"embedding": FeatureMatrix(_f32(X), "embedding"),
                    "histogram": FeatureMatrix(_f32(np.abs(X) + 0.05 * rng.random((n, dim))), "histogram")},
        concepts=concepts, importance=_f32(importance))
    segs = [Segment(f"scene{c}", frozenset(np.flatnonzero(labels == c).tolist()), SCENE)
            for c in range(n_clusters)]
    segs += [Segment(f"outlier{o}", frozenset([int(i)]), OUTLIER) for o, i in enumerate(out_ids)]
    segs += [Segment(f"cluster{c}", frozenset(np.flatnonzero(labels == c).tolist()), CLUSTER)
             for c in range(n_clusters)]
    return gs, SegmentAnnotation(tuple(segs))


def uniform(n=100, seed=0, dim=16, m=12):
    rng = np.random.default_rng(seed)
    X = _f32(rng.random((n, dim)))
    prob = _f32(rng.random((n, m)) * 0.8)
    names = [f"c{u}" for u in range(m)]
    gs = GroundSet.from_arrays(
        n, modalities={"embedding": FeatureMatrix(X, "embedding")},
        concepts=ConceptTable.from_probabilities(names, prob, threshold=0.5),
        importance=_f32(rng.random(n)))
    return gs, SegmentAnnotation(())


def concept_grid(n=100, seed=0, m=None):
    rng = np.random.default_rng(seed)
    m = max(1, n // 10) if m is None else int(m)
    onehot = np.zeros((n, m))
    onehot[np.arange(n), np.arange(n) % m] = 1.0
    X = _f32(onehot + 0.05 * rng.random((n, m)))
    names = [f"c{u}" for u in range(m)]
    gs = GroundSet.from_arrays(
        n, modalities={"embedding": FeatureMatrix(X, "embedding")},
        concepts=ConceptTable(names, onehot.astype(bool)))
    segs = [Segment(f"cluster{u}", frozenset(range(u, n, m)), CLUSTER) for u in range(m)]
    return gs, SegmentAnnotation(tuple(segs))


def generate(scenario: str, n: int, seed: int, **options):
    """In-memory (GroundSet, SegmentAnnotation) for a named scenario."""
    if n < 10 and scenario != "concept_grid":
        raise ValueError("synthetic scenarios need n >= 10")
    try:
        fn = {"clustered_with_outliers": clustered_with_outliers, "uniform": uniform,
              "concept_grid": concept_grid}[scenario]
    except KeyError:
        raise ValueError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}") from None
    return fn(n=n, seed=seed, **options)


def write_bundle(gs: GroundSet, out_dir, ann: SegmentAnnotation = None) -> Path:
    """Write ``gs`` as a manifest-driven data bundle; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    man = {"version": 1, "modalities": []}
    for name, fm in gs.modalities.items():
        write_matrix(out / f"{name}.bin", fm.values)
        man["modalities"].append({"name": name, "path": f"{name}.bin", "kind": fm.kind})
    with open(out / "ids.csv", "w") as fh:
        fh.writelines(f"{i}\n" for i in gs.item_ids)
    man["item_ids"] = "ids.csv"
    write_vector(out / "costs.csv", gs.costs)
    man["costs"] = "costs.csv"
    if gs.importance is not None:
        write_vector(out / "importance.csv", gs.importance)
        man["importance"] = "importance.csv"
    if gs.concepts is not None:
        c = gs.concepts
        entry = {"path": "concepts.json", "threshold": c.threshold}
        if c.probabilities is not None:
            write_matrix(out / "probabilities.bin", c.probabilities)
            entry["probabilities"] = "probabilities.bin"
        write_concepts(out / "concepts.json", c, with_items=True)
        man["concepts"] = entry
    if gs.kernel is not None:
        write_matrix(out / "kernel.bin", gs.kernel.dense())
        man["kernel"] = "kernel.bin"
    path = out / "manifest.json"
    with open(path, "w") as fh:
        json.dump(man, fh, indent=1, sort_keys=True)
        fh.write("\n")
    if ann is not None:
        with open(out / "annotations.json", "w") as fh:
            json.dump(ann.to_dict(), fh, indent=1)
            fh.write("\n")
    return path


def generate_synthetic(scenario: str, n: int, seed: int, out_dir, **options):
    """Write a synthetic scenario to ``out_dir``; returns (manifest path, annotation)."""
    gs, ann = generate(scenario, n, seed, **options)
    return write_bundle(gs, out_dir, ann), ann
