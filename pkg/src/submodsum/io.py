"""Readers and writers for the on-disk data bundle.

Matrices are either header-less CSV (one row per item) or the ``SBMD``
binary layout::

    b"SBMD" | u16 version (=1) | u32 n | u32 d | n*d little-endian float32, row-major

A manifest is a JSON file naming each data file by role; relative paths
resolve against the manifest's directory::

    {
      "version": 1,
      "item_ids": "ids.csv",
      "modalities": [{"name": "scene", "path": "scene.bin", "kind": "embedding"}],
      "costs": "costs.csv",
      "importance": "importance.csv",
      "concepts": {"path": "concepts.json", "probabilities": "probs.bin", "threshold": 0.5},
      "kernel": "kernel.bin"
    }

Every key except ``modalities`` (or ``kernel``) is optional.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .ground import ConceptTable, DataError, FeatureMatrix, GroundSet, SimilarityKernel

MAGIC = b"SBMD"
VERSION = 1
_HEADER = struct.Struct("<4sHII")


def write_matrix(path, values) -> None:
    values = np.asarray(values, dtype="<f4")
    if values.ndim == 1:
        values = values[:, None]
    n, d = values.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, d))
        fh.write(np.ascontiguousarray(values).tobytes())


def read_matrix(path) -> np.ndarray:
    """Load a matrix from SBMD binary or CSV, chosen by the file's magic bytes."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing file: {path}")
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if head[:4] == MAGIC:
            if len(head) < _HEADER.size:
                raise DataError(f"truncated header in {path}")
            _, version, n, d = _HEADER.unpack(head)
            if version != VERSION:
                raise DataError(f"unsupported SBMD version {version} in {path}")
            body = fh.read()
            if len(body) != 4 * n * d:
                raise DataError(f"{path}: expected {n}x{d} floats, got {len(body)} bytes")
            out = np.frombuffer(body, dtype="<f4").reshape(n, d).astype(np.float64)
        else:
            try:
                out = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
            except ValueError as exc:
                raise DataError(f"malformed CSV {path}: {exc}") from None
    if not np.all(np.isfinite(out)):
        raise DataError(f"non-finite value in {path}")
    return out


def read_vector(path) -> np.ndarray:
    m = read_matrix(path)
    if m.shape[1] != 1:
        raise DataError(f"{path}: expected one value per line")
    return m[:, 0]


def write_vector(path, values) -> None:
    with open(path, "w") as fh:
        for v in np.asarray(values, dtype=np.float64):
            fh.write(f"{float(v)!r}\n")


def read_concepts(path, probabilities=None, threshold: float = 0.5) -> ConceptTable:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing file: {path}")
    with open(path) as fh:
        doc = json.load(fh)
    # concepts are {"name", "weight"} objects or bare names (weight 1)
    entries = [c if isinstance(c, dict) else {"name": c} for c in doc.get("concepts", [])]
    if not entries:
        raise DataError(f"{path}: no concepts listed")
    names = [str(c["name"]) for c in entries]
    weights = [float(c.get("weight", 1.0)) for c in entries]
    if probabilities is not None:
        p = np.asarray(probabilities, dtype=np.float64)
        table = ConceptTable.from_probabilities(names, p, weights, threshold)
        if "items" in doc:
            labeled = ConceptTable.from_labels(names, doc["items"], weights)
            if labeled.n != table.n:
                raise DataError("row-count mismatch: concept items vs probabilities")
            if not np.array_equal(labeled.incidence, table.incidence):
                raise DataError("hard labels disagree with thresholded probabilities")
        return table
    if "items" not in doc:
        raise DataError(f"{path}: concept table needs 'items' or a probability matrix")
    return ConceptTable.from_labels(names, doc["items"], weights)


def write_concepts(path, table: ConceptTable, with_items: bool = True) -> None:
    doc = {"concepts": [{"name": n, "weight": float(w)} for n, w in zip(table.names, table.weights)]}
    if with_items:
        doc["items"] = [[table.names[u] for u in sorted(table.labels(i))] for i in range(table.n)]
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_ground_set(manifest_path) -> GroundSet:
    """Read a manifest and every file it names into a validated GroundSet."""
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise DataError(f"missing file: {manifest_path}")
    with open(manifest_path) as fh:
        man = json.load(fh)
    base = manifest_path.parent

    def resolve(rel):
        return base / rel

    modalities = {}
    for entry in man.get("modalities", []):
        modalities[entry["name"]] = FeatureMatrix(read_matrix(resolve(entry["path"])),
                                                  entry.get("kind", "embedding"))

    kernel = None
    if man.get("kernel"):
        kernel = SimilarityKernel(read_matrix(resolve(man["kernel"])))

    concepts = None
    if man.get("concepts"):
        spec = man["concepts"]
        if isinstance(spec, str):
            spec = {"path": spec}
        probs = read_matrix(resolve(spec["probabilities"])) if spec.get("probabilities") else None
        concepts = read_concepts(resolve(spec["path"]), probs, float(spec.get("threshold", 0.5)))

    sizes = {f"modality {k!r}": v.rows for k, v in modalities.items()}
    if kernel is not None:
        sizes["kernel"] = kernel.n
    if concepts is not None:
        sizes["concepts"] = concepts.n
    costs = read_vector(resolve(man["costs"])) if man.get("costs") else None
    importance = read_vector(resolve(man["importance"])) if man.get("importance") else None
    item_ids = None
    if man.get("item_ids"):
        with open(resolve(man["item_ids"])) as fh:
            item_ids = tuple(line.strip() for line in fh if line.strip())
    for label, arr in (("costs", costs), ("importance", importance), ("item_ids", item_ids)):
        if arr is not None:
            sizes[label] = len(arr)
    if not sizes:
        raise DataError("manifest names no item data")
    if len(set(sizes.values())) > 1:
        detail = ", ".join(f"{k}={v}" for k, v in sizes.items())
        raise DataError(f"row-count mismatch: {detail}")
    n = next(iter(sizes.values()))
    return GroundSet.from_arrays(n, item_ids=item_ids, costs=costs, modalities=modalities,
                                 concepts=concepts, importance=importance, kernel=kernel)
