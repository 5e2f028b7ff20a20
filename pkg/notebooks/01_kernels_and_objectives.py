"""
Kernels and set functions
=========================

Build a similarity kernel from two feature modalities, turn it into
distances, and evaluate a few set functions on hand-picked subsets.
"""

# %%
import numpy as np

from submodsum import (DisparityMin, FacilityLocation, FeatureMatrix, GraphCut, GroundSet,
                       SaturatedCoverage, SetCover, build_kernel, evaluate, to_distance)
from submodsum.ground import ConceptTable

rng = np.random.default_rng(0)

# %%
# Six items: three near one direction, three near another.
base = np.array([[1.0, 0, 0, 0]] * 3 + [[0, 1.0, 0, 0]] * 3)
emb = base + 0.1 * rng.normal(size=base.shape)
hist = np.abs(base) + 0.05 * rng.random(base.shape)

gs = GroundSet.from_arrays(modalities={
    "scene": FeatureMatrix(emb, "embedding"),
    "color": FeatureMatrix(hist, "histogram"),
})

# embeddings contribute (cos + 1) / 2, histograms (pearson + 1) / 2
K = build_kernel(gs, ["scene", "color"], weights=[2.0, 1.0])
print(np.round(K.dense(), 2))

# %%
# Representation: one item from each group covers the set much better
# than two items from the same group.
fl = FacilityLocation(K)
print("facility location {0,1}:", round(evaluate(fl, [0, 1]), 3))
print("facility location {0,3}:", round(evaluate(fl, [0, 3]), 3))

# saturated coverage stops rewarding an item once it is alpha-covered
sc = SaturatedCoverage(K, alpha=0.2)
print("saturated coverage {0,3}:", round(evaluate(sc, [0, 3]), 3))

# graph cut rewards similarity to the rest and penalizes redundancy inside X
gc = GraphCut(K, lam=1.0)
print("graph cut {0,1} vs {0,3}:", round(evaluate(gc, [0, 1]), 3), round(evaluate(gc, [0, 3]), 3))

# %%
# Diversity works on distances d = 1 - s.
dm = DisparityMin(to_distance(K))
print("min distance inside {0,1}:", round(evaluate(dm, [0, 1]), 3))
print("min distance inside {0,3}:", round(evaluate(dm, [0, 3]), 3))

# %%
# Coverage of labelled concepts.
table = ConceptTable.from_labels(["beach", "sky", "car"],
                                 [["beach", "sky"], ["sky"], ["beach"], ["car"], ["car"], ["sky", "car"]])
cover = SetCover(table)
print("concepts covered by {0,3}:", evaluate(cover, [0, 3]))
