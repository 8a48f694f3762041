"""
Recovering a known similarity transform
=======================================

A random embedding is rotated, scaled and shifted. Aligning the copy back
with the ``rst`` recipe should undo all three up to rounding error.
"""

import numpy as np

import orient
from orient.synthetic import random_embedding, similarity_copy

rng = np.random.default_rng(0)
emb = random_embedding(1000, 50, rng)
copy, q, scale, shift = similarity_copy(emb, rng, scale=2.5)

##############################################################################
# Before alignment the two point clouds are far apart.

pair = orient.AlignedPair(emb, copy)
print("rmse before:", orient.rmse(pair))

##############################################################################
# Fit the transform and map the copy back onto the original.

t = orient.align(pair, "rst")
moved = t.transform(copy.matrix)
print("rmse after: ", orient.rmse(emb.matrix, moved))
print("scale found:", t.scale, "expected:", 1 / scale)
print("rotation error:", np.abs(t.rotation - q.T).max())

##############################################################################
# Without centering, rotation alone cannot absorb the shift and scale.

for variant in ["r", "rs", "rt", "rst"]:
    fit = orient.align(pair, variant)
    print(f"{variant:>4}: rmse {orient.rmse(emb.matrix, fit.transform(copy.matrix)):.3g}")
