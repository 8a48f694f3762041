"""
Contextual vectors and ensembles
================================

With one vector per occurrence, matching every occurrence of a word against
every occurrence in the other embedding gives the same cross-covariance as
matching the per-word means. Aligned embeddings can also be averaged row by
row into a combined one.
"""

import numpy as np

import orient
from orient.linalg import cross_covariance

rng = np.random.default_rng(5)
tokens = ("bank", "river", "money", "water")


def contextual():
    return orient.ContextualEmbedding(tokens, tuple(rng.standard_normal((rng.integers(1, 5), 3)) for _ in tokens))


ctx_a, ctx_b = contextual(), contextual()
print("occurrences:", ctx_a.counts())

h_all = orient.all_pairs_cross_covariance(ctx_a, ctx_b)
means = orient.intersect(orient.collapse_means(ctx_a), orient.collapse_means(ctx_b))
print("difference:", np.abs(h_all - cross_covariance(*means)).max())

##############################################################################
# Ensemble: align, then average corresponding rows.

base = orient.Embedding(tuple(f"w{i}" for i in range(200)), rng.standard_normal((200, 10)))
noisy = base.with_matrix(base.matrix + 0.3 * rng.standard_normal((200, 10)))
other = base.with_matrix(base.matrix + 0.3 * rng.standard_normal((200, 10)))
pair = orient.intersect(noisy, other)
t = orient.align(pair, "r")
merged = orient.ensemble_average(orient.AlignedPair(noisy, orient.apply(t, other)))
print("rmse to clean, single:  ", orient.rmse(base.matrix, noisy.matrix))
print("rmse to clean, ensemble:", orient.rmse(base.matrix, merged.matrix))
