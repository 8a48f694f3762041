"""
Similarity and analogy tests across embeddings
==============================================

Word similarity is scored by Spearman correlation against human ratings.
Analogies ``a:b::c:d`` are answered by the nearest neighbor of
``c + b - a`` with ``a``, ``b`` and ``c`` removed from the candidates.
"""

import numpy as np

import orient
from orient.synthetic import parallelogram_vocabulary, random_orthogonal

rng = np.random.default_rng(3)
emb, analogies = parallelogram_vocabulary(20, 30, rng)
print(len(emb.tokens), "words,", len(analogies), "analogies")
print(orient.analogy_eval(emb, emb, analogies).to_text(), end="")

##############################################################################
# A second embedding: a rotated, noisy copy. Cross analogies (query from one
# embedding, answer searched in the other) only work after alignment.

other = emb.with_matrix(emb.matrix @ random_orthogonal(30, rng) + 0.05 * rng.standard_normal(emb.matrix.shape))
print("cross, unaligned:", orient.analogy_eval(emb, other, analogies).score)
t = orient.align(orient.intersect(emb, other), "r")
aligned = orient.apply(t, other)
print("cross, aligned:  ", orient.analogy_eval(emb, aligned, analogies).score)

##############################################################################
# For similarity, fake human ratings that follow the true cosines with a
# little jitter. Missing words are skipped and counted.

pairs = [(f"x{i}", f"y{j}") for i in range(10) for j in range(10)]
u = {t: emb.vector(t) / np.linalg.norm(emb.vector(t)) for t in emb.tokens}
items = [(w1, w2, float(u[w1] @ u[w2]) + 0.05 * rng.standard_normal()) for w1, w2 in pairs]
items.append(("x0", "not_a_word", 5.0))
ds = orient.SimilarityDataset(tuple(items))
print(orient.similarity_eval(emb, None, ds).to_text(), end="")
print(orient.similarity_eval(emb, aligned, ds, mode="cross").to_text(), end="")
