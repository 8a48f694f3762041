"""Synthetic embeddings with known ground truth, for demos and tests."""

from __future__ import annotations

from typing import Dict, Sequence, Tuple

import numpy as np

from .embedding import Embedding
from .evaluation import AnalogyDataset
from .translation import Lexicon


def random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian, signs fixed)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_embedding(n: int, d: int, rng: np.random.Generator, prefix: str = "w") -> Embedding:
    return Embedding(tuple(f"{prefix}{i}" for i in range(n)), rng.standard_normal((n, d)))


def similarity_copy(emb: Embedding, rng: np.random.Generator, scale: float = 2.5,
                    shift: float = 1.0) -> Tuple[Embedding, np.ndarray, float, np.ndarray]:
    """Copy of ``emb`` under a random rotation, scaling and translation.

    Returns the copy and the applied ``(Q, scale, t)`` with rows mapped as
    ``x -> scale * x @ Q + t``.
    """
    q = random_orthogonal(emb.dim, rng)
    t = shift * rng.standard_normal(emb.dim)
    return emb.with_matrix(scale * emb.matrix @ q + t), q, scale, t


def multilingual(n_words: int, d: int, languages: Sequence[str], rng: np.random.Generator,
                 noise: float = 0.01) -> Dict[str, Embedding]:
    """Views of one latent vocabulary, each randomly rotated with its own noise.

    Word ``i`` of language ``xx`` is the token ``xx_i``.
    """
    latent = rng.standard_normal((n_words, d))
    views = {}
    for lang in languages:
        q = random_orthogonal(d, rng)
        m = latent @ q + noise * rng.standard_normal((n_words, d))
        views[lang] = Embedding(tuple(f"{lang}_{i}" for i in range(n_words)), m)
    return views


def lexicon(src: str, tgt: str, indices) -> Lexicon:
    return Lexicon(tuple((f"{src}_{i}", f"{tgt}_{i}") for i in indices))


def parallelogram_vocabulary(n_pairs: int, d: int, rng: np.random.Generator,
                             n_relations: int = 2) -> Tuple[Embedding, AnalogyDataset]:
    """Word pairs ``x_i``, ``y_i = x_i + offset[relation]`` and their analogies.

    Each analogy ``x_i : y_i :: x_j : y_j`` uses two pairs sharing a relation,
    so ``y_j == x_j + y_i - x_i`` holds exactly up to rounding.
    """
    offsets = rng.standard_normal((n_relations, d))
    base = rng.standard_normal((n_pairs, d))
    rel = np.arange(n_pairs) % n_relations
    tokens = [f"x{i}" for i in range(n_pairs)] + [f"y{i}" for i in range(n_pairs)]
    matrix = np.vstack([base, base + offsets[rel]])
    items = []
    for i in range(n_pairs):
        for j in range(n_pairs):
            if i != j and rel[i] == rel[j]:
                items.append((f"x{i}", f"y{i}", f"x{j}", f"y{j}"))
    return Embedding(tuple(tokens), matrix), AnalogyDataset(tuple(items))
