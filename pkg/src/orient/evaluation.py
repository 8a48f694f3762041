"""Quality measures for embeddings and alignments.

Covers RMSE and mean cosine between corresponding rows, brute-force cosine
nearest neighbors, Spearman-scored word similarity, 3CosAdd analogies
(within one embedding or across two) and Gaussian-noise RMSE calibration.
Items with out-of-vocabulary tokens are skipped and counted, never fatal,
unless nothing is left to score.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import rankdata

from . import _parallel
from .align import Variant, align, reference_matrix
from .embedding import AlignedPair, Embedding
from .errors import DimMismatch, EmptyEvaluation, InputError
from .rng import PortableRNG

__all__ = [
    "EvalReport",
    "SimilarityDataset",
    "AnalogyDataset",
    "NoiseSpec",
    "NeighborIndex",
    "rmse",
    "mean_cosine",
    "nearest_neighbors",
    "spearman",
    "similarity_eval",
    "analogy_eval",
    "gaussian_calibrate",
    "load_similarity_dataset",
    "load_analogy_dataset",
]

QUERY_BLOCK = 256


@dataclass
class EvalReport:
    metric: str
    score: Union[float, Dict[int, float]]
    evaluated: int
    skipped: int
    params: Dict[str, object] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return self.evaluated + self.skipped

    def to_text(self) -> str:
        """``metric<TAB>score<TAB>evaluated<TAB>skipped``, one line per k for P@k."""
        if isinstance(self.score, Mapping):
            rows = [(f"{self.metric}@{k}", v) for k, v in sorted(self.score.items())]
        else:
            rows = [(self.metric, self.score)]
        return "".join(
            f"{name}\t{format(float(v), '.12g')}\t{self.evaluated}\t{self.skipped}\n"
            for name, v in rows
        )

    def to_json(self) -> str:
        score = self.score
        if isinstance(score, Mapping):
            score = {str(k): float(v) for k, v in sorted(score.items())}
        doc = {
            "metric": self.metric,
            "score": score,
            "evaluated": self.evaluated,
            "skipped": self.skipped,
            "params": self.params,
        }
        return json.dumps(doc, sort_keys=True, default=str) + "\n"


@dataclass(frozen=True)
class SimilarityDataset:
    items: Tuple[Tuple[str, str, float], ...]

    def __post_init__(self):
        items = tuple((str(a), str(b), float(s)) for a, b, s in self.items)
        if not items:
            raise InputError("similarity dataset is empty")
        if not all(math.isfinite(s) for _, _, s in items):
            raise InputError("similarity scores must be finite")
        object.__setattr__(self, "items", items)

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class AnalogyDataset:
    items: Tuple[Tuple[str, str, str, str], ...]

    def __post_init__(self):
        items = tuple(tuple(map(str, q)) for q in self.items)
        if not items:
            raise InputError("analogy dataset is empty")
        for q in items:
            if len(q) != 4:
                raise InputError(f"analogy {q!r} does not have 4 tokens")
            if len(set(q)) != 4:
                raise InputError(f"analogy {q!r} repeats a token")
        object.__setattr__(self, "items", items)

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    fraction: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise InputError("sigma must be a positive finite number")
        if not 0 < self.fraction <= 1:
            raise InputError("fraction must lie in (0, 1]")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InputError("seed must be a nonnegative integer")


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def load_similarity_dataset(path, lower: bool = False) -> SimilarityDataset:
    """Read ``token1<TAB>token2<TAB>score`` lines; ``#`` starts a comment."""
    items = []
    for lineno, line in _data_lines(path):
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) != 3:
            raise InputError(f"{path}: line {lineno}: expected 3 fields")
        try:
            score = float(fields[2])
        except ValueError:
            raise InputError(f"{path}: line {lineno}: bad score {fields[2]!r}") from None
        a, b = fields[0].strip(), fields[1].strip()
        if lower:
            a, b = a.lower(), b.lower()
        items.append((a, b, score))
    return SimilarityDataset(tuple(items))


def load_analogy_dataset(path, lower: bool = False) -> AnalogyDataset:
    """Read ``a b c d`` lines; ``:`` section headers and ``#`` comments are ignored."""
    items = []
    for lineno, line in _data_lines(path):
        if line.startswith(":"):
            continue
        fields = line.split()
        if len(fields) != 4:
            raise InputError(f"{path}: line {lineno}: expected 4 tokens")
        if lower:
            fields = [f.lower() for f in fields]
        items.append(tuple(fields))
    return AnalogyDataset(tuple(items))


def _matrices(a, b):
    if b is None:
        if not isinstance(a, AlignedPair):
            raise TypeError("pass an AlignedPair or two matrices")
        a, b = a
    a = a.matrix if isinstance(a, Embedding) else np.asarray(a, dtype=np.float64)
    b = b.matrix if isinstance(b, Embedding) else np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def rmse(a, b=None) -> float:
    """``sqrt(mean_i ||a_i - b_i||^2)``.

    Accepts an :class:`AlignedPair`, two embeddings, or two arrays.
    """
    a, b = _matrices(a, b)
    diff = a - b
    return float(np.sqrt(np.einsum("ij,ij->", diff, diff) / a.shape[0]))


def mean_cosine(a, b=None) -> float:
    a, b = _matrices(a, b)
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    if np.any(na == 0) or np.any(nb == 0):
        raise InputError("mean cosine is undefined for zero-norm rows")
    return float(np.mean(np.einsum("ij,ij->i", a, b) / (na * nb)))


def _unit(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    return x / np.where(norms > 0, norms, 1.0)


class NeighborIndex:
    """Exhaustive cosine search over a fixed candidate set.

    Ranking is by descending cosine, ties broken by ascending UTF-8 byte order
    of the candidate key. Zero-norm candidates score a cosine of 0.
    """

    def __init__(self, matrix: np.ndarray, keys: Sequence, sort_keys: Optional[Sequence[bytes]] = None):
        self.unit = _unit(np.asarray(matrix, dtype=np.float64))
        self.keys = list(keys)
        if sort_keys is None:
            sort_keys = [k.encode("utf-8") for k in self.keys]
        order = sorted(range(len(self.keys)), key=lambda i: sort_keys[i])
        self.tiebreak = np.empty(len(self.keys), dtype=np.int64)
        self.tiebreak[order] = np.arange(len(self.keys))

    @classmethod
    def from_embedding(cls, emb: Embedding) -> "NeighborIndex":
        return cls(emb.matrix, emb.tokens)

    def __len__(self) -> int:
        return len(self.keys)

    def _select(self, sims: np.ndarray, k: int) -> np.ndarray:
        valid = np.flatnonzero(sims > -np.inf)
        if valid.size == 0:
            raise EmptyEvaluation("no candidates left after exclusion")
        k = min(k, valid.size)
        vals = sims[valid]
        if k < valid.size:
            kth = -np.partition(-vals, k - 1)[k - 1]
            keep = vals >= kth
            valid, vals = valid[keep], vals[keep]
        order = np.lexsort((self.tiebreak[valid], -vals))
        return valid[order[:k]]

    def search(self, queries, k: int, exclude: Optional[Sequence[Iterable[int]]] = None) -> List[np.ndarray]:
        """Top-``k`` candidate positions for each query row.

        ``exclude[i]`` lists candidate positions removed before ranking query i.
        """
        q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        if q.shape[1] != self.unit.shape[1]:
            raise DimMismatch(f"query dim {q.shape[1]} != index dim {self.unit.shape[1]}")
        if k < 1:
            raise InputError("k must be positive")
        norms = np.linalg.norm(q, axis=1)
        if np.any(norms == 0):
            raise InputError("zero-norm query has no cosine neighbors")
        qn = q / norms[:, None]

        def block(rows: range) -> List[np.ndarray]:
            sims = qn[rows.start:rows.stop] @ self.unit.T
            out = []
            for j, i in enumerate(rows):
                row = sims[j]
                if exclude is not None:
                    drop = list(exclude[i])
                    if drop:
                        row[drop] = -np.inf
                out.append(self._select(row, k))
            return out

        results = _parallel.map_blocks(block, q.shape[0], QUERY_BLOCK)
        return [hit for part in results for hit in part]


def nearest_neighbors(emb: Embedding, query, k: int, exclude: Iterable[str] = ()) -> List[str]:
    """Top-``k`` tokens of ``emb`` by cosine to ``query``, excluded tokens removed first."""
    index = NeighborIndex.from_embedding(emb)
    drop = [emb.index(t) for t in set(exclude) if t in emb]
    if k > emb.n - len(drop):
        raise InputError(f"k={k} exceeds the {emb.n - len(drop)} available candidates")
    (hits,) = index.search(np.asarray(query, dtype=np.float64)[None, :], k, [drop])
    return [emb.tokens[i] for i in hits]


def spearman(x, y) -> float:
    """Spearman rank correlation; tied values share their average rank."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DimMismatch("spearman needs two equal-length 1-d sequences")
    rx = rankdata(x, method="average")
    ry = rankdata(y, method="average")
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float(rx @ rx) * float(ry @ ry))
    if denom == 0:
        return float("nan")
    return float(np.clip((rx @ ry) / denom, -1.0, 1.0))


def _cos(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(u @ v / (nu * nv))


def similarity_eval(target: Embedding, source: Optional[Embedding], ds: SimilarityDataset,
                    mode: str = "within_target") -> EvalReport:
    """Spearman correlation between model cosines and human similarity scores.

    ``within_target`` scores ``cos(target[w1], target[w2])``; ``cross`` scores
    ``cos(target[w1], source[w2])`` for an aligned source.
    """
    if mode == "within_target":
        second = target
    elif mode == "cross":
        if source is None:
            raise InputError("cross mode needs a source embedding")
        if source.dim != target.dim:
            raise DimMismatch(f"dimensions differ: {target.dim} vs {source.dim}")
        second = source
    else:
        raise InputError(f"unknown similarity mode {mode!r}")
    model, human = [], []
    for w1, w2, score in ds.items:
        if w1 in target and w2 in second:
            model.append(_cos(target.vector(w1), second.vector(w2)))
            human.append(score)
    if len(model) < 2:
        raise EmptyEvaluation(f"only {len(model)} similarity pair(s) are in vocabulary")
    return EvalReport("spearman", spearman(model, human), len(model), len(ds) - len(model),
                      {"mode": mode})


def analogy_eval(target: Embedding, source: Optional[Embedding], ds: AnalogyDataset,
                 k: int = 1) -> EvalReport:
    """3CosAdd analogy accuracy, optionally across two aligned embeddings.

    For ``a:b::c:d`` the query ``source[c] + source[b] - source[a]`` is searched
    among the target rows with ``a``, ``b`` and ``c`` excluded; it is correct
    when ``d`` is among the ``k`` nearest. Pass ``source=None`` (or the target
    itself) for the usual within-embedding test.
    """
    if source is None:
        source = target
    if source.dim != target.dim:
        raise DimMismatch(f"dimensions differ: {target.dim} vs {source.dim}")
    queries, excludes, gold = [], [], []
    for a, b, c, d in ds.items:
        if a in source and b in source and c in source and d in target:
            queries.append(source.vector(c) + source.vector(b) - source.vector(a))
            excludes.append([target.index(t) for t in (a, b, c) if t in target])
            gold.append(target.index(d))
    if not queries:
        raise EmptyEvaluation("no analogy has all of its tokens in vocabulary")
    hits = NeighborIndex.from_embedding(target).search(np.vstack(queries), k, excludes)
    correct = sum(int(g in h) for g, h in zip(gold, hits))
    return EvalReport("analogy", correct / len(queries), len(queries), len(ds) - len(queries),
                      {"k": k, "cross": source is not target})


def gaussian_calibrate(emb: Embedding, spec: NoiseSpec, variant: Union[str, Variant] = Variant.R,
                       **align_kwargs) -> EvalReport:
    """RMSE left after aligning a noisy copy of ``emb`` back onto it.

    A seeded ``ceil(fraction * n)`` subset of rows gets i.i.d. ``N(0, sigma^2)``
    noise on every coordinate; the copy is then aligned to the original with
    ``variant`` and the post-alignment RMSE is reported.
    """
    variant = Variant.parse(variant)
    rng = PortableRNG(int(spec.seed))
    n, d = emb.n, emb.dim
    count = math.ceil(spec.fraction * n - 1e-9)
    rows = rng.choice(n, count)
    noisy = np.array(emb.matrix)
    noisy[rows] += spec.sigma * rng.normal(count * d).reshape(count, d)
    pair = AlignedPair(emb, Embedding(emb.tokens, noisy))
    transform = align(pair, variant, **align_kwargs)
    score = rmse(reference_matrix(pair, variant), transform.transform(noisy))
    params = {"sigma": spec.sigma, "fraction": spec.fraction, "seed": spec.seed,
              "variant": variant.value, "noisy_rows": count}
    return EvalReport("rmse", score, n, 0, params)
