"""Cross-lingual alignment from a seed lexicon, P@k scoring and pivot translation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .align import SimilarityTransform, Variant, align, apply
from .embedding import AlignedPair, Embedding
from .errors import DimMismatch, EmptyEvaluation, InputError
from .evaluation import EvalReport, NeighborIndex

__all__ = [
    "Lexicon",
    "load_lexicon",
    "resolve_lexicon",
    "train_translation",
    "translation_eval",
    "pivot_translate",
]

DEFAULT_KS = (1, 5, 10)


@dataclass(frozen=True)
class Lexicon:
    """(source_token, target_token) pairs with unique source tokens."""

    pairs: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        pairs = tuple((str(s), str(t)) for s, t in self.pairs)
        if not pairs:
            raise InputError("lexicon is empty")
        sources = [s for s, _ in pairs]
        if len(set(sources)) != len(sources):
            dup = next(s for s in sources if sources.count(s) > 1)
            raise InputError(f"source token {dup!r} appears more than once in the lexicon")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def split(self, n_first: int) -> Tuple["Lexicon", "Lexicon"]:
        return Lexicon(self.pairs[:n_first]), Lexicon(self.pairs[n_first:])


def load_lexicon(path) -> Lexicon:
    """Read ``source<TAB>target`` lines (UTF-8); blank lines and ``#`` comments skipped."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise InputError(f"{path}: line {lineno}: expected source<TAB>target")
            pairs.append((fields[0], fields[1]))
    return Lexicon(tuple(pairs))


def resolve_lexicon(source: Embedding, target: Embedding, lexicon: Lexicon) -> Tuple[AlignedPair, int]:
    """Pair up lexicon rows present in both embeddings.

    Returns the pair (rows named by source token) and the number of skipped
    entries.
    """
    if source.dim != target.dim:
        raise DimMismatch(f"dimensions differ: {source.dim} vs {target.dim}")
    kept = [(s, t) for s, t in lexicon.pairs if s in source and t in target]
    if not kept:
        raise EmptyEvaluation("no lexicon entry is in both vocabularies")
    names = tuple(s for s, _ in kept)
    pair = AlignedPair(
        Embedding(names, target.rows(t for _, t in kept)),
        Embedding(names, source.rows(names)),
    )
    return pair, len(lexicon) - len(kept)


def train_translation(source: Embedding, target: Embedding, seed: Lexicon,
                      variant: Union[str, Variant] = Variant.WRST, **align_kwargs) -> SimilarityTransform:
    """Fit the map from ``source`` into ``target`` on the seed translations."""
    pair, _ = resolve_lexicon(source, target, seed)
    if pair.n < 2:
        raise InputError(f"only {pair.n} seed pair(s) resolvable; need at least 2")
    return align(pair, variant, **align_kwargs)


def translation_eval(source_aligned: Embedding, target: Embedding, test: Lexicon,
                     ks: Sequence[int] = DEFAULT_KS, search_space: str = "union") -> EvalReport:
    """Precision@k of finding each gold translation among cosine neighbors.

    Queries are the (already aligned) source vectors. With ``target_only`` the
    candidates are the target rows. With ``union`` they are the rows of both
    embeddings minus the query's own row, and a same-language neighbor counts
    as a miss.
    """
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1:
        raise InputError("ks must be positive integers")
    if source_aligned.dim != target.dim:
        raise DimMismatch(f"dimensions differ: {source_aligned.dim} vs {target.dim}")
    kept = [(s, t) for s, t in test.pairs if s in source_aligned and t in target]
    if not kept:
        raise EmptyEvaluation("no test pair is in both vocabularies")

    n_src = source_aligned.n
    if search_space == "target_only":
        index = NeighborIndex.from_embedding(target)
        gold = [target.index(t) for _, t in kept]
        exclude = None
    elif search_space == "union":
        keys = [("source", t) for t in source_aligned.tokens] + [("target", t) for t in target.tokens]
        sort_keys = [t.encode("utf-8") + b"\x00" + side.encode() for side, t in keys]
        index = NeighborIndex(np.vstack([source_aligned.matrix, target.matrix]), keys, sort_keys)
        gold = [n_src + target.index(t) for _, t in kept]
        exclude = [[source_aligned.index(s)] for s, _ in kept]
    else:
        raise InputError(f"unknown search space {search_space!r}")

    queries = source_aligned.rows(s for s, _ in kept)
    hits = index.search(queries, ks[-1], exclude)
    rank = [list(h).index(g) if g in h else None for g, h in zip(gold, hits)]
    score = {k: sum(1 for r in rank if r is not None and r < k) / len(kept) for k in ks}
    return EvalReport("P", score, len(kept), len(test) - len(kept),
                      {"search_space": search_space, "candidates": len(index)})


def pivot_translate(l1: Embedding, l2: Embedding, pivot: Embedding, seed1: Lexicon, seed2: Lexicon,
                    test: Lexicon, ks: Sequence[int] = DEFAULT_KS,
                    variant: Union[str, Variant] = Variant.WRST, search_space: str = "union",
                    **align_kwargs) -> EvalReport:
    """Translate L1 -> L2 after aligning each onto a shared pivot language.

    ``seed1`` maps L1 -> pivot, ``seed2`` maps L2 -> pivot and ``test`` maps
    L1 -> L2; no L1-L2 seed is used.
    """
    to_pivot_1 = train_translation(l1, pivot, seed1, variant, **align_kwargs)
    to_pivot_2 = train_translation(l2, pivot, seed2, variant, **align_kwargs)
    report = translation_eval(apply(to_pivot_1, l1), apply(to_pivot_2, l2), test, ks, search_space)
    report.params["pivot"] = True
    return report
