"""Embeddings on disk and in memory.

Files use the word2vec text layout: an optional ``n d`` header line followed
by one ``token v1 ... vd`` line per word. GloVe files are the same thing
without the header.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DimMismatch,
    DuplicateToken,
    EmbeddingFormatError,
    EmptyIntersection,
    InconsistentDimension,
    InputError,
    InvalidToken,
    MalformedFloat,
    MalformedLine,
    NonFiniteValue,
    OutOfRange,
)

__all__ = [
    "Embedding",
    "AlignedPair",
    "ContextualEmbedding",
    "load_text",
    "save_text",
    "intersect",
    "top_k",
    "collapse_means",
]

_FIELD_SEP = re.compile(r"[ \t]+")
_WHITESPACE = re.compile(r"\s")


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise InputError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Embedding:
    """An ordered vocabulary and one row vector per token.

    The matrix is copied on construction and made read-only.
    """

    tokens: Tuple[str, ...]
    matrix: np.ndarray
    _index: Dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        tokens = tuple(self.tokens)
        matrix = _frozen_array(self.matrix, 2)
        if len(tokens) != matrix.shape[0]:
            raise InputError(
                f"{len(tokens)} tokens but {matrix.shape[0]} matrix rows"
            )
        if matrix.shape[1] < 1:
            raise InputError("embedding dimension must be at least 1")
        if not np.all(np.isfinite(matrix)):
            bad = int(np.argwhere(~np.isfinite(matrix))[0, 0])
            raise NonFiniteValue(f"non-finite value in row of {tokens[bad]!r}")
        index: Dict[str, int] = {}
        for i, tok in enumerate(tokens):
            if not isinstance(tok, str) or not tok:
                raise InvalidToken(f"token {i} is not a non-empty string")
            if tok in index:
                raise DuplicateToken(tok)
            index[tok] = i
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.n

    def __contains__(self, token) -> bool:
        return token in self._index

    def index(self, token: str) -> int:
        return self._index[token]

    def vector(self, token: str) -> np.ndarray:
        return self.matrix[self._index[token]]

    def rows(self, tokens: Iterable[str]) -> np.ndarray:
        return self.matrix[[self._index[t] for t in tokens]]

    def subset(self, tokens: Sequence[str]) -> "Embedding":
        return Embedding(tuple(tokens), self.rows(tokens))

    def with_matrix(self, matrix) -> "Embedding":
        return Embedding(self.tokens, matrix)


@dataclass(frozen=True, eq=False)
class AlignedPair:
    """Target ``A`` and source ``B`` over one shared, identically ordered vocabulary.

    Unpacks as ``A, B = pair`` to the two matrices.
    """

    target: Embedding
    source: Embedding

    def __post_init__(self):
        if self.target.dim != self.source.dim:
            raise DimMismatch(
                f"target dim {self.target.dim} != source dim {self.source.dim}"
            )
        if self.target.tokens != self.source.tokens:
            raise InputError("target and source tokens differ")

    @classmethod
    def from_arrays(cls, target, source, tokens: Sequence[str] | None = None) -> "AlignedPair":
        target = np.asarray(target, dtype=np.float64)
        source = np.asarray(source, dtype=np.float64)
        if target.shape != source.shape:
            raise DimMismatch(f"shapes differ: {target.shape} vs {source.shape}")
        if tokens is None:
            tokens = [f"w{i}" for i in range(target.shape[0])]
        tokens = tuple(tokens)
        return cls(Embedding(tokens, target), Embedding(tokens, source))

    @property
    def tokens(self) -> Tuple[str, ...]:
        return self.target.tokens

    @property
    def n(self) -> int:
        return self.target.n

    @property
    def dim(self) -> int:
        return self.target.dim

    def __iter__(self) -> Iterator[np.ndarray]:
        yield self.target.matrix
        yield self.source.matrix

    def head(self, k: int) -> "AlignedPair":
        return AlignedPair(top_k(self.target, k), top_k(self.source, k))


@dataclass(frozen=True, eq=False)
class ContextualEmbedding:
    """One or more vectors per token, one per occurrence context."""

    tokens: Tuple[str, ...]
    instances: Tuple[np.ndarray, ...]

    def __post_init__(self):
        tokens = tuple(self.tokens)
        if len(set(tokens)) != len(tokens):
            raise InputError("contextual tokens must be unique")
        if len(tokens) != len(self.instances):
            raise InputError("need one instance list per token")
        frozen = []
        dim = None
        for tok, inst in zip(tokens, self.instances):
            arr = _frozen_array(np.atleast_2d(np.asarray(inst, dtype=np.float64)), 2)
            if arr.shape[0] == 0:
                raise InputError(f"token {tok!r} has no instances")
            if dim is None:
                dim = arr.shape[1]
            elif arr.shape[1] != dim:
                raise DimMismatch(f"token {tok!r} has dim {arr.shape[1]}, expected {dim}")
            if not np.all(np.isfinite(arr)):
                raise NonFiniteValue(f"non-finite instance for {tok!r}")
            frozen.append(arr)
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "instances", tuple(frozen))

    @property
    def dim(self) -> int:
        return self.instances[0].shape[1]

    def counts(self) -> np.ndarray:
        return np.array([inst.shape[0] for inst in self.instances])


def _parse_header(fields):
    if len(fields) != 2:
        return None
    try:
        n, d = int(fields[0]), int(fields[1])
    except ValueError:
        return None
    if n <= 0 or d <= 0:
        return None
    return n, d


def load_text(path: Union[str, os.PathLike], has_header: Union[str, bool] = "auto") -> Embedding:
    """Read an embedding in word2vec/GloVe text format.

    Parameters
    ----------
    path : path-like
        File to read (UTF-8).
    has_header : {"auto", True, False}
        With ``"auto"`` the first line is a header iff it is exactly two
        positive integers.

    Raises
    ------
    EmbeddingFormatError
        On malformed lines, bad floats, inconsistent dimension, duplicate
        tokens or non-finite values. The 1-based line number is attached.
    """
    if has_header not in ("auto", True, False):
        raise InputError(f"has_header must be 'auto', True or False, not {has_header!r}")
    tokens = []
    rows = []
    seen = set()
    header = None
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            fields = [f for f in _FIELD_SEP.split(line) if f]
            if not fields:
                continue
            if lineno == 1 and has_header is not False:
                header = _parse_header(fields)
                if header is not None:
                    dim = header[1]
                    continue
                if has_header is True:
                    raise MalformedLine("expected 'n d' header", line=lineno)
            if len(fields) < 2:
                raise MalformedLine("expected a token followed by values", line=lineno)
            tok = fields[0]
            try:
                vec = np.array(fields[1:], dtype=np.float64)
            except ValueError:
                for col, text in enumerate(fields[1:], start=2):
                    try:
                        float(text)
                    except ValueError:
                        raise MalformedFloat(f"cannot parse {text!r} as a float",
                                             line=lineno, column=col) from None
                raise MalformedLine("unparseable values", line=lineno)
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise InconsistentDimension(
                    f"expected {dim} values, found {vec.shape[0]}", line=lineno
                )
            if not np.all(np.isfinite(vec)):
                raise NonFiniteValue(f"non-finite value for {tok!r}", line=lineno)
            if tok in seen:
                raise DuplicateToken(tok, line=lineno)
            seen.add(tok)
            tokens.append(tok)
            rows.append(vec)
    if not rows:
        raise EmbeddingFormatError(f"no vectors found in {os.fspath(path)!r}")
    if header is not None and header[0] != len(rows):
        raise MalformedLine(f"header announces {header[0]} rows, file has {len(rows)}", line=1)
    return Embedding(tuple(tokens), np.vstack(rows))


def atomic_write_text(path: Union[str, os.PathLike], text: str) -> None:
    """Write via a temporary file in the same directory and rename into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_embedding(emb: Embedding, with_header: bool = False, precision: int = 9) -> str:
    for tok in emb.tokens:
        if _WHITESPACE.search(tok):
            raise InvalidToken(f"token {tok!r} contains whitespace")
    fmt = f"%.{precision}g"
    lines = [f"{emb.n} {emb.dim}"] if with_header else []
    for tok, row in zip(emb.tokens, emb.matrix):
        lines.append(tok + " " + " ".join(fmt % v for v in row))
    return "\n".join(lines) + "\n"


def save_text(emb: Embedding, path, with_header: bool = False, precision: int = 9) -> None:
    """Write ``emb`` in text format; the file appears atomically or not at all."""
    if precision < 9:
        raise InputError("precision below 9 significant digits does not round-trip")
    atomic_write_text(path, format_embedding(emb, with_header, precision))


def intersect(a: Embedding, b: Embedding, order: str = "target_order") -> AlignedPair:
    """Restrict two embeddings to their shared vocabulary.

    ``target_order`` keeps the order of ``a``. ``frequency_rank`` sorts by the
    mean of each token's positions in ``a`` and ``b`` (both files assumed
    frequency sorted), breaking ties by position in ``a``.
    """
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    shared = [t for t in a.tokens if t in b]
    if not shared:
        raise EmptyIntersection("embeddings share no tokens")
    if order == "frequency_rank":
        shared.sort(key=lambda t: (a.index(t) + b.index(t), a.index(t)))
    elif order != "target_order":
        raise InputError(f"unknown order {order!r}")
    return AlignedPair(a.subset(shared), b.subset(shared))


def top_k(emb: Embedding, k: int) -> Embedding:
    if k < 1 or k > emb.n:
        raise OutOfRange(f"k={k} outside 1..{emb.n}")
    if k == emb.n:
        return emb
    return Embedding(emb.tokens[:k], emb.matrix[:k])


def collapse_means(ctx: ContextualEmbedding) -> Embedding:
    """One row per token: the mean of its instance vectors."""
    return Embedding(ctx.tokens, np.vstack([inst.mean(axis=0) for inst in ctx.instances]))
