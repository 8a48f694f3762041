"""Alignment recipes: rotation, translation, scaling, weighting, normalizing.

Every recipe returns a :class:`SimilarityTransform` that maps a source row
``x`` to ``s * ((x - b_mean) @ R) + a_mean``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from . import _parallel
from .embedding import AlignedPair, ContextualEmbedding, Embedding, atomic_write_text, collapse_means, intersect
from .errors import DimMismatch, InputError, SingularNormalMatrix
from .linalg import centroid, cross_covariance, orthogonality_error
from .procrustes import optimal_rotation, optimal_scale

__all__ = [
    "Variant",
    "SimilarityTransform",
    "AffineTransform",
    "ZeroNormRowWarning",
    "align",
    "apply",
    "reference_matrix",
    "pair_weights",
    "align_contextual",
    "all_pairs_cross_covariance",
    "affine_baseline",
    "affine_objective",
    "ensemble_average",
]

ORTHOGONALITY_TOL = 1e-8
APPLY_BLOCK = 8192


class ZeroNormRowWarning(RuntimeWarning):
    pass


class Variant(str, Enum):
    """Alignment recipes, keyed by their short mnemonic."""

    R = "r"  # rotation only
    RT = "rt"  # center, rotate, translate onto the target mean
    CENTERED = "c"  # center both, rotate; compare against centered target
    RS = "rs"  # rotate, then scale
    RST = "rst"  # center, rotate, scale, translate
    WR = "wr"  # norm-weighted rotation
    WRST = "wrst"  # norm-weighted center, rotate, scale, translate
    NORM = "norm"  # rotate unit-normalized rows

    @classmethod
    def parse(cls, value: Union[str, "Variant"]) -> "Variant":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise InputError(f"unknown variant {value!r}; expected one of {names}") from None

    @property
    def centers(self) -> bool:
        return self in (Variant.RT, Variant.CENTERED, Variant.RST, Variant.WRST)

    @property
    def scales(self) -> bool:
        return self in (Variant.RS, Variant.RST, Variant.WRST)

    @property
    def weighted(self) -> bool:
        return self in (Variant.WR, Variant.WRST)


_ALIASES = {
    "r_t": "rt",
    "centered": "c",
    "r_s": "rs",
    "r_s_t": "rst",
    "w_r": "wr",
    "w_r_s_t": "wrst",
    "normalized": "norm",
}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True, eq=False)
class SimilarityTransform:
    rotation: np.ndarray
    scale: float = 1.0
    source_centroid: Optional[np.ndarray] = None
    target_centroid: Optional[np.ndarray] = None
    variant: Variant = Variant.R

    def __post_init__(self):
        r = np.array(self.rotation, dtype=np.float64)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise DimMismatch(f"rotation must be square, got {r.shape}")
        d = r.shape[0]
        if not np.all(np.isfinite(r)) or orthogonality_error(r) > ORTHOGONALITY_TOL:
            raise InputError("rotation is not orthogonal to within 1e-8")
        if not np.isfinite(self.scale):
            raise InputError("scale must be finite")
        cents = []
        for c in (self.source_centroid, self.target_centroid):
            c = np.zeros(d) if c is None else np.array(c, dtype=np.float64)
            if c.shape != (d,) or not np.all(np.isfinite(c)):
                raise DimMismatch(f"centroids must be finite {d}-vectors")
            c.setflags(write=False)
            cents.append(c)
        r.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "source_centroid", cents[0])
        object.__setattr__(self, "target_centroid", cents[1])
        object.__setattr__(self, "variant", Variant.parse(self.variant))

    @property
    def d(self) -> int:
        return self.rotation.shape[0]

    @classmethod
    def identity(cls, d: int) -> "SimilarityTransform":
        return cls(np.eye(d))

    def transform(self, x) -> np.ndarray:
        """Map an ``(n, d)`` array (or a single ``d``-vector) of source rows."""
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.d:
            raise DimMismatch(f"expected dim {self.d}, got {x.shape[1]}")

        def block(rows: range) -> np.ndarray:
            part = x[rows.start:rows.stop] - self.source_centroid
            return self.scale * (part @ self.rotation) + self.target_centroid

        parts = _parallel.map_blocks(block, x.shape[0], APPLY_BLOCK)
        out = np.vstack(parts) if parts else np.empty((0, self.d))
        return out[0] if single else out

    def to_json(self) -> str:
        """Serialize with a fixed key order and 17 significant digits."""
        vec = lambda v: "[" + ", ".join(_fmt(x) for x in v) + "]"
        return (
            "{\n"
            f'  "variant": "{self.variant.value}",\n'
            f'  "d": {self.d},\n'
            f'  "rotation": {vec(self.rotation.ravel())},\n'
            f'  "scale": {_fmt(self.scale)},\n'
            f'  "source_centroid": {vec(self.source_centroid)},\n'
            f'  "target_centroid": {vec(self.target_centroid)}\n'
            "}\n"
        )

    @classmethod
    def from_json(cls, text: str) -> "SimilarityTransform":
        doc = json.loads(text)
        try:
            d = int(doc["d"])
            rotation = np.asarray(doc["rotation"], dtype=np.float64)
            if rotation.shape != (d * d,):
                raise DimMismatch(f"rotation has {rotation.size} entries, expected {d * d}")
            return cls(
                rotation.reshape(d, d),
                doc["scale"],
                doc["source_centroid"],
                doc["target_centroid"],
                doc["variant"],
            )
        except KeyError as exc:
            raise InputError(f"transform JSON lacks field {exc}") from None

    def save(self, path) -> None:
        atomic_write_text(path, self.to_json())

    @classmethod
    def load(cls, path) -> "SimilarityTransform":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def apply(transform: SimilarityTransform, emb: Embedding) -> Embedding:
    """Transform every row of ``emb``; tokens are kept."""
    if emb.dim != transform.d:
        raise DimMismatch(f"embedding dim {emb.dim} != transform dim {transform.d}")
    return Embedding(emb.tokens, transform.transform(emb.matrix))


def pair_weights(target, source, policy: str = "product") -> np.ndarray:
    """Per-pair weights from row norms, rescaled so the largest is 1.

    The rescaling leaves every recipe unchanged and makes equal norms give
    weights of exactly 1.
    """
    na = np.linalg.norm(np.asarray(target, dtype=np.float64), axis=1)
    nb = np.linalg.norm(np.asarray(source, dtype=np.float64), axis=1)
    if np.any(na == 0) or np.any(nb == 0):
        raise InputError("zero-norm row cannot be weighted by its norm")
    if policy == "product":
        w = na * nb
    elif policy == "min":
        w = np.minimum(na, nb)
    elif policy == "mean":
        w = 0.5 * (na + nb)
    else:
        raise InputError(f"unknown weight policy {policy!r}")
    return w / w.max()


def _unit_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def align(
    pair: AlignedPair,
    variant: Union[str, Variant] = Variant.R,
    *,
    allow_reflection: bool = True,
    weight_policy: str = "product",
    literal_scale: bool = False,
    svd_method: str = "jacobi",
) -> SimilarityTransform:
    """Learn the transform taking ``pair.source`` onto ``pair.target``.

    Parameters
    ----------
    pair : AlignedPair
        Target ``A`` and source ``B`` with corresponding rows.
    variant : Variant or str
        ``r`` rotation; ``rt`` center, rotate, translate back; ``c`` center and
        rotate (compare against the centered target); ``rs`` rotate and scale;
        ``rst`` center, rotate, scale, translate; ``wr`` / ``wrst`` the same
        with per-pair norm weights; ``norm`` rotation of unit-normalized rows.
    allow_reflection : bool
        If False, restrict ``R`` to proper rotations (det = +1).
    weight_policy : {"product", "min", "mean"}
        How the two row norms of a pair combine into its weight.
    literal_scale : bool
        For ``rst``/``wrst`` only: compute the scale from the raw, uncentered,
        unrotated rows instead of the centered rotated ones.
    svd_method : {"jacobi", "lapack"}
        Passed through to the SVD.
    """
    variant = Variant.parse(variant)
    a, b = pair
    if a.shape[0] < 2:
        raise InputError("alignment needs at least 2 corresponding rows")

    if variant is Variant.NORM:
        norms = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
        keep = norms > 0
        if not np.all(keep):
            warnings.warn(f"dropping {int((~keep).sum())} zero-norm row pair(s)",
                          ZeroNormRowWarning, stacklevel=2)
            a, b = a[keep], b[keep]
            if a.shape[0] < 2:
                raise InputError("fewer than 2 nonzero row pairs remain")
        h = cross_covariance(_unit_rows(a), _unit_rows(b))
        r = optimal_rotation(h, allow_reflection, method=svd_method)
        return SimilarityTransform(r, variant=variant)

    w = pair_weights(a, b, weight_policy) if variant.weighted else None
    if variant.centers:
        a_mean = centroid(a, w)
        b_mean = centroid(b, w)
        a0, b0 = a - a_mean, b - b_mean
    else:
        a_mean = b_mean = np.zeros(a.shape[1])
        a0, b0 = a, b

    r = optimal_rotation(cross_covariance(a0, b0, w), allow_reflection, method=svd_method)

    s = 1.0
    if variant.scales:
        if literal_scale and variant.centers:
            s = optimal_scale(a, b, w)
        else:
            s = optimal_scale(a0, b0 @ r, w)

    if variant is Variant.CENTERED:
        a_mean = np.zeros(a.shape[1])
    if not variant.centers:
        b_mean = None
        a_mean = None
    return SimilarityTransform(r, s, b_mean, a_mean, variant)


def reference_matrix(pair: AlignedPair, variant: Union[str, Variant]) -> np.ndarray:
    """What a transformed source should be compared with.

    The target itself, except for the ``c`` recipe which compares against the
    centered target.
    """
    a = pair.target.matrix
    if Variant.parse(variant) is Variant.CENTERED:
        return a - centroid(a)
    return a


def align_contextual(ctx_a: ContextualEmbedding, ctx_b: ContextualEmbedding,
                     variant: Union[str, Variant] = Variant.R, **kwargs) -> SimilarityTransform:
    """Align multi-instance embeddings through their per-token means.

    Using the means gives the same centroids, cross-covariance and scale as
    aligning every instance of a token in one embedding with every instance
    of it in the other, with each token's pairs weighted equally.
    """
    pair = intersect(collapse_means(ctx_a), collapse_means(ctx_b))
    return align(pair, variant, **kwargs)


def all_pairs_cross_covariance(ctx_a: ContextualEmbedding, ctx_b: ContextualEmbedding) -> np.ndarray:
    """Literal all-instance-pairs cross-covariance over the shared tokens.

    ``H = sum_i 1/(m_Ai m_Bi) sum_j sum_j' b_ij'^T a_ij``, oriented like
    :func:`orient.linalg.cross_covariance`. Quadratic in the instance
    counts; meant as a reference, not for production use.
    """
    if ctx_a.dim != ctx_b.dim:
        raise DimMismatch(f"dimensions differ: {ctx_a.dim} vs {ctx_b.dim}")
    index_b = {t: i for i, t in enumerate(ctx_b.tokens)}
    d = ctx_a.dim
    h = np.zeros((d, d))
    shared = 0
    for tok, inst_a in zip(ctx_a.tokens, ctx_a.instances):
        if tok not in index_b:
            continue
        inst_b = ctx_b.instances[index_b[tok]]
        shared += 1
        block = np.zeros((d, d))
        for a_vec in inst_a:
            for b_vec in inst_b:
                block += np.outer(b_vec, a_vec)
        h += block / (inst_a.shape[0] * inst_b.shape[0])
    if shared == 0:
        raise InputError("contextual embeddings share no tokens")
    return h


@dataclass(frozen=True, eq=False)
class AffineTransform:
    """Unconstrained linear map ``x -> x @ m`` fitted with a ridge penalty."""

    m: np.ndarray
    gamma: float = 0.0

    def transform(self, x) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) @ self.m


def affine_objective(pair: AlignedPair, m, gamma: float) -> float:
    """``sum_i ||a_i - b_i M||^2 + gamma ||M||_F^2``."""
    a, b = pair
    m = np.asarray(m, dtype=np.float64)
    resid = a - b @ m
    return float(np.sum(resid * resid) + gamma * np.sum(m * m))


def affine_baseline(pair: AlignedPair, gamma: float = 0.0) -> AffineTransform:
    """Exact ridge least-squares map ``M = (B^T B + gamma I)^-1 B^T A``."""
    if not gamma >= 0 or not np.isfinite(gamma):
        raise InputError("gamma must be a finite nonnegative number")
    a, b = pair
    d = b.shape[1]
    if gamma == 0 and np.linalg.matrix_rank(b) < d:
        raise SingularNormalMatrix("B^T B is singular; use gamma > 0")
    gram = b.T @ b + gamma * np.eye(d)
    try:
        m = np.linalg.solve(gram, b.T @ a)
    except np.linalg.LinAlgError as exc:
        raise SingularNormalMatrix(str(exc)) from exc
    return AffineTransform(m, float(gamma))


def ensemble_average(pair: AlignedPair) -> Embedding:
    """Row-wise mean of an already aligned pair."""
    a, b = pair
    return Embedding(pair.tokens, 0.5 * (a + b))
