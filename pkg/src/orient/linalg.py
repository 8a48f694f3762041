"""Small dense kernels: centroids, cross-covariance, SVD, norms."""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Optional, Tuple

import numpy as np

from . import _parallel
from .errors import DimMismatch, IllConditioned, InputError

__all__ = [
    "SvdResult",
    "centroid",
    "cross_covariance",
    "svd",
    "frobenius_sq",
    "orthogonality_error",
    "check_weights",
]

MAX_SWEEPS = 100
ROW_BLOCK = 4096


class SvdResult(NamedTuple):
    """``m == u @ diag(singular_values) @ v.T``; note ``v``, not ``v.T``."""

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray


def check_weights(weights, n: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise DimMismatch(f"expected {n} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise InputError("weights must be finite and nonnegative")
    if not w.sum() > 0:
        raise InputError("weights sum to zero")
    return w


def centroid(points, weights=None) -> np.ndarray:
    """Mean row of ``points``, optionally weighted.

    >>> centroid([[1.0, 0.0], [3.0, 0.0]], weights=[3, 1])
    array([1.5, 0. ])
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise InputError("centroid needs an (n, d) array with n >= 1")
    if weights is None:
        return x.sum(axis=0) / x.shape[0]
    w = check_weights(weights, x.shape[0])
    return (w[:, None] * x).sum(axis=0) / w.sum()


def cross_covariance(target, source, weights=None) -> np.ndarray:
    """Sum of weighted outer products ``H = sum_i w_i b_i^T a_i``.

    ``H[p, q] = sum_i w_i * B[i, p] * A[i, q]`` with rows of ``A`` the target
    and rows of ``B`` the source. Rows are processed in fixed blocks whose
    partial sums are combined pairwise, so the result does not depend on the
    worker count.
    """
    a = np.asarray(target, dtype=np.float64)
    b = np.asarray(source, dtype=np.float64)
    if a.ndim != 2 or a.shape != b.shape:
        raise DimMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    w = None if weights is None else check_weights(weights, a.shape[0])

    def block(rows: range) -> np.ndarray:
        sl = slice(rows.start, rows.stop)
        bb = b[sl]
        if w is not None:
            bb = bb * w[sl, None]
        return bb.T @ a[sl]

    parts = _parallel.map_blocks(block, a.shape[0], ROW_BLOCK)
    return _parallel.pairwise_sum(parts)


def frobenius_sq(m) -> float:
    m = np.asarray(m, dtype=np.float64)
    return float(np.sum(m * m))


def orthogonality_error(q) -> float:
    """Max-abs entry of ``q^T q - I``."""
    q = np.asarray(q, dtype=np.float64)
    return float(np.max(np.abs(q.T @ q - np.eye(q.shape[1]))))


@lru_cache(maxsize=32)
def _caterpillar(m: int) -> np.ndarray:
    # Row permutation advancing a round-robin tournament by one round: slot i
    # of the top half plays slot i of the bottom half, and after m - 1 rounds
    # every pair of rows has met exactly once.
    h = m // 2
    top = list(range(h))
    bottom = list(range(h, m))
    new_top = [top[0], bottom[0]] + top[1:h - 1]
    new_bottom = bottom[1:] + [top[h - 1]]
    if h == 1:
        new_top, new_bottom = top, bottom
    return np.array(new_top + new_bottom, dtype=np.intp)


def _complete_basis(u: np.ndarray, good: np.ndarray) -> np.ndarray:
    # Fill the columns of u flagged as not good with unit vectors orthogonal
    # to everything already accepted (twice-iterated Gram-Schmidt).
    d = u.shape[0]
    basis = [u[:, j] for j in range(u.shape[1]) if good[j]]
    fill = []
    for k in range(d):
        if len(basis) == d:
            break
        e = np.zeros(d)
        e[k] = 1.0
        for _ in range(2):
            for v in basis:
                e = e - (v @ e) * v
        norm = np.linalg.norm(e)
        if norm > 0.5:
            e = e / norm
            basis.append(e)
            fill.append(e)
    out = u.copy()
    missing = np.flatnonzero(~good)
    for j, e in zip(missing, fill):
        out[:, j] = e
    return out


def _jacobi_svd(m: np.ndarray, max_sweeps: int) -> SvdResult:
    d = m.shape[0]
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0.0:
        eye = np.eye(d)
        return SvdResult(eye, np.zeros(d), eye.copy())
    # Row k of ``x`` holds column k of the working matrix W = M V followed by
    # column k of V, so every round operates on two contiguous half blocks.
    # An odd size gets a zero dummy row, which never rotates.
    size = d + (d % 2)
    h = size // 2
    x = np.zeros((size, 2 * d))
    x[:d, :d] = (m / scale).T
    x[:d, d:] = np.eye(d)
    ids = np.arange(size)
    perm = _caterpillar(size)
    tol = np.finfo(np.float64).eps * d
    for _sweep in range(max_sweeps):
        off = 0.0
        for _round in range(size - 1):
            top, bottom = x[:h], x[h:]
            wt, wb = top[:, :d], bottom[:, :d]
            alpha = np.einsum("ij,ij->i", wt, wt)
            beta = np.einsum("ij,ij->i", wb, wb)
            gamma = np.einsum("ij,ij->i", wt, wb)
            denom = np.sqrt(alpha * beta)
            with np.errstate(divide="ignore", invalid="ignore"):
                cosine = np.where(denom > 0, np.abs(gamma) / denom, 0.0)
                active = cosine > tol
                if np.any(active):
                    off = max(off, float(cosine.max()))
                    zeta = np.where(active, (beta - alpha) / (2.0 * gamma), 0.0)
                    t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                    t = np.where(active, t, 0.0)
                    c = (1.0 / np.sqrt(1.0 + t * t))[:, None]
                    s = c * t[:, None]
                    new_top = c * top - s * bottom
                    x[h:] = s * top + c * bottom
                    x[:h] = new_top
            x = x[perm]
            ids = ids[perm]
        if off <= tol:
            break
    else:
        raise IllConditioned(f"Jacobi SVD did not converge in {max_sweeps} sweeps")

    back = np.empty(size, dtype=np.intp)
    back[ids] = np.arange(size)
    x = x[back][:d]
    w = x[:, :d].T
    v = x[:, d:].T
    sigma = np.sqrt(np.einsum("ij,ij->j", w, w))
    good = sigma > np.finfo(np.float64).tiny * d
    u = np.zeros_like(w)
    u[:, good] = w[:, good] / sigma[good]
    sigma[~good] = 0.0
    if not np.all(good):
        u = _complete_basis(u, good)
    order = np.argsort(-sigma, kind="stable")
    return SvdResult(u[:, order], sigma[order] * scale, np.ascontiguousarray(v[:, order]))


def svd(m, method: str = "jacobi", max_sweeps: int = MAX_SWEEPS) -> SvdResult:
    """SVD of a square matrix.

    Parameters
    ----------
    m : (d, d) array_like
        Finite square matrix.
    method : {"jacobi", "lapack"}
        ``"jacobi"`` is a one-sided (Hestenes) Jacobi iteration with a
        round-robin pair ordering; ``"lapack"`` defers to ``numpy.linalg.svd``.
    max_sweeps : int
        Jacobi sweep cap; exceeding it raises :class:`IllConditioned`.

    Returns
    -------
    SvdResult
        Orthogonal ``u`` and ``v`` and nonincreasing nonnegative singular
        values with ``m ~= u @ diag(s) @ v.T``.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"svd expects a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("svd input contains non-finite values")
    if method == "jacobi":
        return _jacobi_svd(a, max_sweeps)
    if method == "lapack":
        try:
            u, s, vt = np.linalg.svd(a)
        except np.linalg.LinAlgError as exc:
            raise IllConditioned(str(exc)) from exc
        return SvdResult(u, s, vt.T)
    raise InputError(f"unknown svd method {method!r}")
