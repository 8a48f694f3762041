"""Closed-form optimal rotation and scale."""

from __future__ import annotations

import warnings

import numpy as np

from .errors import DimMismatch, InputError
from .linalg import check_weights, svd

__all__ = ["NonPositiveScaleWarning", "optimal_rotation", "optimal_scale"]


class NonPositiveScaleWarning(RuntimeWarning):
    """The least-squares scale came out <= 0 (anti-correlated inputs)."""


def optimal_rotation(h, allow_reflection: bool = True, method: str = "jacobi") -> np.ndarray:
    """Orthogonal ``R`` maximizing ``trace(R^T H)``, i.e. ``R = U V^T``.

    ``h`` is the cross-covariance ``sum_i b_i^T a_i``; the returned ``R``
    minimizes ``sum_i ||a_i - b_i R||^2``. With ``allow_reflection=False`` the
    result is a proper rotation: when ``det(U V^T) < 0`` the column paired
    with the smallest singular value is flipped.
    """
    h = np.asarray(h, dtype=np.float64)
    u, _, v = svd(h, method=method)
    r = u @ v.T
    if not allow_reflection and np.linalg.det(r) < 0:
        flip = np.ones(h.shape[0])
        flip[-1] = -1.0
        r = (u * flip) @ v.T
    return r


def optimal_scale(target, rotated_source, weights=None) -> float:
    """Least-squares ``s`` for ``A ~ s * B~`` with ``B~`` already rotated.

    ``s = sum_i w_i <a_i, b~_i> / sum_i w_i ||b~_i||^2``. A result ``<= 0`` is
    returned unchanged and flagged with :class:`NonPositiveScaleWarning`.
    """
    a = np.asarray(target, dtype=np.float64)
    b = np.asarray(rotated_source, dtype=np.float64)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    inner = np.einsum("ij,ij->i", a, b)
    sq = np.einsum("ij,ij->i", b, b)
    if weights is not None:
        w = check_weights(weights, a.shape[0])
        inner = w * inner
        sq = w * sq
    denom = sq.sum()
    if not denom > 0:
        raise InputError("source has zero (weighted) norm; scale is undefined")
    s = float(inner.sum() / denom)
    if s <= 0:
        warnings.warn(f"optimal scale {s:g} is not positive", NonPositiveScaleWarning,
                      stacklevel=2)
    return s
