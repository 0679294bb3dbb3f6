"""Lebesgue (quasi-)norms on finite measure spaces.

Exponents are passed as reciprocals.  All routines scale by the maximum
before raising to powers, so very large or small values do not overflow.
"""
from __future__ import annotations

import numpy as np


def lp_norm(f, mass, recip: float, axis: int = -1) -> np.ndarray:
    """``(sum |f|^p mass)^(1/p)`` along ``axis``; ``recip = 0`` gives the max.

    ``mass`` broadcasts against ``f`` along ``axis``.
    """
    a = np.abs(np.asarray(f)).astype(np.float64, copy=False)
    top = a.max(axis=axis, keepdims=True) if a.size else a
    if recip == 0:
        return np.squeeze(top, axis=axis)
    mass = _align(mass, a.ndim, axis)
    safe = np.where(top > 0, top, 1.0)
    acc = ((a / safe) ** (1.0 / recip) * mass).sum(axis=axis, keepdims=True)
    out = np.where(top > 0, top * acc**recip, 0.0)
    return np.squeeze(out, axis=axis)


def weighted_norm(f, weight, mass, recip: float) -> float:
    """``||f||_{L^p_w} = ||f w||_p``."""
    return float(lp_norm(np.asarray(f) * weight, mass, recip))


def mixed_norm(f, mass1, mass2, recips) -> np.ndarray:
    """Iterated norm on a product space, innermost (axis 0) first.

    ``f`` has shape ``(N1, N2, ...)``; the result drops the first two axes.
    """
    inner = lp_norm(f, mass1, recips[0], axis=0)
    return lp_norm(inner, mass2, recips[1], axis=0)


def _align(mass, ndim, axis):
    mass = np.asarray(mass, dtype=np.float64)
    axis = axis % ndim
    shape = [1] * ndim
    shape[axis] = mass.size
    return mass.reshape(shape)


def weak_norm(f, weight, norm_of_indicator) -> float:
    """Weak-type quasi-norm ``sup_lam lam * N(1_{|f| > lam} w)``.

    ``norm_of_indicator`` evaluates the strong norm of a function on the same
    space.  The supremum over thresholds is attained in the limit from below
    at the distinct values of ``|f|``, where the level set is ``{|f| >= v}``;
    every such value is scanned.
    """
    profile = weak_level_profile(f, weight, norm_of_indicator)
    return max((val for _, val in profile), default=0.0)


def weak_level_profile(f, weight, norm_of_indicator) -> list[tuple[float, float]]:
    """``(level, level * N(1_{|f| >= level} w))`` for every distinct nonzero level."""
    a = np.abs(np.asarray(f)).astype(np.float64, copy=False)
    return [
        (float(level), float(level * norm_of_indicator((a >= level) * weight)))
        for level in np.unique(a[a > 0])
    ]
