"""Random weights and test functions for property checks and trials.

Three weight families cover small and large characteristics:

* ``log-uniform``: i.i.d. ``exp(U[-3, 3])``;
* ``power``: ``d(x, x0)^a`` with ``a`` in ``(-1/2, 1/2)`` and ``d`` the grid
  distance shifted by half a cell, so the weight stays finite;
* ``checkerboard``: two levels alternating over blocks of random length.

``mixed`` picks one of the three per draw.
"""
from __future__ import annotations

import numpy as np

LOG_RANGE = 3.0
WEIGHT_KINDS = ("log-uniform", "power", "checkerboard")


def log_uniform(rng: np.random.Generator, n: int, size=None) -> np.ndarray:
    shape = (n,) if size is None else (size, n)
    return np.exp(rng.uniform(-LOG_RANGE, LOG_RANGE, shape))


def power_type(rng: np.random.Generator, n: int, cyclic: bool = False) -> np.ndarray:
    """``(|x - x0| + 1/2)^a / n^a`` on the grid ``0..n-1``."""
    x0 = rng.integers(n)
    a = rng.uniform(-0.5, 0.5)
    dist = np.abs(np.arange(n) - x0).astype(np.float64)
    if cyclic:
        dist = np.minimum(dist, n - dist)
    return ((dist + 0.5) / n) ** a


def checkerboard(rng: np.random.Generator, n: int) -> np.ndarray:
    """Two levels in ``[e^-3, e^3]`` alternating over blocks of ``2^k`` points."""
    low, high = np.sort(np.exp(rng.uniform(-LOG_RANGE, LOG_RANGE, 2)))
    block = 2 ** int(rng.integers(0, max(1, int(np.log2(n))) + 1))
    return np.where((np.arange(n) // block) % 2 == 0, low, high)


def sample_weight(rng: np.random.Generator, n: int, kind: str = "log-uniform", cyclic: bool = False) -> np.ndarray:
    if kind == "mixed":
        kind = WEIGHT_KINDS[int(rng.integers(len(WEIGHT_KINDS)))]
    if kind == "log-uniform":
        return log_uniform(rng, n)
    if kind == "power":
        return power_type(rng, n, cyclic)
    if kind == "checkerboard":
        return checkerboard(rng, n)
    raise ValueError(f"unknown weight distribution {kind!r}")


def sample_function(rng: np.random.Generator, n: int, nonnegative: bool = False) -> np.ndarray:
    """Gaussian values on a random support of at least one point."""
    f = rng.standard_normal(n)
    keep = rng.random(n) < rng.uniform(0.3, 1.0)
    keep[rng.integers(n)] = True
    f = np.where(keep, f, 0.0)
    return np.abs(f) if nonnegative else f


def sample_exponent_recip(rng: np.random.Generator, low: float = 0.0, high: float = 1.0, p_endpoint: float = 0.15) -> float:
    """Reciprocal in ``[low, high]``, hitting each endpoint with probability ``p_endpoint``."""
    u = rng.random()
    if u < p_endpoint:
        return float(low)
    if u < 2 * p_endpoint:
        return float(high)
    return float(rng.uniform(low, high))
