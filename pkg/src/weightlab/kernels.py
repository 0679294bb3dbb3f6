"""Backend selection for the set-basis kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``WEIGHTLAB_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy fallback is used. ``BACKEND`` names the active one.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels_py

_compiled = None
if os.environ.get("WEIGHTLAB_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


@dataclass(frozen=True, eq=False)
class CSR:
    """Set basis in compressed-row form plus the derived point-to-set table."""

    indptr: np.ndarray
    indices: np.ndarray
    n: int
    sizes: np.ndarray = field(init=False)
    # row x lists the sets containing point x (ascending), padded with the
    # sentinel index S
    point_sets: np.ndarray = field(init=False)

    def __post_init__(self):
        indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        sizes = np.diff(indptr)
        object.__setattr__(self, "sizes", sizes)
        n_sets = len(sizes)
        owner = np.repeat(np.arange(n_sets, dtype=np.int64), sizes)
        order = np.lexsort((owner, indices))
        pts, sets = indices[order], owner[order]
        degree = np.bincount(pts, minlength=self.n)
        width = int(degree.max()) if len(degree) else 0
        table = np.full((self.n, max(width, 1)), n_sets, dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(degree)[:-1]])
        slot = np.arange(len(pts)) - np.repeat(starts, degree)
        table[pts, slot] = sets
        object.__setattr__(self, "point_sets", table)

    @property
    def n_sets(self) -> int:
        return len(self.sizes)


def _rows(vals):
    arr = np.asarray(vals, dtype=np.float64)
    squeeze = arr.ndim == 1
    return np.ascontiguousarray(np.atleast_2d(arr)), squeeze


def set_sums(vals, mass, csr: CSR, backend=None):
    """Per-set integrals ``sum_{x in U} vals[x] * mass[x]``; shape ``(K, S)``."""
    arr, squeeze = _rows(vals)
    mass = np.ascontiguousarray(mass, dtype=np.float64)
    if _use_compiled(backend):
        out = _compiled.set_sums(arr, mass, csr.indptr, csr.indices)
    else:
        out = _kernels_py.set_sums(arr, mass, csr)
    return out[0] if squeeze else out


def set_lp_norms(vals, mass, csr: CSR, recip: float, backend=None):
    """Per-set ``L^p(U)`` (quasi-)norms of ``|vals|`` with ``1/p = recip``."""
    arr, squeeze = _rows(vals)
    mass = np.ascontiguousarray(mass, dtype=np.float64)
    if _use_compiled(backend):
        out = _compiled.set_lp_norms(arr, mass, csr.indptr, csr.indices, float(recip))
    else:
        out = _kernels_py.set_lp_norms(arr, mass, csr, float(recip))
    return out[0] if squeeze else out


def scatter_max(setvals, csr: CSR, backend=None):
    """Pointwise max over the sets containing each point, with the argmax set."""
    arr, squeeze = _rows(setvals)
    if _use_compiled(backend):
        out, arg = _compiled.scatter_max(arr, csr.indptr, csr.indices, csr.n)
    else:
        out, arg = _kernels_py.scatter_max(arr, csr)
    return (out[0], arg[0]) if squeeze else (out, arg)


def scatter_add(setvals, csr: CSR, backend=None):
    """Transpose of set summation: ``out[x] = sum_{U containing x} setvals[U]``."""
    arr, squeeze = _rows(setvals)
    if _use_compiled(backend):
        out = _compiled.scatter_add(arr, csr.indptr, csr.indices, csr.n)
    else:
        out = _kernels_py.scatter_add(arr, csr)
    return out[0] if squeeze else out


def _use_compiled(backend):
    if backend is None:
        return _compiled is not None
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return True
    if backend == "python":
        return False
    raise ValueError(f"unknown backend {backend!r}")
