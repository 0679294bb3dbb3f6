"""Two-weight characteristics over a set basis.

The central quantity is

    [w, v]_(s, r) = max_U  mu(U)^(-1/s - 1/r) ||w||_{L^s(U)} ||1/v||_{L^r(U)},

evaluated exactly as a finite maximum.  Exponents are exponent-like values
(numbers, ``"a/b"`` strings, :class:`~weightlab.exponents.Exponent`).
Weights may be a single vector or a batch of shape ``(K, N)``; batched input
returns one value per row.
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .exponents import as_recip, dual_recip
from .space import SetBasis


def _per_set(w, v, s_recip, r_recip, basis: SetBasis):
    mass, csr = basis.mass, basis.csr
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    ws = kernels.set_lp_norms(w, mass, csr, s_recip)
    vs = kernels.set_lp_norms(1.0 / v, mass, csr, r_recip)
    scale = basis.measures ** (-(s_recip + r_recip))
    return ws * vs * scale


def characteristic_argmax(w, v, s, r, basis: SetBasis):
    """``([w, v]_(s, r), index of a maximizing basis set)``."""
    vals = _per_set(w, v, as_recip(s), as_recip(r), basis)
    arg = np.argmax(vals, axis=-1)
    return np.take_along_axis(vals, np.expand_dims(arg, -1), -1)[..., 0], arg


def characteristic(w, v, s, r, basis: SetBasis):
    """The weight characteristic ``[w, v]_(s, r)`` (float, or array for batches)."""
    vals = _per_set(w, v, as_recip(s), as_recip(r), basis)
    out = vals.max(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def characteristic_recips(w, v, s_recip: float, r_recip: float, basis: SetBasis):
    """Same as :func:`characteristic` with exponents given as reciprocals."""
    out = _per_set(w, v, s_recip, r_recip, basis).max(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def characteristic_p(w, p, basis: SetBasis):
    """One-weight characteristic ``[w]_p = [w, w]_(p, p')`` for ``p >= 1``."""
    pr = as_recip(p)
    if pr > 1 + 1e-12:
        raise ValueError("[w]_p needs p >= 1")
    return characteristic_recips(w, w, pr, dual_recip(pr), basis)


def classical_ap(w, p, basis: SetBasis):
    """Classical ``A_p`` constant ``sup_U avg(w) avg(w^(1-p'))^(p-1)`` for ``1 < p < inf``."""
    pr = as_recip(p)
    if not 0 < pr < 1:
        raise ValueError("the classical A_p constant needs 1 < p < inf")
    p_val = 1.0 / pr
    pd = 1.0 / (1.0 - pr)
    w = np.asarray(w, dtype=np.float64)
    avg_w = kernels.set_sums(w, basis.mass, basis.csr) / basis.measures
    avg_dual = kernels.set_sums(w ** (1.0 - pd), basis.mass, basis.csr) / basis.measures
    out = (avg_w * avg_dual ** (p_val - 1.0)).max(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def reverse_holder(w, s, basis: SetBasis):
    """Reverse Hoelder characteristic ``[w, 1/w]_(s, 1)``."""
    w = np.asarray(w, dtype=np.float64)
    return characteristic_recips(w, 1.0 / w, as_recip(s), 1.0, basis)


def fujii_wilson(w, basis: SetBasis) -> float:
    """``max_U mu(U)^-1 sum_{x in U} M(w 1_U)(x) mu(x)``.

    ``M(w 1_U)`` is evaluated exactly for every basis set, so the cost is
    quadratic in the number of sets.
    """
    from .maximal import maximal

    w = np.asarray(w, dtype=np.float64)
    mass = basis.mass
    best = 0.0
    chunk = 256
    sets = basis.sets
    for start in range(0, len(sets), chunk):
        block = sets[start : start + chunk]
        local = np.zeros((len(block), basis.n))
        for i, u in enumerate(block):
            local[i, u] = w[u]
        mloc = maximal(local, basis)
        for i, u in enumerate(block):
            val = float((mloc[i, u] * mass[u]).sum() / basis.measures[start + i])
            best = max(best, val)
    return best


def tensor_weight(w1, w2) -> np.ndarray:
    """``(w1 ⊗ w2)(x1, x2) = w1(x1) w2(x2)`` in the flat product layout."""
    return np.outer(np.asarray(w1, dtype=np.float64), np.asarray(w2, dtype=np.float64)).ravel()
