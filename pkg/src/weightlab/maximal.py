"""The basis maximal operator and its weighted operator norms.

``M f(x) = max over basis sets U containing x of mu(U)^-1 sum_U |f| mu``.

Operator norms are taken from ``L^p_v`` to ``L^p_w`` where
``||f||_{L^p_w} = ||f w||_p``.  They are exact at ``p = 1`` (point masses
are extremal because ``M`` is sublinear) and at ``p = inf`` (the witness
``1/v`` is extremal).  For ``1 < p < inf`` a multi-start ascent returns a
certified lower bound with its witness, together with a certified upper bound
built from per-set characteristics.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .exponents import as_recip, dual_recip
from .norms import lp_norm
from .rng import make_rng
from .space import SetBasis
from .weights import characteristic_p

log = logging.getLogger(__name__)


def set_averages(f, basis: SetBasis) -> np.ndarray:
    """``mu(U)^-1 sum_U |f| mu`` for every set; shape ``(..., S)``."""
    return kernels.set_sums(np.abs(f), basis.mass, basis.csr) / basis.measures


def maximal(f, basis: SetBasis) -> np.ndarray:
    """Basis maximal function of ``f`` (a vector or a ``(K, N)`` batch)."""
    out, _ = kernels.scatter_max(set_averages(f, basis), basis.csr)
    return out


def maximal_with_sets(f, basis: SetBasis):
    """Maximal function plus, per point, the index of a set attaining it."""
    return kernels.scatter_max(set_averages(f, basis), basis.csr)


@dataclass
class Budget:
    """Search configuration for the norm ascent."""

    restarts: int = 32
    iterations: int = 500
    seed: int = 0
    tol: float = 1e-13


@dataclass
class OpNormEstimate:
    value: float
    kind: str  # "exact" or "lower_bound"
    witness: np.ndarray
    method: str
    upper_bound: float = np.inf

    def as_dict(self, with_witness: bool = True) -> dict:
        out = {"value": self.value, "kind": self.kind, "method": self.method, "upper_bound": self.upper_bound}
        if with_witness:
            out["witness"] = self.witness.tolist()
        return out


def norm_ratio(f, w, v, p, basis: SetBasis) -> np.ndarray:
    """``||M f||_{L^p_w} / ||f||_{L^p_v}`` (rowwise for batches)."""
    pr = as_recip(p)
    f = np.abs(np.asarray(f, dtype=np.float64))
    num = lp_norm(maximal(f, basis) * w, basis.mass, pr)
    den = lp_norm(f * v, basis.mass, pr)
    return num / den


def upper_bound(w, v, p, basis: SetBasis) -> float:
    """Certified bound ``(max_x sum_{U ni x} c_U^p)^(1/p)``.

    ``c_U`` is the per-set ``(p, p')`` characteristic of ``(w, v)``.  The bound
    follows from ``(M f)^p <= sum_U avg_U(f)^p 1_U`` and Hoelder on each set.
    """
    pr = as_recip(p)
    if pr == 0:
        return opnorm_maximal(basis, w, v, np.inf).value
    mass, csr = basis.mass, basis.csr
    ws = kernels.set_lp_norms(np.asarray(w, float), mass, csr, pr)
    vs = kernels.set_lp_norms(1.0 / np.asarray(v, float), mass, csr, dual_recip(pr))
    c = ws * vs / basis.measures
    top = c.max()
    load = kernels.scatter_add((c / top) ** (1.0 / pr), csr)
    return float(top * load.max() ** pr)


def _seeds(w, v, pr, basis: SetBasis, budget: Budget) -> np.ndarray:
    n = basis.n
    pd = dual_recip(pr)
    rng = make_rng(budget.seed, "opnorm-seeds")
    if pd > 0:
        log_base = -np.log(v) / (1.0 - pr)
        base = np.exp(log_base - log_base.max())
    else:
        base = np.ones(n)
    rows = [base]
    # sets with the largest per-set characteristic
    ws = kernels.set_lp_norms(w, basis.mass, basis.csr, pr)
    vs = kernels.set_lp_norms(1.0 / v, basis.mass, basis.csr, pd)
    per_set = ws * vs / basis.measures
    for idx in np.argsort(-per_set, kind="stable")[: max(0, budget.restarts // 3)]:
        row = np.zeros(n)
        u = basis.sets[idx]
        row[u] = base[u]
        rows.append(row)
    # point masses where w / v is largest
    for x in np.argsort(-(w / v), kind="stable")[: max(0, budget.restarts // 4)]:
        row = np.zeros(n)
        row[x] = 1.0
        rows.append(row)
    while len(rows) < budget.restarts:
        rows.append(rng.exponential(size=n) * base)
    return np.array(rows[: max(1, budget.restarts)])


def _ascent(w, v, pr, basis: SetBasis, budget: Budget):
    """Fixed-point ascent on the stationarity condition of the norm ratio.

    With the maximizing sets frozen, ``M`` is a nonnegative linear map ``A``
    and the subgradient of ``log ||A f w||_p - log ||f v||_p`` vanishes when
    ``f`` is proportional to ``(A^T[(A f w)^(p-1) w] / v^p)^(1/(p-1))``.  The
    update keeps ``f`` in the nonnegative orthant, and re-selecting the
    maximizing sets can only increase ``M f``.
    """
    mass, csr = basis.mass, basis.csr
    n_sets = len(basis)
    p = 1.0 / pr
    f = _seeds(w, v, pr, basis, budget)
    k = f.shape[0]
    best = np.zeros(k)
    best_f = f.copy()
    offsets = (np.arange(k) * n_sets)[:, None]
    for it in range(budget.iterations):
        mf, arg = kernels.scatter_max(set_averages(f, basis), csr)
        num = lp_norm(mf * w, mass, pr)
        den = lp_norm(f * v, mass, pr)
        ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
        improved = ratio > best
        gain = np.max(np.where(best > 0, ratio / np.where(best > 0, best, 1.0) - 1.0, 1.0))
        best = np.where(improved, ratio, best)
        best_f[improved] = f[improved]
        if it > 0 and gain < budget.tol:
            break
        g = mf * w
        g = g / np.maximum(g.max(axis=1, keepdims=True), 1e-300)
        contrib = g ** (p - 1.0) * w * mass
        contrib = np.where(arg >= 0, contrib, 0.0)
        slots = np.where(arg >= 0, arg, 0) + offsets
        c = np.bincount(slots.ravel(), weights=contrib.ravel(), minlength=k * n_sets)
        c = c.reshape(k, n_sets) / basis.measures
        back = kernels.scatter_add(c, csr)
        # f = (back / v^p)^(1/(p-1)), evaluated in logs so that p near 1 cannot overflow
        with np.errstate(divide="ignore"):
            log_f = (np.log(back) - p * np.log(v)) / (p - 1.0)
        f = np.exp(log_f - log_f.max(axis=1, keepdims=True))
        f = f / np.maximum(lp_norm(f * v, mass, pr)[:, None], 1e-300)
    i = int(np.argmax(best))
    return float(best[i]), best_f[i]


def opnorm_maximal(basis: SetBasis, w, v, p, budget: Budget | None = None) -> OpNormEstimate:
    """``||M||`` from ``L^p_v`` to ``L^p_w``.

    ``p = inf``: exact, equal to ``[w, v]_(inf, 1)`` with witness ``1/v``.
    ``p = 1``: exact, maximum over point masses.  Otherwise a lower bound.
    """
    pr = as_recip(p)
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if pr > 1 + 1e-12:
        raise ValueError("operator norms of M are computed for p >= 1")
    if pr == 0:
        witness = 1.0 / v
        value = float(np.max(maximal(witness, basis) * w))
        return OpNormEstimate(value, "exact", witness, "witness 1/v", value)
    if abs(pr - 1.0) <= 1e-12:
        best, arg = 0.0, 0
        for start in range(0, basis.n, 512):
            idx = np.arange(start, min(basis.n, start + 512))
            deltas = np.zeros((idx.size, basis.n))
            deltas[np.arange(idx.size), idx] = 1.0
            ratios = (maximal(deltas, basis) * w * basis.mass).sum(axis=1) / (v[idx] * basis.mass[idx])
            j = int(np.argmax(ratios))
            if ratios[j] > best:
                best, arg = float(ratios[j]), int(idx[j])
        witness = np.zeros(basis.n)
        witness[arg] = 1.0
        return OpNormEstimate(best, "exact", witness, "point masses", best)
    budget = budget or Budget()
    value, witness = _ascent(w, v, pr, basis, budget)
    ub = upper_bound(w, v, 1.0 / pr, basis)
    return OpNormEstimate(value, "lower_bound", witness, "fixed-point ascent", ub)


def buckley_ratio(basis: SetBasis, w, p, budget: Budget | None = None) -> float:
    """``||M||_{L^p_w} / [w]_p^{p'}``, an empirical lower bound for ``c(p)``."""
    pr = as_recip(p)
    if pr >= 1 - 1e-12:
        raise ValueError("the Buckley ratio needs p > 1")
    est = opnorm_maximal(basis, w, w, p, budget)
    pd = dual_recip(pr)
    return est.value / characteristic_p(w, p, basis) ** (1.0 / pd)
