"""Rubio de Francia construction of factor weights.

Given weights ``(w, v)`` with finite ``[w, v]_(s, r)``, functions ``f`` and
``h`` and ``kappa > 1``, :func:`factor_pair` builds ``(w0, v0)`` with
``w0 / v0 = w / v``,

    [w0, v0]_(s0, r0) <= (kappa' ||M||)^(t/|gamma|) [w, v]_(s, r)^(t/t0)

and

    ||f||_{L^p0_v0} ||h||_{L^u0_(1/w0)} <= kappa^(t/|gamma|) ||f||_{L^p_v} ||h||_{L^u_(1/w)}.

A negative shift is reduced to a positive one by exchanging the roles of
``(f, v, p)`` and ``(h, 1/w, u)``; the exponents are then rescaled so that
``1/s0 + 1/r0 = 1``.  In that normalized setting ``R`` solves
``R = H + M(R w / v) / (kappa' ||M||)`` with ``H = (|f| v)^(p/s) / w``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .exponents import TOL, InconsistentExponents, as_recip, dual_recip, kappa_prime
from .maximal import Budget, OpNormEstimate, maximal, opnorm_maximal
from .norms import lp_norm
from .space import SetBasis
from .weights import characteristic_p, characteristic_recips

log = logging.getLogger(__name__)

#: tolerance on the pointwise properties of the iterate
POINTWISE_TOL = 1e-8
#: relative slack on the norm bounds
NORM_TOL = 1e-6
#: safety factor applied to a measured lower bound of ||M||
SAFETY = 1.05
MAX_RETRIES = 12
#: relative pointwise increment at which the fixed-point iteration stops
POINTWISE_STOP = 1e-11


class NonConvergence(RuntimeError):
    """The iteration did not settle; the operator-norm input was too small."""


@dataclass(frozen=True)
class FactorExponents:
    """Reciprocals of ``(u0, p0, s0, r0, u, p, s, r)`` and the shift ``1/gamma``.

    The relations are ``1/u0 - 1/u = 1/p - 1/p0 = 1/s - 1/s0 = 1/r0 - 1/r``.
    """

    u0: float
    p0: float
    s0: float
    r0: float
    u: float
    p: float
    s: float
    r: float
    gamma: float

    @classmethod
    def from_base(cls, p0, s0, r0, u0, gamma: float) -> "FactorExponents":
        """Exponent-like base values and the signed reciprocal shift."""
        return cls.from_recips(*(as_recip(x) for x in (p0, s0, r0, u0)), gamma)

    @classmethod
    def from_recips(cls, p0: float, s0: float, r0: float, u0: float, gamma: float) -> "FactorExponents":
        g = float(gamma)
        vals = dict(u0=u0, p0=p0, s0=s0, r0=r0, u=u0 - g, p=p0 + g, s=s0 + g, r=r0 - g)
        for name, val in vals.items():
            if val < -TOL:
                raise InconsistentExponents(f"1/{name} = {val!r} < 0")
        return cls(gamma=g, **{k: max(v, 0.0) for k, v in vals.items()})

    @property
    def alpha(self) -> float:
        """``1/alpha = 1/s0 + 1/r0``."""
        return self.s0 + self.r0

    @property
    def t(self) -> float:
        """Reciprocal of the rescaled target exponent ``t``."""
        if abs(self.gamma) <= TOL:
            return 1.0
        return (self.s if self.gamma > 0 else self.r) / self.alpha

    @property
    def t0(self) -> float:
        if abs(self.gamma) <= TOL:
            return 1.0
        return (self.s0 if self.gamma > 0 else self.r0) / self.alpha

    @property
    def shift_power(self) -> float:
        """``t / |gamma|``."""
        if abs(self.gamma) <= TOL:
            return 0.0
        return abs(self.gamma) / self.t

    @property
    def char_power(self) -> float:
        """``t / t0``."""
        return self.t0 / self.t

    def swapped(self) -> "FactorExponents":
        return FactorExponents(
            u0=self.p0, p0=self.u0, s0=self.r0, r0=self.s0, u=self.p, p=self.u, s=self.r, r=self.s, gamma=-self.gamma
        )

    def scaled(self, factor: float) -> "FactorExponents":
        return FactorExponents(
            **{k: getattr(self, k) * factor for k in ("u0", "p0", "s0", "r0", "u", "p", "s", "r", "gamma")}
        )

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("u0", "p0", "s0", "r0", "u", "p", "s", "r", "gamma")}


@dataclass
class IterateResult:
    R: np.ndarray
    iterations: int
    opnorm: float


def rdf_iterate(basis: SetBasis, w, v, s, kappa: float, H, opnorm: float,
                tol: float = 1e-12, max_iter: int = 10_000) -> IterateResult:
    """Fixed point of ``R = H + M(R w / v) / (kappa' opnorm)``.

    Iteration starts at ``R = H`` and stops once the relative ``L^s_w``
    increment is below ``tol`` and no point moved by more than
    ``POINTWISE_STOP`` relative to its value.  Raises :class:`NonConvergence` when the
    iterate blows up or the cap is reached.
    """
    sr = as_recip(s)
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    if np.any(H < 0) or not np.any(H > 0):
        raise ValueError("H must be nonnegative and nonzero")
    c = kappa_prime(kappa) * opnorm
    ratio = w / v
    R = H.copy()
    h_norm = lp_norm(H * w, basis.mass, sr)
    for it in range(1, max_iter + 1):
        new = H + maximal(R * ratio, basis) / c
        previous = R
        step = lp_norm((new - R) * w, basis.mass, sr)
        size = lp_norm(new * w, basis.mass, sr)
        R = new
        if not math.isfinite(size) or size > 1e12 * h_norm:
            raise NonConvergence(f"iterate diverged after {it} steps (opnorm {opnorm!r} too small)")
        # the iterates increase, so a small pointwise increment bounds the
        # excess in M(R w / v) <= c R by the same relative amount
        pointwise = float(np.max((new - previous) / new))
        if step <= tol * size and pointwise <= POINTWISE_STOP:
            return IterateResult(R, it, opnorm)
    raise NonConvergence(f"no convergence within {max_iter} steps")


def iterate_properties(basis: SetBasis, w, v, s, kappa, H, R, opnorm) -> dict:
    """Check ``R >= H``, ``M(R w/v) <= kappa' opnorm R`` and ``||R||_{s,w} <= kappa ||H||_{s,w}``."""
    sr = as_recip(s)
    c = kappa_prime(kappa) * opnorm
    lhs_ii = maximal(R * w / v, basis)
    pos = H > 0
    prop_i = bool(np.all(np.log(R[pos]) >= np.log(H[pos]) - POINTWISE_TOL))
    prop_ii = bool(np.all(np.log(lhs_ii) <= np.log(c * R) + POINTWISE_TOL))
    r_norm = float(lp_norm(R * w, basis.mass, sr))
    h_norm = float(lp_norm(H * w, basis.mass, sr))
    prop_iii = r_norm <= kappa * h_norm * (1 + NORM_TOL)
    return {
        "i_R_geq_H": prop_i,
        "ii_maximal_bound": prop_ii,
        "iii_norm_bound": prop_iii,
        "ii_max_ratio": float(np.max(lhs_ii / (c * R))),
        "iii_ratio": r_norm / (kappa * h_norm),
    }


@dataclass
class RdFResult:
    w0: np.ndarray
    v0: np.ndarray
    char_bound_lhs: float
    char_bound_rhs: float
    normprod_lhs: float
    normprod_rhs: float
    R: np.ndarray | None
    iterations: int
    opnorm: float
    opnorm_lower: float
    opnorm_upper: float
    swapped: bool
    properties: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def summary(self) -> dict:
        return {
            "char_bound_lhs": self.char_bound_lhs,
            "char_bound_rhs": self.char_bound_rhs,
            "normprod_lhs": self.normprod_lhs,
            "normprod_rhs": self.normprod_rhs,
            "iterations": self.iterations,
            "opnorm": self.opnorm,
            "opnorm_lower": self.opnorm_lower,
            "opnorm_upper": self.opnorm_upper,
            "swapped": self.swapped,
            "properties": self.properties,
            "checks": self.checks,
        }


def _core(basis, ex: FactorExponents, w, v, f, kappa, budget, est):
    """Normalized case ``1/gamma > 0`` and ``1/s0 + 1/r0 = 1``."""
    sr = ex.s
    H = (np.abs(f) * v) ** (sr / ex.p) / w
    if est is None:
        est = opnorm_maximal(basis, w, v, 1.0 / sr, budget)
    lower, upper = est.value, est.upper_bound
    op = est.value if est.kind == "exact" else min(est.value * SAFETY, upper)
    for attempt in range(MAX_RETRIES):
        try:
            it = rdf_iterate(basis, w, v, 1.0 / sr, kappa, H, op)
        except NonConvergence:
            it = None
        if it is not None:
            props = iterate_properties(basis, w, v, 1.0 / sr, kappa, H, it.R, op)
            if all(props[k] for k in ("i_R_geq_H", "ii_maximal_bound", "iii_norm_bound")):
                return H, it, props, lower, upper
        if op >= upper:
            break
        log.debug("opnorm %.6g rejected, doubling", op)
        op = min(2.0 * op, upper)
    raise NonConvergence("property (iii) failed even at the certified upper bound")


def core_estimate(basis: SetBasis, ex: FactorExponents, w, v, budget: Budget | None = None) -> OpNormEstimate | None:
    """``||M||`` from ``L^t_(v_t)`` to ``L^t_(w_t)`` as used by :func:`factor_pair`.

    Depends on the weights and exponents only, so it can be shared between
    calls with different ``f`` and ``h``.  ``None`` for an unshifted index.
    """
    if abs(ex.gamma) <= TOL:
        return None
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    core_ex = ex.swapped() if ex.gamma < 0 else ex
    cw, cv = (1.0 / v, 1.0 / w) if ex.gamma < 0 else (w, v)
    a = 1.0 / core_ex.alpha
    return opnorm_maximal(basis, cw**a, cv**a, 1.0 / (core_ex.s * a), budget)


def factor_pair(basis: SetBasis, ex: FactorExponents, w, v, f, h, kappa: float,
                budget: Budget | None = None, estimate: OpNormEstimate | None = None) -> RdFResult:
    """Factor weights ``(w0, v0)`` for ``f`` and ``h``; all bounds checked before return.

    ``estimate`` may carry a precomputed :func:`core_estimate` for the same
    weights and exponents.
    """
    w = np.asarray(w, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    mass = basis.mass
    kp = kappa_prime(kappa)
    char_target = characteristic_recips(w, v, ex.s, ex.r, basis)
    rhs_norms = lp_norm(f * v, mass, ex.p) * lp_norm(h / w, mass, ex.u)

    if abs(ex.gamma) <= TOL:
        lhs_char = characteristic_recips(w, v, ex.s0, ex.r0, basis)
        lhs_norms = lp_norm(f * v, mass, ex.p0) * lp_norm(h / w, mass, ex.u0)
        checks = {
            "ratio_preserved": True,
            "char_bound": lhs_char <= char_target * (1 + NORM_TOL),
            "normprod_bound": lhs_norms <= rhs_norms * (1 + NORM_TOL),
            "membership_finite": bool(math.isfinite(lhs_norms)),
        }
        return RdFResult(w.copy(), v.copy(), lhs_char, char_target, float(lhs_norms), float(rhs_norms),
                         None, 0, 1.0, 1.0, 1.0, False, {}, checks)

    swapped = ex.gamma < 0
    core_ex = ex.swapped() if swapped else ex
    cw, cv = (1.0 / v, 1.0 / w) if swapped else (w, v)
    cf = h if swapped else f
    if not np.any(cf != 0):
        cf = np.ones_like(cf)
    a = 1.0 / core_ex.alpha  # alpha
    core_ex = core_ex.scaled(a)
    Hc, it, props, lower, upper = _core(basis, core_ex, cw**a, cv**a, np.abs(cf) ** a, kappa, budget, estimate)
    R = it.R
    sg = core_ex.gamma / core_ex.s  # s / gamma
    s_over_s0 = core_ex.s0 / core_ex.s
    ww, vv = cw**a, cv**a
    w0c = R ** (-sg) * ww**s_over_s0
    v0c = (R * ww / vv) ** (-sg) * vv**s_over_s0
    w0c, v0c = w0c ** (1.0 / a), v0c ** (1.0 / a)
    w0, v0 = (1.0 / v0c, 1.0 / w0c) if swapped else (w0c, v0c)

    lhs_char = characteristic_recips(w0, v0, ex.s0, ex.r0, basis)
    rhs_char = (kp * it.opnorm) ** ex.shift_power * char_target**ex.char_power
    f_norm0 = lp_norm(f * v0, mass, ex.p0)
    h_norm0 = lp_norm(h / w0, mass, ex.u0)
    lhs_norms = float(f_norm0 * h_norm0)
    rhs_norms = float(kappa**ex.shift_power * rhs_norms)
    ratio_dev = float(np.max(np.abs((w0 / v0) / (w / v) - 1.0)))
    checks = {
        "ratio_preserved": ratio_dev <= 1e-10,
        "char_bound": lhs_char <= rhs_char * (1 + NORM_TOL),
        "normprod_bound": lhs_norms <= rhs_norms * (1 + NORM_TOL),
        "membership_finite": bool(math.isfinite(f_norm0) and math.isfinite(h_norm0)),
        "iterate_i": props["i_R_geq_H"],
        "iterate_ii": props["ii_maximal_bound"],
        "iterate_iii": props["iii_norm_bound"],
    }
    props = dict(props, ratio_deviation=ratio_dev)
    return RdFResult(w0, v0, float(lhs_char), float(rhs_char), lhs_norms, rhs_norms, R, it.iterations,
                     it.opnorm, lower, upper, swapped, props, checks)


def one_weight_bound(basis: SetBasis, ex: FactorExponents, w, kappa: float, opnorm: float) -> float:
    """One-weight form ``(kappa' c)^(t/|gamma|) [w]_(s,r)^(t'/t0')`` with ``c = opnorm / [w_t]_t^{t'}``.

    Only meaningful for ``w = v`` with finite ``s`` and ``r`` and ``t > 1``.
    """
    if abs(ex.gamma) <= TOL:
        return characteristic_recips(w, w, ex.s, ex.r, basis)
    a = 1.0 / ex.alpha
    w_t = w**a if ex.gamma > 0 else w ** (-a)
    t_recip, t0_recip = ex.t, ex.t0
    td = dual_recip(t_recip)
    c = opnorm / characteristic_p(w_t, 1.0 / t_recip, basis) ** (1.0 / td)
    ratio = dual_recip(t0_recip) / td
    char = characteristic_recips(w, w, ex.s, ex.r, basis)
    return (kappa_prime(kappa) * c) ** ex.shift_power * char**ratio


def embed(basis: SetBasis, p0, s0, r0, gamma: float, w, v, f, kappa: float = 2.0,
          budget: Budget | None = None):
    """Weights ``(w0, v0)`` in the ratio class with ``f`` in ``L^p0_v0``.

    Runs :func:`factor_pair` with the dual function ``h = 1`` normalized in
    ``L^u_(1/w)``, where ``u`` is chosen as ``1/u = |1/gamma|`` plus the smallest
    value keeping ``1/u0 >= 0``.
    """
    g = float(gamma)
    u0 = max(g, 0.0) + 0.5
    ex = FactorExponents.from_base(p0, s0, r0, 1.0 / u0, g)
    h = np.ones(basis.n)
    h = h / lp_norm(h / np.asarray(w, float), basis.mass, ex.u)
    res = factor_pair(basis, ex, w, v, f, h, kappa, budget)
    return res.w0, res.v0, res


def split_dual_function(h, w1_list, lam_recip: float, qt1_dual_recip: float, u1_recips) -> list:
    """``h_j = w_1j (|h| w_1^-lam)^(q~1'/u_1j)`` with ``w_1 = prod_j w_1j``.

    Requires ``||h w_1^-lam||_{q~1'} = 1`` and ``sum_j lam/u_1j = 1/q~1'``;
    then ``h_j / w_1j`` has unit ``L^{u_1j}`` norm and ``prod_j h_j^lam = |h|``.
    """
    lam = 1.0 / lam_recip
    w1 = np.prod(np.asarray(w1_list, dtype=np.float64), axis=0)
    total = sum(lam * u for u in u1_recips)
    if abs(total - qt1_dual_recip) > 1e-10:
        raise ValueError(f"sum_j lam/u_1j = {total!r} differs from 1/q~1' = {qt1_dual_recip!r}")
    base = np.abs(np.asarray(h, dtype=np.float64)) * w1 ** (-lam)
    if qt1_dual_recip > 0:
        powers = [u / qt1_dual_recip for u in u1_recips]
    else:
        powers = [lam_recip / len(u1_recips)] * len(u1_recips)
    return [wj * base**e for wj, e in zip(w1_list, powers)]
