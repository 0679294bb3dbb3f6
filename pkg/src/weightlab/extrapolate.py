"""Numerical replay of the extrapolation argument, trial by trial.

For every trial the harness builds the dual function ``h`` that attains the
target norm, splits it into ``h_j``, runs :func:`~weightlab.rdf.factor_pair`
for every index and then checks each inequality of the argument in order:

``split``         ``prod_j h_j^lam = |h|`` and unit norms of ``h_j / w_1j``;
``holder``        ``|int |Tf|^lam h| <= ||Tf||_{q0,w0}^lam ||h w0^-lam||_{q~0'}``;
``holder_split``  ``||h w0^-lam||_{q~0'} <= prod_j ||h_j / w_0j||_{u_0j}^lam``;
``base``          the base-level bound at ``(w0, v0)``;
``char_j``        ``[w_0j, v_0j]_(s_0j, r_0j) <= C_kappa_j``;
``factor_j``      all postconditions of the factor construction.

The target ``||Tf||_{q1,w1} <= kappa^beta phi(C) prod_j ||S_j f_j||_{p1j,v1j}``
is then evaluated on its own, and the report asserts that a passing chain
always comes with a passing target.

Exponents are reciprocals throughout; ``gamma`` entries are the signed
reciprocals ``1/gamma_j``.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exponents import TOL, IndexInputs, InconsistentExponents, as_recip, extrapolation_constants
from .maximal import Budget
from .norms import lp_norm, weak_level_profile
from .operators import Envelope, Operator
from .rdf import FactorExponents, core_estimate, factor_pair, split_dual_function
from .rng import make_rng
from .sampling import sample_function, sample_weight
from .space import SetBasis
from .weights import characteristic_recips

log = logging.getLogger(__name__)

#: relative slack for every inequality in the chain
REL_TOL = 1e-6
#: identities (split, duality) are checked more tightly
IDENTITY_TOL = 1e-9


def thread_count() -> int:
    """Worker cap from ``WEIGHTLAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("WEIGHTLAB_THREADS", "1")))
    except ValueError:
        return 1


def _map_trials(fn: Callable[[int], "TrialRecord"], count: int) -> list:
    threads = thread_count()
    if threads == 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


@dataclass(frozen=True)
class MultiParams:
    """Base exponents ``(q0, p0j, s0j, r0j)`` and shifts ``1/gamma_j`` (all reciprocals)."""

    q0: float
    p0: tuple
    s0: tuple
    r0: tuple
    gamma: tuple

    def __post_init__(self):
        m = len(self.p0)
        if not (len(self.s0) == len(self.r0) == len(self.gamma) == m) or m == 0:
            raise InconsistentExponents("p0, s0, r0 and gamma need one entry per index")
        for name in ("q1", "p1", "s1", "r1"):
            vals = np.atleast_1d(getattr(self, name))
            if np.any(vals < -TOL):
                raise InconsistentExponents(f"1/{name} = {vals.tolist()} leaves (0, inf]")

    @classmethod
    def from_exponents(cls, q0, p0, s0, r0, gamma) -> "MultiParams":
        """Exponent-like values (``"inf"``, ``"2/3"``, numbers); ``gamma`` as signed reciprocals."""
        return cls(
            as_recip(q0),
            tuple(as_recip(x) for x in p0),
            tuple(as_recip(x) for x in s0),
            tuple(as_recip(x) for x in r0),
            tuple(float(_signed(g)) for g in gamma),
        )

    @classmethod
    def from_tuple(cls, tup) -> "MultiParams":
        """Linear case from a solved :class:`~weightlab.exponents.ExponentTuple`."""
        return cls(tup.q0, (tup.p0,), (tup.s0,), (tup.r0,), (tup.gamma,))

    @property
    def m(self) -> int:
        return len(self.p0)

    @property
    def total_gamma(self) -> float:
        return float(sum(self.gamma))

    @property
    def q1(self) -> float:
        return _clip(self.q0 + self.total_gamma)

    @property
    def p1(self) -> tuple:
        return tuple(_clip(p + g) for p, g in zip(self.p0, self.gamma))

    @property
    def s1(self) -> tuple:
        return tuple(_clip(s + g) for s, g in zip(self.s0, self.gamma))

    @property
    def r1(self) -> tuple:
        return tuple(_clip(r - g) for r, g in zip(self.r0, self.gamma))

    @property
    def lam_recip(self) -> float:
        """``1/lam = max_j(1/q0 + m |1/gamma_j|) + 1``."""
        return max(self.q0 + self.m * abs(g) for g in self.gamma) + 1.0

    @property
    def u0(self) -> tuple:
        """``u_0j = m lam q~0'``, i.e. ``1/u_0j = (1/lam - 1/q0) / m``."""
        return tuple((self.lam_recip - self.q0) / self.m for _ in self.gamma)

    @property
    def u1(self) -> tuple:
        return tuple(u - g for u, g in zip(self.u0, self.gamma))

    @property
    def diagonal(self) -> bool:
        return abs(self.q0 - sum(self.p0)) <= TOL

    def factor_exponents(self, j: int) -> FactorExponents:
        return FactorExponents.from_recips(self.p0[j], self.s0[j], self.r0[j], self.u0[j], self.gamma[j])

    def next_level(self, gamma: Sequence[float]) -> "MultiParams":
        """Parameters whose base is this level's target (the shifted matrix rows)."""
        return MultiParams(self.q1, self.p1, self.s1, self.r1, tuple(float(g) for g in gamma))

    def as_dict(self) -> dict:
        return {
            "q0": self.q0, "p0": list(self.p0), "s0": list(self.s0), "r0": list(self.r0),
            "gamma": list(self.gamma), "q1": self.q1, "p1": list(self.p1), "s1": list(self.s1),
            "r1": list(self.r1), "lam_recip": self.lam_recip, "u0": list(self.u0), "u1": list(self.u1),
        }


def _clip(x: float) -> float:
    return 0.0 if abs(x) <= TOL else x


def _signed(g) -> float:
    """Signed reciprocal shift from a number or a text such as ``"-1/2"``."""
    return float(Fraction(g.strip())) if isinstance(g, str) else float(g)


def exponent_invariance(params_a: MultiParams, params_b: MultiParams, inputs: Sequence[IndexInputs], kappa: float) -> bool:
    """Two tuples sharing ``(s0, r0, gamma)`` yield identical ``(beta, C_kappa)``.

    ``inputs`` carry the measured operator norms and characteristics, which
    depend only on the weights and the weight-class exponents.
    """
    if params_a.s0 != params_b.s0 or params_a.r0 != params_b.r0 or params_a.gamma != params_b.gamma:
        raise ValueError("invariance compares tuples with equal weight-class exponents")
    rep_a = extrapolation_constants(kappa, [IndexInputs(params_a.factor_exponents(j).gamma, params_a.factor_exponents(j).t0,
                                                        params_a.factor_exponents(j).t, i.opnorm, i.char)
                                            for j, i in enumerate(inputs)])
    rep_b = extrapolation_constants(kappa, [IndexInputs(params_b.factor_exponents(j).gamma, params_b.factor_exponents(j).t0,
                                                        params_b.factor_exponents(j).t, i.opnorm, i.char)
                                            for j, i in enumerate(inputs)])
    return rep_a.beta == rep_b.beta and rep_a.C_kappa == rep_b.C_kappa


@dataclass
class BaseOutcome:
    """Base-level bound at the constructed weights.

    ``phi_at_chars`` bounds the base ratio, ``phi_at_C`` enters the target;
    ``None`` marks an envelope lookup outside the sampled range.
    """

    lhs: float
    rhs: float | None
    phi_at_chars: float | None
    phi_at_C: float | None
    checks: dict = field(default_factory=dict)
    detail: dict = field(default_factory=dict)


BaseFn = Callable[[list, list, np.ndarray, np.ndarray], BaseOutcome]


@dataclass
class TrialRecord:
    index: int
    base_ratio: float
    base_char: list
    target_ratio: float
    target_char: list
    constants: dict
    chain_checks: dict
    target_lhs: float
    target_rhs: float | None
    target_holds: bool | None
    detail: dict = field(default_factory=dict)

    @property
    def chain_ok(self) -> bool:
        return all(v is True for v in self.chain_checks.values())

    @property
    def implication_ok(self) -> bool:
        return not self.chain_ok or self.target_holds is True

    def as_dict(self) -> dict:
        return {
            "index": self.index, "base_ratio": self.base_ratio, "base_char": self.base_char,
            "target_ratio": self.target_ratio, "target_char": self.target_char, "constants": self.constants,
            "chain_checks": self.chain_checks, "chain_ok": self.chain_ok, "target_lhs": self.target_lhs,
            "target_rhs": self.target_rhs, "target_holds": self.target_holds,
            "implication_ok": self.implication_ok, "detail": self.detail,
        }


@dataclass
class BoundReport:
    label: str
    trials: list
    params: dict
    notes: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        """``pass`` iff every target holds; ``inconclusive`` when some target was undefined."""
        if any(t.target_holds is False for t in self.trials):
            return "fail"
        if any(t.target_holds is None for t in self.trials):
            return "inconclusive"
        return "pass"

    @property
    def chain_ok(self) -> bool:
        return all(t.chain_ok for t in self.trials)

    @property
    def implication_ok(self) -> bool:
        return all(t.implication_ok for t in self.trials)

    @property
    def counterexample(self) -> dict | None:
        for t in self.trials:
            if t.target_holds is False or not t.chain_ok:
                return t.as_dict()
        return None

    def failed_checks(self) -> dict:
        counts: dict = {}
        for t in self.trials:
            for name, ok in t.chain_checks.items():
                if ok is not True:
                    counts[name] = counts.get(name, 0) + 1
        return counts

    def as_dict(self, with_trials: bool = True) -> dict:
        out = {
            "label": self.label, "verdict": self.verdict, "chain_ok": self.chain_ok,
            "implication_ok": self.implication_ok, "trials": len(self.trials),
            "failed_checks": self.failed_checks(), "params": self.params, "notes": self.notes,
            "counterexample": self.counterexample,
        }
        if with_trials:
            out["trial_records"] = [t.as_dict() for t in self.trials]
        return out

    def csv_rows(self) -> list[dict]:
        rows = []
        for t in self.trials:
            rows.append({
                "trial": t.index, "base_ratio": t.base_ratio, "target_ratio": t.target_ratio,
                "target_lhs": t.target_lhs, "target_rhs": t.target_rhs, "target_holds": t.target_holds,
                "chain_ok": t.chain_ok, "beta": t.constants.get("beta"),
                "base_char": ";".join(f"{c:.17g}" for c in t.base_char),
                "target_char": ";".join(f"{c:.17g}" for c in t.target_char),
                "C_kappa": ";".join(f"{c:.17g}" for c in t.constants.get("C_kappa", [])),
            })
        return rows


def _leq(lhs: float, rhs: float, tol: float | None = None) -> bool:
    tol = REL_TOL if tol is None else tol
    return bool(lhs <= rhs * (1 + tol) + 1e-300)


@contextmanager
def relative_tolerance(value: float):
    """Temporarily change the slack of the chain inequalities."""
    global REL_TOL
    if not value > 0:
        raise ValueError("tolerance must be positive")
    old, REL_TOL = REL_TOL, float(value)
    try:
        yield
    finally:
        REL_TOL = old


def _dual_maximizer(F: np.ndarray, mass: np.ndarray, qt1: float) -> np.ndarray:
    """Nonnegative ``phi`` with ``||phi||_{q~1'} = 1`` and ``int F phi = ||F||_{q~1}``."""
    if not np.any(F > 0):
        ones = np.ones_like(F)
        return ones / lp_norm(ones, mass, 1.0 - qt1)
    if qt1 == 0:
        x = int(np.argmax(F))
        phi = np.zeros_like(F)
        phi[x] = 1.0 / mass[x]
        return phi
    top = lp_norm(F, mass, qt1)
    return (F / top) ** (1.0 / qt1 - 1.0)


def run_chain(basis: SetBasis, params: MultiParams, w1s: Sequence[np.ndarray], v1s: Sequence[np.ndarray],
              Sf: Sequence[np.ndarray], Tf: np.ndarray, base: BaseFn, kappa: float,
              budget: Budget | None = None, estimates: Sequence | None = None, dual_samples: int = 0,
              rng: np.random.Generator | None = None, index: int = 0) -> TrialRecord:
    """Replay the argument for one trial (see the module docstring)."""
    mass = basis.mass
    m = params.m
    w1s = [np.asarray(w, dtype=np.float64) for w in w1s]
    v1s = [np.asarray(v, dtype=np.float64) for v in v1s]
    Sf = [np.asarray(f, dtype=np.float64) for f in Sf]
    Tf = np.asarray(Tf, dtype=np.float64)
    w1 = np.prod(w1s, axis=0)
    lam_r = params.lam_recip
    lam = 1.0 / lam_r
    qt1 = lam * params.q1
    qt1_dual = 1.0 - qt1
    qt0_dual = 1.0 - lam * params.q0
    checks: dict = {}
    detail: dict = {}

    # target side and the dual function attaining it
    target_lhs = float(lp_norm(Tf * w1, mass, params.q1))
    F = (np.abs(Tf) * w1) ** lam
    phi = _dual_maximizer(F, mass, qt1)
    h = phi * w1**lam
    pairing = float(np.sum(np.abs(Tf) ** lam * h * mass))
    dual_target = target_lhs**lam
    checks["duality_attained"] = bool(abs(pairing - dual_target) <= IDENTITY_TOL * max(dual_target, 1e-300))
    if dual_samples and rng is not None:
        best = 0.0
        for _ in range(dual_samples):
            psi = rng.exponential(size=F.size) * (rng.random(F.size) < 0.7)
            psi[rng.integers(F.size)] += 1.0
            psi = psi / lp_norm(psi, mass, qt1_dual)
            best = max(best, float(np.sum(F * psi * mass)))
        detail["sampled_dual_sup"] = best
        checks["duality_samples_bounded"] = _leq(best, dual_target, IDENTITY_TOL)

    # split
    hs = split_dual_function(h, w1s, lam_r, qt1_dual, params.u1)
    prod = np.prod([hj**lam for hj in hs], axis=0)
    checks["split_product"] = bool(np.allclose(prod, np.abs(h), rtol=IDENTITY_TOL, atol=0.0))
    unit = [float(lp_norm(hj / wj, mass, u)) for hj, wj, u in zip(hs, w1s, params.u1)]
    checks["split_unit_norms"] = bool(all(abs(x - 1.0) <= IDENTITY_TOL for x in unit))

    # factor weights per index
    results = []
    inputs = []
    for j in range(m):
        ex = params.factor_exponents(j)
        est = estimates[j] if estimates is not None else None
        res = factor_pair(basis, ex, w1s[j], v1s[j], Sf[j], hs[j], kappa, budget, est)
        results.append(res)
        char1 = characteristic_recips(w1s[j], v1s[j], ex.s, ex.r, basis)
        inputs.append(IndexInputs(ex.gamma, ex.t0, ex.t, res.opnorm, char1))
        checks[f"factor_{j}"] = res.ok
    constants = extrapolation_constants(kappa, inputs)
    C = np.array(constants.C_kappa)
    for j, res in enumerate(results):
        checks[f"char_{j}"] = _leq(res.char_bound_lhs, C[j])
        if not math.isclose(res.char_bound_rhs, C[j], rel_tol=1e-12):
            checks[f"constant_agreement_{j}"] = False
    w0s = [r.w0 for r in results]
    v0s = [r.v0 for r in results]
    w0 = np.prod(w0s, axis=0)
    chars0 = np.array([r.char_bound_lhs for r in results])

    # Hoelder steps
    base_norm = float(lp_norm(Tf * w0, mass, params.q0))
    dual_norm0 = float(lp_norm(h * w0 ** (-lam), mass, qt0_dual))
    checks["holder"] = _leq(pairing, base_norm**lam * dual_norm0)
    split_norms0 = [float(lp_norm(hj / r.w0, mass, u)) for hj, r, u in zip(hs, results, params.u0)]
    checks["holder_split"] = _leq(dual_norm0, float(np.prod(split_norms0)) ** lam)
    for j, (res, hn) in enumerate(zip(results, split_norms0)):
        # with ||h_j / w_1j||_{u_1j} = 1 the norm-product bound reads as below
        lhs = float(lp_norm(Sf[j] * res.v0, mass, params.p0[j])) * hn
        rhs = kappa ** params.factor_exponents(j).shift_power * float(lp_norm(Sf[j] * v1s[j], mass, params.p1[j]))
        checks[f"normprod_{j}"] = _leq(lhs, rhs)

    outcome = base(w0s, v0s, chars0, C)
    checks["base"] = None if outcome.rhs is None else _leq(outcome.lhs, outcome.rhs)
    checks.update(outcome.checks)

    s_norms1 = [float(lp_norm(f * v, mass, p)) for f, v, p in zip(Sf, v1s, params.p1)]
    s_norms0 = [float(lp_norm(f * v, mass, p)) for f, v, p in zip(Sf, v0s, params.p0)]
    prod1 = float(np.prod(s_norms1))
    prod0 = float(np.prod(s_norms0))
    if outcome.phi_at_C is None:
        target_rhs, holds = None, None
    else:
        target_rhs = float(kappa**constants.beta * outcome.phi_at_C * prod1)
        holds = _leq(target_lhs, target_rhs)
    detail.update({
        "pairing": pairing, "base_norm": base_norm, "dual_norm0": dual_norm0, "split_norms0": split_norms0,
        "split_norms1": unit, "base_lhs": outcome.lhs, "base_rhs": outcome.rhs, "phi_at_chars": outcome.phi_at_chars,
        "phi_at_C": outcome.phi_at_C, "iterations": [r.iterations for r in results],
        "opnorm": [r.opnorm for r in results], **outcome.detail,
    })
    return TrialRecord(
        index=index,
        base_ratio=float(outcome.lhs / prod0) if prod0 > 0 else 0.0,
        base_char=chars0.tolist(),
        target_ratio=float(target_lhs / prod1) if prod1 > 0 else 0.0,
        target_char=[i.char for i in inputs],
        constants=constants.as_dict(),
        chain_checks=checks,
        target_lhs=target_lhs,
        target_rhs=target_rhs,
        target_holds=holds,
        detail=detail,
    )


def standard_base(operator: Operator | None, params: MultiParams, basis: SetBasis, Sf, Tf,
                  envelope: Envelope | None = None) -> BaseFn:
    """Base bound ``||Tf||_{q0,w0} <= phi([w0, v0]) prod_j ||S_j f_j||_{p0j,v0j}``.

    ``phi = 1`` for exact operators at diagonal exponents with one-weight
    pairs; otherwise the envelope is consulted.
    """
    mass = basis.mass

    def base(w0s, v0s, chars0, C) -> BaseOutcome:
        w0 = np.prod(w0s, axis=0)
        lhs = float(lp_norm(Tf * w0, mass, params.q0))
        prod = float(np.prod([lp_norm(f * v, mass, p) for f, v, p in zip(Sf, v0s, params.p0)]))
        one_weight = all(np.allclose(w, v, rtol=1e-12) for w, v in zip(w0s, v0s))
        if operator is not None and operator.exact_phi and params.diagonal and one_weight:
            return BaseOutcome(lhs, prod, 1.0, 1.0, detail={"phi_source": "exact"})
        if envelope is None:
            return BaseOutcome(lhs, None, None, None, detail={"phi_source": "none"})
        at_chars = envelope(chars0)
        at_C = envelope(C)
        return BaseOutcome(lhs, None if at_chars is None else at_chars * prod, at_chars, at_C,
                           detail={"phi_source": "envelope"})

    return base


def _trial_data(rng, basis: SetBasis, m: int, one_weight: bool, distribution: str, nonnegative: bool):
    n = basis.n
    w1s = [sample_weight(rng, n, distribution) for _ in range(m)]
    v1s = [w.copy() for w in w1s] if one_weight else [sample_weight(rng, n, distribution) for _ in range(m)]
    fs = [sample_function(rng, n, nonnegative) for _ in range(m)]
    return w1s, v1s, fs


def check_multilinear(operator: Operator, params: MultiParams, basis: SetBasis, trials: int = 200,
                      kappa: float = 2.0, seed: int = 42, distribution: str = "log-uniform",
                      one_weight: bool = True, envelope: Envelope | None = None, budget: Budget | None = None,
                      dual_samples: int = 64, weights: Sequence | None = None, funcs: Sequence | None = None,
                      label: str | None = None) -> BoundReport:
    """Replay the multilinear argument on ``trials`` random (or given) instances.

    ``weights`` (list of ``(w1s, v1s)``) and ``funcs`` (list of function
    lists) override the sampler when given.
    """
    if operator.arity != params.m:
        raise ValueError(f"operator arity {operator.arity} differs from m = {params.m}")
    count = len(weights) if weights is not None else trials

    def one(i: int) -> TrialRecord:
        rng = make_rng(seed, "trial", i)
        w1s, v1s, fs = _trial_data(rng, basis, params.m, one_weight, distribution, operator.nonnegative_inputs)
        if weights is not None:
            w1s, v1s = weights[i]
        if funcs is not None:
            fs = funcs[i]
        Tf = operator(fs)
        base = standard_base(operator, params, basis, fs, Tf, envelope)
        return run_chain(basis, params, w1s, v1s, fs, Tf, base, kappa, budget, dual_samples=dual_samples,
                         rng=make_rng(seed, "dual", i), index=i)

    records = _map_trials(one, count)
    notes = {"kappa": kappa, "seed": seed, "distribution": distribution, "one_weight": one_weight}
    if envelope is not None:
        notes["envelope"] = envelope.as_dict()
    return BoundReport(label or f"{operator.name}", records, params.as_dict(), notes)


def check_linear(operator: Operator, params, basis: SetBasis, **kwargs) -> BoundReport:
    """Linear case: ``params`` is an ``ExponentTuple`` or a one-index :class:`MultiParams`."""
    if not isinstance(params, MultiParams):
        params = MultiParams.from_tuple(params)
    if params.m != 1:
        raise ValueError("check_linear takes a single index")
    return check_multilinear(operator, params, basis, **kwargs)


def check_pairs(family, params: MultiParams, basis: SetBasis, envelope: Envelope | None, kappa: float = 2.0,
                seed: int = 42, distribution: str = "log-uniform", budget: Budget | None = None,
                dual_samples: int = 64) -> BoundReport:
    """Run the chain over an explicit :class:`~weightlab.operators.PairFamily`."""
    records = []
    for i, (fs, g) in enumerate(family.pairs):
        rng = make_rng(seed, "pairs", i)
        w1s = [sample_weight(rng, basis.n, distribution) for _ in range(params.m)]
        base = standard_base(None, params, basis, fs, g, envelope)
        records.append(run_chain(basis, params, w1s, [w.copy() for w in w1s], fs, g, base, kappa, budget,
                                 dual_samples=dual_samples, rng=make_rng(seed, "dual", i), index=i))
    notes = {"kappa": kappa, "seed": seed}
    if envelope is not None:
        notes["envelope"] = envelope.as_dict()
    return BoundReport(family.label, records, params.as_dict(), notes)


# -- weak type ---------------------------------------------------------------

def weak_levels(Tf, weight, mass, recip: float, quantiles: Sequence[float] = (0.25, 0.5, 0.75)) -> tuple[list, float]:
    """Levels used for the weak-type chain and the weak norm itself.

    The weak norm ``sup_lam lam ||1_{|Tf| >= lam} w||`` is attained at a
    distinct value of ``|Tf|``; that level is always included, together with
    the given quantiles of the distinct values.
    """
    profile = weak_level_profile(Tf, weight, lambda g: lp_norm(g, mass, recip))
    if not profile:
        return [], 0.0
    levels = np.array([lvl for lvl, _ in profile])
    values = np.array([val for _, val in profile])
    best = int(np.argmax(values))
    chosen = {float(levels[best])}
    for q in quantiles:
        chosen.add(float(levels[min(len(levels) - 1, int(q * len(levels)))]))
    return sorted(chosen), float(values[best])


def check_weak_type(operator: Operator, params: MultiParams, basis: SetBasis, trials: int = 50,
                    kappa: float = 2.0, seed: int = 42, distribution: str = "log-uniform",
                    budget: Budget | None = None, dual_samples: int = 8,
                    quantiles: Sequence[float] = (0.25, 0.5, 0.75)) -> BoundReport:
    """Weak-type variant: the chain runs for ``T_lam f = lam 1_{|Tf| >= lam}``.

    The base bound for ``T_lam`` follows from the weak base bound
    ``lam ||1_{E_lam} w0||_{q0} <= ||Tf||_{q0,inf,w0} <= ||Tf||_{q0,w0}``, each
    step checked.  The weak target is the maximum of the per-level targets.
    """
    if not (operator.exact_phi and params.diagonal):
        raise ValueError("the weak-type harness needs an operator with a closed-form base bound")
    mass = basis.mass
    records = []
    weak_vs_strong = []

    def norm_q(recip):
        return lambda g: lp_norm(g, mass, recip)

    for i in range(trials):
        rng = make_rng(seed, "weak", i)
        w1s, v1s, fs = _trial_data(rng, basis, params.m, True, distribution, operator.nonnegative_inputs)
        Tf = operator(fs)
        w1 = np.prod(w1s, axis=0)
        levels, weak_target = weak_levels(Tf, w1, mass, params.q1, quantiles)
        strong_target = float(lp_norm(Tf * w1, mass, params.q1))
        prod1 = float(np.prod([lp_norm(f * v, mass, p) for f, v, p in zip(fs, v1s, params.p1)]))
        weak_vs_strong.append(weak_target <= strong_target * (1 + IDENTITY_TOL))
        estimates = [core_estimate(basis, params.factor_exponents(j), w1s[j], v1s[j], budget) for j in range(params.m)]
        sub = []
        for lvl in levels:
            T_lam = lvl * (np.abs(Tf) >= lvl)

            def base(w0s, v0s, chars0, C, T_lam=T_lam):
                w0 = np.prod(w0s, axis=0)
                lhs = float(lp_norm(T_lam * w0, mass, params.q0))
                weak0 = max((v for _, v in weak_level_profile(Tf, w0, norm_q(params.q0))), default=0.0)
                strong0 = float(lp_norm(Tf * w0, mass, params.q0))
                prod = float(np.prod([lp_norm(f * v, mass, p) for f, v, p in zip(fs, v0s, params.p0)]))
                weak_vs_strong.append(weak0 <= strong0 * (1 + IDENTITY_TOL))
                return BaseOutcome(lhs, prod, 1.0, 1.0,
                                   checks={"level_below_weak": _leq(lhs, weak0, IDENTITY_TOL),
                                           "weak_below_strong": _leq(weak0, strong0, IDENTITY_TOL),
                                           "strong_base": _leq(strong0, prod)},
                                   detail={"weak_base": weak0, "strong_base": strong0})

            sub.append(run_chain(basis, params, w1s, v1s, fs, T_lam, base, kappa, budget, estimates,
                                 dual_samples, make_rng(seed, "weak-dual", i), index=i))
        rhs = max((r.target_rhs for r in sub if r.target_rhs is not None), default=None)
        checks = {}
        for r in sub:
            for k, v in r.chain_checks.items():
                checks[k] = checks.get(k, True) is True and v is True
        per_level_max = max((r.target_lhs for r in sub), default=0.0)
        checks["weak_target_attained"] = bool(math.isclose(per_level_max, weak_target, rel_tol=1e-12, abs_tol=0.0)) \
            if sub else True
        holds = None if rhs is None else _leq(weak_target, rhs)
        first = sub[0] if sub else None
        records.append(TrialRecord(
            index=i,
            base_ratio=max((r.base_ratio for r in sub), default=0.0),
            base_char=first.base_char if first else [],
            target_ratio=weak_target / prod1 if prod1 > 0 else 0.0,
            target_char=first.target_char if first else [],
            constants=first.constants if first else {},
            chain_checks=checks,
            target_lhs=weak_target,
            target_rhs=rhs,
            target_holds=holds,
            detail={"levels": levels, "strong_target": strong_target,
                    "level_targets": [r.target_lhs for r in sub]},
        ))
    notes = {"kappa": kappa, "seed": seed, "weak_below_strong_everywhere": bool(all(weak_vs_strong)),
             "weak_strong_evaluations": len(weak_vs_strong)}
    return BoundReport(f"weak-{operator.name}", records, params.as_dict(), notes)


# -- vector valued -----------------------------------------------------------

def vector_exponents(params: MultiParams) -> tuple[float, tuple]:
    """``1/u0 = min(1/q0, 1/p0)`` with ``1/p0 = sum_j 1/p0j``, and ``u_0j = (u0/p0) p_0j``."""
    p0 = sum(params.p0)
    u0 = min(params.q0, p0)
    if p0 == 0:
        return u0, tuple(0.0 for _ in params.p0)
    return u0, tuple(pj * u0 / p0 for pj in params.p0)


def check_vector_valued(operators: Sequence[Operator], params: MultiParams, basis: SetBasis, length: int = 8,
                        trials: int = 100, kappa: float = 2.0, seed: int = 42, distribution: str = "log-uniform",
                        budget: Budget | None = None, dual_samples: int = 8) -> BoundReport:
    """``l^u0``-valued extension: sequences ``(f_jk)_k`` and operators ``(T_k)_k``.

    ``operators`` holds one operator per sequence position (a single entry is
    reused).  The scalar chain runs for ``T~ = ||(T_k f_k)_k||_{l^u0}`` and
    ``S~_j = ||(f_jk)_k||_{l^u0j}``; its base bound is derived from the
    per-position base bounds through the Minkowski/Fubini steps and Hoelder
    in ``k``, each checked.
    """
    if not 1 <= length <= 16:
        raise ValueError("sequence length must lie in 1..16")
    ops = list(operators) * length if len(operators) == 1 else list(operators)
    if len(ops) != length:
        raise ValueError("give one operator or one per sequence position")
    if not all(op.exact_phi for op in ops) or not params.diagonal:
        raise ValueError("the vector-valued harness needs operators with a closed-form base bound")
    mass = basis.mass
    n, m = basis.n, params.m
    u0, u0j = vector_exponents(params)
    counting = np.ones(length)
    records = []
    for i in range(trials):
        rng = make_rng(seed, "vector", i)
        w1s = [sample_weight(rng, n, distribution) for _ in range(m)]
        v1s = [w.copy() for w in w1s]
        seqs = [[sample_function(rng, n, ops[k].nonnegative_inputs) for k in range(length)] for _ in range(m)]
        Tk = np.array([ops[k]([seqs[j][k] for j in range(m)]) for k in range(length)])
        T_tilde = lp_norm(Tk, counting, u0, axis=0)
        S_tilde = [lp_norm(np.array(seqs[j]), counting, u0j[j], axis=0) for j in range(m)]

        def base(w0s, v0s, chars0, C, Tk=Tk, T_tilde=T_tilde, S_tilde=S_tilde, seqs=seqs):
            w0 = np.prod(w0s, axis=0)
            lhs = float(lp_norm(T_tilde * w0, mass, params.q0))
            per_k = lp_norm(Tk * w0, mass, params.q0, axis=1)
            minkowski = float(lp_norm(per_k, counting, u0))
            a = np.array([[lp_norm(seqs[j][k] * v0s[j], mass, params.p0[j]) for k in range(length)]
                          for j in range(m)])
            per_k_base = bool(np.all(per_k <= np.prod(a, axis=0) * (1 + REL_TOL) + 1e-300))
            holder_k = float(lp_norm(np.prod(a, axis=0), counting, u0))
            holder_k_rhs = float(np.prod([lp_norm(a[j], counting, u0j[j]) for j in range(m)]))
            fubini = [float(lp_norm(a[j], counting, u0j[j])) for j in range(m)]
            fubini_rhs = [float(lp_norm(S_tilde[j] * v0s[j], mass, params.p0[j])) for j in range(m)]
            rhs = float(np.prod(fubini_rhs))
            checks = {
                "minkowski": _leq(lhs, minkowski),
                "per_position_base": per_k_base,
                "holder_in_sequence": _leq(holder_k, holder_k_rhs),
                "fubini": all(_leq(x, y) for x, y in zip(fubini, fubini_rhs)),
            }
            return BaseOutcome(lhs, rhs, 1.0, 1.0, checks,
                               {"minkowski_rhs": minkowski, "fubini_lhs": fubini, "fubini_rhs": fubini_rhs})

        records.append(run_chain(basis, params, w1s, v1s, S_tilde, T_tilde, base, kappa, budget,
                                 dual_samples=dual_samples, rng=make_rng(seed, "vector-dual", i), index=i))
    notes = {"kappa": kappa, "seed": seed, "length": length, "u0_recip": u0, "u0j_recip": list(u0j)}
    return BoundReport("vector-valued", records, params.as_dict(), notes)


# -- mixed norms -------------------------------------------------------------

@dataclass(frozen=True)
class MixedParams:
    """Two-level parameters: base tuple and one row of shifts per level.

    Level 1 runs on the full product space, level 2 on the outer factor,
    and the base of level 2 is the target of level 1.
    """

    base: MultiParams
    gamma2: tuple

    @property
    def level1(self) -> MultiParams:
        return self.base

    @property
    def level2(self) -> MultiParams:
        return self.base.next_level(self.gamma2)

    @property
    def alpha_recip(self) -> list:
        return [s + r for s, r in zip(self.base.s0, self.base.r0)]

    def b_matrix(self) -> list:
        """``b_ij = prod_{k<=i} t'_kj / t'_0kj`` (unshifted levels contribute 1)."""
        from .exponents import dual_recip

        rows, prev = [], [1.0] * self.base.m
        for level in (self.level1, self.level2):
            row = []
            for j in range(level.m):
                ex = level.factor_exponents(j)
                if abs(ex.gamma) <= TOL:
                    ratio = 1.0
                else:
                    td, t0d = dual_recip(ex.t), dual_recip(ex.t0)
                    ratio = math.inf if td == 0 and t0d > 0 else (t0d / td if td > 0 else 1.0)
                row.append(prev[j] * ratio)
            rows.append(row)
            prev = row
        return rows

    def as_dict(self) -> dict:
        return {"level1": self.level1.as_dict(), "level2": self.level2.as_dict()}


def check_mixed(operator: Operator, params: MixedParams, inner: SetBasis, outer: SetBasis, product: SetBasis,
                trials: int = 10, kappa: float = 2.0, seed: int = 42, distribution: str = "log-uniform",
                budget: Budget | None = None, dual_samples: int = 8) -> BoundReport:
    """Two-level induction on ``Omega_1 x Omega_2`` (``Omega_1`` innermost).

    The outer chain runs on ``Omega_2`` with ``T~ f(x2) = ||Tf(., x2)||_{L^q1_w1}``
    and ``S~_j f(x2) = ||f_j(., x2)||_{L^p1j_v1j}``.  Its base bound is the
    level-1 statement for the tensor weights ``(w_1j x mu_j, v_1j x nu_j)``,
    verified by running the level-1 chain on the product basis.
    """
    if not (operator.exact_phi and params.base.diagonal):
        raise ValueError("the mixed-norm harness needs an operator with a closed-form base bound")
    if product.n != inner.n * outer.n:
        raise ValueError("the product basis must live on inner x outer")
    n1, n2 = inner.n, outer.n
    m = params.base.m
    lvl1, lvl2 = params.level1, params.level2
    records = []
    tensor_ok = []
    for i in range(trials):
        rng = make_rng(seed, "mixed", i)
        w1s = [sample_weight(rng, n1, distribution) for _ in range(m)]
        w2s = [sample_weight(rng, n2, distribution) for _ in range(m)]
        fs = [sample_function(rng, n1 * n2, operator.nonnegative_inputs) for _ in range(m)]
        Tf = operator(fs)
        w1 = np.prod(w1s, axis=0)
        T_tilde = lp_norm(Tf.reshape(n1, n2) * w1[:, None], inner.mass, lvl1.q1, axis=0)
        S_tilde = [lp_norm(f.reshape(n1, n2) * w[:, None], inner.mass, p, axis=0)
                   for f, w, p in zip(fs, w1s, lvl1.p1)]
        inner_records = []

        def base(mus, nus, chars0, C, fs=fs, Tf=Tf, T_tilde=T_tilde, S_tilde=S_tilde, w1s=w1s, i=i):
            tw = [np.outer(w, mu).ravel() for w, mu in zip(w1s, mus)]
            tv = [np.outer(w, nu).ravel() for w, nu in zip(w1s, nus)]
            rec = run_chain(product, lvl1, tw, tv, fs, Tf, standard_base(operator, lvl1, product, fs, Tf),
                            kappa, budget, dual_samples=dual_samples, rng=make_rng(seed, "mixed-inner", i), index=i)
            inner_records.append(rec)
            mu = np.prod(mus, axis=0)
            lhs = float(lp_norm(T_tilde * mu, outer.mass, lvl1.q1))
            prod = float(np.prod([lp_norm(s * nu, outer.mass, p) for s, nu, p in zip(S_tilde, nus, lvl1.p1)]))
            factor = kappa ** rec.constants["beta"]
            sub = []
            for j in range(m):
                ex = lvl1.factor_exponents(j)
                lhs_t = characteristic_recips(tw[j], tv[j], ex.s, ex.r, product)
                rhs_t = characteristic_recips(w1s[j], w1s[j], ex.s, ex.r, inner) * \
                    characteristic_recips(mus[j], nus[j], ex.s, ex.r, outer)
                sub.append(_leq(lhs_t, rhs_t, 1e-10))
            tensor_ok.append(all(sub))
            checks = {
                "inner_chain": rec.chain_ok,
                "inner_target": rec.target_holds is True,
                "lift_identity": bool(math.isclose(lhs, rec.target_lhs, rel_tol=1e-10)),
                "lift_rhs_identity": bool(math.isclose(prod, float(np.prod(
                    [lp_norm(f * v, product.mass, p) for f, v, p in zip(fs, tv, lvl1.p1)])), rel_tol=1e-10)),
                "tensor_submultiplicative": all(sub),
            }
            return BaseOutcome(lhs, factor * prod, factor, factor, checks,
                               {"inner_beta": rec.constants["beta"], "inner_C": rec.constants["C_kappa"]})

        rec = run_chain(outer, lvl2, w2s, [w.copy() for w in w2s], S_tilde, T_tilde, base, kappa, budget,
                        dual_samples=dual_samples, rng=make_rng(seed, "mixed-outer", i), index=i)
        # the outer target is the mixed-norm statement
        tensor_w = np.outer(w1, np.prod(w2s, axis=0))
        mixed_lhs = float(lp_norm(lp_norm(Tf.reshape(n1, n2) * tensor_w, inner.mass, lvl1.q1, axis=0),
                                  outer.mass, lvl2.q1))
        rec.chain_checks["mixed_target_identity"] = bool(math.isclose(mixed_lhs, rec.target_lhs, rel_tol=1e-10))
        inner_rec = inner_records[0]
        rec.detail["inner_constants"] = inner_rec.constants
        rec.detail["kappa_power"] = rec.constants["beta"] + inner_rec.constants["beta"]
        records.append(rec)
    notes = {
        "kappa": kappa, "seed": seed, "b_ij": params.b_matrix(),
        "kappa_power_l_over_alpha": [2.0 * a for a in params.alpha_recip],
        "tensor_submultiplicative_everywhere": bool(all(tensor_ok)),
    }
    return BoundReport(f"mixed-{operator.name}", records, params.as_dict(), notes)
