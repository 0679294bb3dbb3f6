"""The acceptance suite: seven numerical criteria and a deterministic report.

Every criterion returns a :class:`CriterionResult` whose ``payload`` holds
only seed-determined numbers; wall-clock times live in ``seconds`` and are
kept out of the JSON payload so that repeated runs compare byte for byte.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exponents import IndexInputs
from .extrapolate import (MixedParams, MultiParams, check_mixed, check_multilinear, check_vector_valued,
                          check_weak_type, exponent_invariance)
from .maximal import Budget, opnorm_maximal
from .operators import identity_operator, product_operator
from .rdf import FactorExponents, NonConvergence, factor_pair
from .rng import make_rng
from .sampling import sample_function, sample_weight
from .space import make_cyclic_space, make_dyadic_space, product_space
from .transfer import (FiniteAbelianGroup, GroupHom, dft, dual_hom, duality_form, duality_form_spatial,
                       homomorphism_duality_check, pairing_identity_holds, transference_check,
                       translation_invariance_check)
from .weights import characteristic_recips

RUNTIME_LIMITS = {1: 30.0, 2: 10.0, 3: 120.0, 4: 180.0, 5: 120.0, 6: 60.0, 7: 60.0}


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    payload: dict
    seconds: float = 0.0
    limit: float = math.inf
    notes: list = field(default_factory=list)

    @property
    def within_time(self) -> bool:
        return self.seconds < self.limit

    def line(self) -> str:
        status = "PASS" if self.passed and self.within_time else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.1f} s, limit {self.limit:.0f} s)"


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def _spaces():
    _, dyadic = make_dyadic_space(6)
    _, cyclic, _ = make_cyclic_space(64)
    return {"dyadic6": dyadic, "cyclic64": cyclic}


# -- criterion 1 ---------------------------------------------------------------

def weight_identities(seed: int = 42, instances: int = 500) -> CriterionResult:
    """Symmetry, rescaling, Hoelder product, monotonicity and interpolation."""
    bases = _spaces()
    alphas = (1 / 3, 1 / 2, 2.0, 3.0)
    worst = {"symmetry": 0.0, "rescaling": 0.0}
    violations = {"holder_product": 0, "monotonicity": 0, "interpolation": 0}
    max_excess = {k: -math.inf for k in violations}
    per_space = {}

    def record(name, lhs, rhs):
        excess = lhs / rhs - 1.0
        max_excess[name] = max(max_excess[name], excess)
        if excess > 1e-12:
            violations[name] += 1

    for k in range(instances):
        label = "dyadic6" if k % 2 == 0 else "cyclic64"
        basis = bases[label]
        per_space[label] = per_space.get(label, 0) + 1
        rng = make_rng(seed, "weights", k)
        n = basis.n
        w, v = sample_weight(rng, n, "mixed"), sample_weight(rng, n, "mixed")
        s, r = rng.uniform(0.0, 2.0, 2)
        c = characteristic_recips(w, v, s, r, basis)
        worst["symmetry"] = max(worst["symmetry"], _rel(c, characteristic_recips(1 / v, 1 / w, r, s, basis)))
        for a in alphas:
            scaled = characteristic_recips(w**a, v**a, s * a, r * a, basis)
            worst["rescaling"] = max(worst["rescaling"], _rel(scaled, c**a))
        # Hoelder product over a random split of the exponents
        w2, v2 = sample_weight(rng, n, "mixed"), sample_weight(rng, n, "mixed")
        s2, r2 = rng.uniform(0.0, 1.0, 2)
        prod = characteristic_recips(w * w2, v * v2, s + s2, r + r2, basis)
        record("holder_product", prod, c * characteristic_recips(w2, v2, s2, r2, basis))
        # monotonicity: larger exponents (smaller reciprocals) give larger values
        s1, r1 = s * rng.random(), r * rng.random()
        record("monotonicity", c, characteristic_recips(w, v, s1, r1, basis))
        # interpolation along a reciprocal-affine path
        theta = rng.random()
        st, rt = (1 - theta) * s + theta * s2, (1 - theta) * r + theta * r2
        mid = characteristic_recips(w ** (1 - theta) * w2**theta, v ** (1 - theta) * v2**theta, st, rt, basis)
        ends = characteristic_recips(w2, v2, s2, r2, basis)
        record("interpolation", mid, c ** (1 - theta) * ends**theta)
    passed = worst["symmetry"] <= 1e-12 and worst["rescaling"] <= 1e-10 and not any(violations.values())
    payload = {"instances": instances, "per_space": per_space, "max_relative_error": worst,
               "violations": violations, "max_relative_excess": max_excess}
    return CriterionResult(1, "weight identities and inequalities", passed, payload)


# -- criterion 2 ---------------------------------------------------------------

def maximal_sup_identities(seed: int = 42, pairs: int = 200) -> CriterionResult:
    """``||M||`` between weighted ``L^inf`` spaces equals the ``(1, inf)`` and ``(inf, 1)`` characteristics."""
    bases = _spaces()
    worst = {"one_inf": 0.0, "inf_one": 0.0}
    for k in range(pairs):
        basis = bases["dyadic6" if k % 2 == 0 else "cyclic64"]
        rng = make_rng(seed, "maximal", k)
        w, v = sample_weight(rng, basis.n, "mixed"), sample_weight(rng, basis.n, "mixed")
        # M from L^inf_{1/w} to L^inf_{1/v}
        a = opnorm_maximal(basis, 1 / v, 1 / w, "inf").value
        worst["one_inf"] = max(worst["one_inf"], _rel(a, characteristic_recips(w, v, 1.0, 0.0, basis)))
        # M from L^inf_v to L^inf_w
        b = opnorm_maximal(basis, w, v, "inf").value
        worst["inf_one"] = max(worst["inf_one"], _rel(b, characteristic_recips(w, v, 0.0, 1.0, basis)))
    passed = max(worst.values()) <= 1e-12
    return CriterionResult(2, "maximal operator sup-norm identities", passed,
                           {"pairs": pairs, "max_relative_error": worst})


# -- criterion 3 ---------------------------------------------------------------

SHOWCASE_FACTOR = (1.5, 1.0, 0.0, 1.5, -0.5)  # reciprocals p0, s0, r0, u0 and 1/gamma


def sample_factor_exponents(rng: np.random.Generator) -> FactorExponents:
    """Random admissible reciprocals; about one draw in ten is unshifted."""
    while True:
        g = 0.0 if rng.random() < 0.1 else float(rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 0.75))
        s0, r0 = rng.uniform(0.0, 1.0, 2)
        if rng.random() < 0.15:
            s0, r0 = (0.0, r0) if rng.random() < 0.5 else (s0, 0.0)
        p0, u0 = rng.uniform(0.0, 1.5, 2)
        if s0 + r0 < 0.05:
            continue
        try:
            return FactorExponents.from_recips(p0, s0, r0, u0, g)
        except ValueError:
            continue


def rdf_postconditions(seed: int = 42, instances: int = 300, levels: int = 4) -> CriterionResult:
    _, basis = make_dyadic_space(levels)
    failures = {}
    worst = {"char_ratio": 0.0, "normprod_ratio": 0.0, "ratio_deviation": 0.0}
    counts = {"shifted_positive": 0, "shifted_negative": 0, "unshifted": 0, "one_weight": 0}
    budget = Budget(restarts=8, iterations=200, seed=seed)
    errors = 0
    for k in range(instances):
        rng = make_rng(seed, "rdf", k)
        ex = FactorExponents.from_recips(*SHOWCASE_FACTOR) if k == 0 else sample_factor_exponents(rng)
        w = sample_weight(rng, basis.n, "mixed")
        one_weight = k == 0 or rng.random() < 0.5
        v = w.copy() if one_weight else sample_weight(rng, basis.n, "mixed")
        f, h = sample_function(rng, basis.n), sample_function(rng, basis.n)
        counts["one_weight"] += one_weight
        counts["unshifted" if ex.gamma == 0 else ("shifted_positive" if ex.gamma > 0 else "shifted_negative")] += 1
        try:
            res = factor_pair(basis, ex, w, v, f, h, 2.0, budget)
        except NonConvergence:
            errors += 1
            failures["non_convergence"] = failures.get("non_convergence", 0) + 1
            continue
        for name, ok in res.checks.items():
            if not ok:
                failures[name] = failures.get(name, 0) + 1
        worst["char_ratio"] = max(worst["char_ratio"], res.char_bound_lhs / res.char_bound_rhs)
        if res.normprod_rhs > 0:
            worst["normprod_ratio"] = max(worst["normprod_ratio"], res.normprod_lhs / res.normprod_rhs)
        worst["ratio_deviation"] = max(worst["ratio_deviation"], res.properties.get("ratio_deviation", 0.0))
        if k == 0:
            showcase = {"exponents": ex.as_dict(), **{key: val for key, val in res.summary().items()
                                                       if key not in ("properties",)}}
    payload = {"instances": instances, "space": f"dyadic({levels})", "counts": counts, "failures": failures,
               "worst": worst, "showcase": showcase}
    return CriterionResult(3, "weight construction postconditions", not failures and errors == 0, payload)


# -- criterion 4 ---------------------------------------------------------------

CHAIN_TUPLES = (
    ("identity: q0=p0=2, s0=1, r0=inf, 1/gamma=-1/2 (q=inf)", "identity", 2, [2], [1], ["inf"], ["-1/2"]),
    ("identity: q0=p0=2, s0=4, r0=4/3, 1/gamma=1/2 (p=1)", "identity", 2, [2], [4], ["4/3"], ["1/2"]),
    ("identity: q0=p0=1, s0=r0=2, 1/gamma=1/2 (p=2/3)", "identity", 1, [1], [2], [2], ["1/2"]),
    ("product1: q0=p0=2, s0=r0=3, 1/gamma=-1/4", "product1", 2, [2], [3], [3], ["-1/4"]),
    ("product2: q0=1, p0=(2,2), s0=r0=(2,2), 1/gamma=(1/4,1/4)", "product2", 1, [2, 2], [2, 2], [2, 2],
     ["1/4", "1/4"]),
    ("product2: q0=2/3, p0=(2,1), s0=(4,2), r0=(2,4), 1/gamma=(-1/4,1/8)", "product2", "2/3", [2, 1], [4, 2],
     [2, 4], ["-1/4", "1/8"]),
)

# (q0, p0) variations sharing the weight-class exponents of each tuple above
INVARIANCE_PARTNERS = {
    0: ("3/2", ["3/2"]), 1: (3, [3]), 2: (2, [2]), 3: (4, [4]), 4: ("1/2", [4, 4]), 5: (1, [4, 4 / 3]),
}


def _operator(name: str):
    return identity_operator() if name == "identity" else product_operator(int(name[-1]))


def chain_soundness(seed: int = 42, trials: int = 200, levels: int = 4) -> CriterionResult:
    _, basis = make_dyadic_space(levels)
    budget = Budget(restarts=8, iterations=200, seed=seed)
    reports, passed = [], True
    invariance = []
    for idx, (label, op, q0, p0, s0, r0, gamma) in enumerate(CHAIN_TUPLES):
        params = MultiParams.from_exponents(q0, p0, s0, r0, gamma)
        rep = check_multilinear(_operator(op), params, basis, trials=trials, seed=seed, budget=budget,
                                distribution="mixed", label=label)
        reports.append({"label": label, "verdict": rep.verdict, "chain_ok": rep.chain_ok,
                        "implication_ok": rep.implication_ok, "failed_checks": rep.failed_checks(),
                        "params": params.as_dict(), "constants_first_trial": rep.trials[0].constants,
                        "max_target_ratio": max(t.target_lhs / t.target_rhs for t in rep.trials)})
        passed &= rep.verdict == "pass" and rep.chain_ok and rep.implication_ok
        pq0, pp0 = INVARIANCE_PARTNERS[idx]
        partner = MultiParams.from_exponents(pq0, pp0, s0, r0, gamma)
        rng = make_rng(seed, "invariance", idx)
        inputs = [IndexInputs(params.gamma[j], 0.0, 0.0, float(rng.uniform(1, 5)), float(rng.uniform(1, 50)))
                  for j in range(params.m)]
        same = exponent_invariance(params, partner, inputs, 2.0)
        invariance.append({"label": label, "partner_q0": params_to_text(partner.q0),
                           "partner_p0": [params_to_text(x) for x in partner.p0], "identical": same})
        passed &= same
    payload = {"trials_per_tuple": trials, "space": f"dyadic({levels})", "tuples": reports,
               "exponent_invariance": invariance}
    return CriterionResult(4, "extrapolation chain soundness", passed, payload)


def params_to_text(recip: float) -> str:
    from .exponents import format_exponent

    return format_exponent(recip)


# -- criterion 5 ---------------------------------------------------------------

def mixed_and_weak(seed: int = 42, mixed_trials: int = 20, weak_trials: int = 50) -> CriterionResult:
    sp4, b4 = make_dyadic_space(4)
    _, prod = product_space((sp4, b4), (sp4, b4))
    budget = Budget(restarts=8, iterations=200, seed=seed)
    base = MultiParams.from_exponents(1, [2, 2], [2, 2], [2, 2], ["1/4", "1/4"])
    mixed = check_mixed(product_operator(2), MixedParams(base, (0.25, 0.25)), b4, b4, prod,
                        trials=mixed_trials, seed=seed, budget=budget)
    weak_params = MultiParams.from_exponents(1, [2, 2], [2, 2], [2, 2], ["1/4", "1/4"])
    weak = check_weak_type(product_operator(2), weak_params, b4, trials=weak_trials, seed=seed, budget=budget)
    passed = (mixed.verdict == "pass" and mixed.chain_ok and weak.verdict == "pass" and weak.chain_ok
              and weak.notes["weak_below_strong_everywhere"])
    payload = {
        "mixed": mixed.as_dict(with_trials=False),
        "weak": weak.as_dict(with_trials=False),
        "product_space": "dyadic(4) x dyadic(4)",
    }
    return CriterionResult(5, "mixed-norm and weak-type chains", passed, payload)


# -- criterion 6 ---------------------------------------------------------------

def vector_valued(seed: int = 42, trials: int = 100, length: int = 8) -> CriterionResult:
    _, b4 = make_dyadic_space(4)
    params = MultiParams.from_exponents(1, [2, 2], [2, 2], [2, 2], ["1/4", "1/4"])
    rep = check_vector_valued([product_operator(2)] * length, params, b4, length=length, trials=trials, seed=seed,
                              budget=Budget(restarts=8, iterations=200, seed=seed))
    passed = rep.verdict == "pass" and rep.chain_ok
    return CriterionResult(6, "vector-valued extension", passed, rep.as_dict(with_trials=False))


# -- criterion 7 ---------------------------------------------------------------

# (H factors, G factors, matrix of Phi from the dual of H to the dual of G)
TRANSFER_INSTANCES = (
    ((2,), (4,), [[2]]), ((4,), (8,), [[2]]), ((4,), (2,), [[1]]), ((8,), (8,), [[1]]), ((8,), (8,), [[3]]),
    ((6,), (12,), [[2]]), ((12,), (6,), [[1]]), ((3,), (9,), [[3]]), ((9,), (3,), [[1]]),
    ((2, 2), (4, 4), [[2, 0], [0, 2]]), ((4, 4), (2, 2), [[1, 0], [0, 1]]), ((4,), (2, 2), [[1], [0]]),
    ((2, 2), (4,), [[2, 0]]), ((8,), (64,), [[8]]), ((16,), (32,), [[2]]), ((32,), (16,), [[1]]),
    ((4,), (8,), [[0]]), ((2, 3), (6, 6), [[3, 0], [0, 2]]), ((6,), (2, 3), [[1], [1]]),
    ((4, 2), (8, 4), [[2, 0], [0, 2]]), ((5,), (10,), [[2]]), ((10,), (5,), [[1]]),
)


def _complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def transference_exact(seed: int = 42) -> CriterionResult:
    worst = {"parseval": 0.0, "homomorphism_duality": 0.0, "translation_invariance": 0.0, "duality_form": 0.0,
             "surjective_excess": -math.inf}
    pairing_ok, records = True, []
    surjective_ok = True
    for k, (hf, gf, a) in enumerate(TRANSFER_INSTANCES):
        rng = make_rng(seed, "transfer", k)
        H, G = FiniteAbelianGroup(hf), FiniteAbelianGroup(gf)
        phi = GroupHom(H, G, a)
        for grp in (G, H):
            f, g = _complex(rng, grp.size), _complex(rng, grp.size)
            direct = np.vdot(g, f)
            spectral = np.vdot(dft(grp, g), dft(grp, f)) / grp.size
            worst["parseval"] = max(worst["parseval"], abs(direct - spectral) / max(abs(direct), 1e-300))
        pairing_ok &= pairing_identity_holds(phi)
        m, E = _complex(rng, G.size), _complex(rng, H.size)
        scale = np.abs(m).sum() * np.abs(E).sum()
        worst["homomorphism_duality"] = max(worst["homomorphism_duality"],
                                            homomorphism_duality_check(phi, m, E) / scale)
        wG = np.exp(rng.uniform(-2, 2, G.size))
        worst["translation_invariance"] = max(worst["translation_invariance"],
                                              translation_invariance_check(G, m, 2, wG))
        f, g = _complex(rng, G.size), _complex(rng, G.size)
        two = (duality_form(G, m, f, g), duality_form_spatial(G, m, f, g))
        worst["duality_form"] = max(worst["duality_form"], abs(two[0] - two[1]) / max(abs(two[0]), 1e-300))
        wH = np.exp(rng.uniform(-2, 2, H.size))
        rep = transference_check(phi, wH, 2, m)
        excess = rep.lhs.value / (rep.c * rep.rhs.value) - 1.0
        if rep.surjective:
            worst["surjective_excess"] = max(worst["surjective_excess"], excess)
            surjective_ok &= rep.c == 1.0 and excess <= 1e-9
        records.append({"H": list(hf), "G": list(gf), "phi": a, "dual": dual_hom(phi).matrix.tolist(),
                        "surjective": rep.surjective, "c": rep.c, "lhs": rep.lhs.value, "rhs": rep.rhs.value,
                        "verdict": rep.verdict})
    n_surj = sum(r["surjective"] for r in records)
    passed = (pairing_ok and surjective_ok and worst["parseval"] <= 1e-12 and worst["homomorphism_duality"] < 1e-10
              and worst["translation_invariance"] < 1e-10 and worst["duality_form"] <= 1e-10
              and 0 < n_surj < len(records) and all(r["verdict"] == "consistent" for r in records))
    payload = {"instances": len(records), "surjective": n_surj, "pairing_exhaustive_exact": pairing_ok,
               "worst": worst, "records": records}
    return CriterionResult(7, "transference at p = 2", passed, payload)


CRITERIA: dict[int, Callable[[int], CriterionResult]] = {
    1: weight_identities, 2: maximal_sup_identities, 3: rdf_postconditions, 4: chain_soundness,
    5: mixed_and_weak, 6: vector_valued, 7: transference_exact,
}


def run_criterion(number: int, seed: int = 42) -> CriterionResult:
    start = time.perf_counter()
    res = CRITERIA[number](seed)
    res.seconds = time.perf_counter() - start
    res.limit = RUNTIME_LIMITS[number]
    return res


def run_suite(seed: int = 42, only=None) -> tuple[dict, list[CriterionResult]]:
    """Run the criteria; returns the deterministic payload and the full results."""
    results = [run_criterion(n, seed) for n in sorted(CRITERIA) if only is None or n in only]
    payload = {
        "seed": seed,
        "criteria": {str(r.number): {"name": r.name, "passed": r.passed, "result": r.payload} for r in results},
        "verdict": "pass" if all(r.passed for r in results) else "fail",
    }
    return payload, results
