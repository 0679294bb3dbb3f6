"""Traceability matrix: each verified statement, the tests that exercise it, and its last verdict.

Verdicts come from two optional sources: a suite report (criterion level)
and a JUnit XML file written by ``pytest --junitxml`` (test level).
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class Statement:
    key: str
    text: str
    module: str
    tests: tuple = ()
    criteria: tuple = ()
    in_scope: bool = True
    reason: str = ""


def _t(module: str, *names: str) -> tuple:
    return tuple(f"tests/test_{module}.py::{n}" for n in names)


STATEMENTS: tuple[Statement, ...] = (
    Statement("char-definition", "two-weight characteristic as a maximum over basis sets", "weights",
              _t("weights", "test_unit_weights", "test_two_point_example", "test_characteristic_p_brute_force")),
    Statement("char-symmetry", "symmetry [w,v]_(s,r) = [1/v,1/w]_(r,s)", "weights",
              _t("weights", "test_symmetry_identity"), (1,)),
    Statement("char-rescaling", "rescaling [w^a,v^a]_(s/a,r/a) = [w,v]_(s,r)^a", "weights",
              _t("weights", "test_rescaling_identity"), (1,)),
    Statement("char-holder", "Hoelder product of characteristics", "weights",
              _t("weights", "test_holder_product"), (1,)),
    Statement("char-monotone", "monotonicity in the exponents", "weights",
              _t("weights", "test_monotonicity"), (1,)),
    Statement("char-interpolation", "interpolation of characteristics", "weights",
              _t("weights", "test_interpolation"), (1,)),
    Statement("char-classical", "relation to the classical A_p constant", "weights",
              _t("weights", "test_classical_ap_relation")),
    Statement("reverse-holder", "reverse Hoelder constant as a characteristic", "weights",
              _t("weights", "test_reverse_holder_definition", "test_reverse_holder_monotone")),
    Statement("fujii-wilson", "Fujii-Wilson constant", "weights", _t("weights", "test_fujii_wilson_examples")),
    Statement("tensor-submultiplicative", "tensor weights have submultiplicative characteristics", "weights",
              _t("weights", "test_tensor_submultiplicative"), (5,)),
    Statement("maximal-definition", "maximal operator and its positivity", "maximal",
              _t("maximal", "test_two_point_maximal", "test_constant_function", "test_sublinear",
                 "test_positive_when_nonzero")),
    Statement("maximal-sup-identity", "sup-norm operator norm equals the (1, inf) characteristic", "maximal",
              _t("maximal", "test_sup_norm_identities"), (2,)),
    Statement("maximal-mirror", "mirror identity with the (inf, 1) characteristic", "maximal",
              _t("maximal", "test_sup_norm_identities"), (2,)),
    Statement("maximal-bounded-iff", "maximal operator bounded on weighted spaces of groups (finite case)",
              "maximal", _t("maximal", "test_buckley_ratio_finite_on_groups")),
    Statement("c-of-one", "the constant c(1) is left unspecified; the Buckley form rejects t = 1", "exponents",
              _t("exponents", "test_buckley_form_rejects_t_one")),
    Statement("consistency", "consistency relations between base and target exponents", "exponents",
              _t("exponents", "test_solve_showcase_tuple", "test_solve_second_tuple",
                 "test_solve_satisfies_relations")),
    Statement("admissible-region", "limited-range admissible region", "exponents",
              _t("exponents", "test_region_contains_showcase", "test_region_clips_infinite_base")),
    Statement("rescaled-parameters", "rescaled parameters t0, t in the three sign cases", "exponents",
              _t("exponents", "test_rescale_negative_case", "test_rescale_zero_case",
                 "test_rescale_recovers_inputs")),
    Statement("rescaled-mixed", "recursive rescaled parameters for mixed norms", "exponents",
              _t("exponents", "test_rescale_mixed_two_level")),
    Statement("constants", "explicit constants beta and C_kappa", "exponents",
              _t("exponents", "test_constants_showcase_beta", "test_constants_zero_shift",
                 "test_constants_monotone_in_kappa", "test_constants_monotone_in_char")),
    Statement("constants-invariance", "constants depend only on the weight-class exponents", "exponents",
              _t("exponents", "test_exponent_invariance"), (4,)),
    Statement("majorant-iterate", "fixed-point majorant R and its three properties", "rdf",
              _t("rdf", "test_iterate_uniform_closed_form", "test_iterate_point_indicator",
                 "test_iterate_large_kappa"), (3,)),
    Statement("factor-weights", "factor weights with characteristic and norm-product bounds", "rdf",
              _t("rdf", "test_showcase_factor_pair", "test_negative_shift_equals_swapped_run",
                 "test_random_instances_postconditions", "test_zero_shift_returns_inputs"), (3,)),
    Statement("one-weight-bound", "one-weight simplification of the characteristic bound", "rdf",
              _t("rdf", "test_one_weight_bound")),
    Statement("embedding", "weighted space contained in the union over the ratio class", "rdf",
              _t("rdf", "test_embed_membership", "test_embed_two_level")),
    Statement("dual-split", "splitting the dual function into factors", "rdf",
              _t("rdf", "test_split_dual_single_factor", "test_split_dual_two_factors")),
    Statement("linear-extrapolation", "linear off-diagonal limited-range extrapolation", "extrapolate",
              _t("extrapolate", "test_identity_passes", "test_m1_equals_linear"), (4,)),
    Statement("pairs-formulation", "extrapolation pairs formulation", "extrapolate",
              _t("extrapolate", "test_pairs_showcase_recorded")),
    Statement("multilinear-extrapolation", "multilinear extrapolation with explicit constants", "extrapolate",
              _t("extrapolate", "test_bilinear_product_passes", "test_zero_shift_reduces_to_base"), (4,)),
    Statement("mixed-extrapolation", "mixed-norm extrapolation by induction over coordinates", "extrapolate",
              _t("extrapolate", "test_mixed_passes", "test_mixed_b_matrix"), (5,)),
    Statement("weak-type", "weak-type mixed-norm variant", "extrapolate",
              _t("extrapolate", "test_weak_below_strong", "test_indicator_weak_equals_strong",
                 "test_weak_type_passes"), (5,)),
    Statement("vector-valued", "sequence-valued extension", "extrapolate",
              _t("extrapolate", "test_vector_valued_passes", "test_vector_single_sequence"), (6,)),
    Statement("group-basis", "group bases with sumset containment and doubling", "space",
              _t("space", "test_cyclic_four", "test_group_basis_invariants")),
    Statement("multiplier-duality", "multiplier norms through the duality form", "transfer",
              _t("transfer", "test_duality_form_two_orders", "test_duality_form_delta"), (7,)),
    Statement("dual-hom", "dual homomorphism and the pairing identity", "transfer",
              _t("transfer", "test_dual_hom_z2_z4", "test_dual_hom_identity_and_zero", "test_random_dual_pairing"),
              (7,)),
    Statement("homomorphism-duality", "homomorphism duality identity", "transfer",
              _t("transfer", "test_homomorphism_duality_random", "test_homomorphism_duality_zero_hom"), (7,)),
    Statement("translation-invariance", "multiplier norms are invariant under translating the weight",
              "transfer", _t("transfer", "test_translation_invariance_random"), (7,)),
    Statement("transference", "weighted transference along a homomorphism", "transfer",
              _t("transfer", "test_transference_z2_z4", "test_transference_identity",
                 "test_transference_z8_z4_svd"), (7,)),
    Statement("approximate-identity", "approximate identities and density arguments", "transfer", in_scope=False,
              reason="vacuous on finite groups: the point mass at 0 is an exact identity"),
    Statement("compact-support-reduction", "reduction to compactly supported multipliers", "transfer",
              in_scope=False, reason="every multiplier on a finite group is compactly supported"),
    Statement("decreasing-kernels", "the convolution algebra of decreasing kernels", "transfer", in_scope=False,
              reason="continuous-group scaffolding with no finite analogue"),
    Statement("r-boundedness", "R-boundedness consequence", "extrapolate", in_scope=False,
              reason="requires randomized-sum machinery"),
    Statement("external-sharp-constants", "sharp constants of cited external results", "maximal", in_scope=False,
              reason="only measured lower bounds are reported"),
)


@dataclass
class TraceRow:
    statement: Statement
    test_status: dict = field(default_factory=dict)
    criterion_status: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if not self.statement.in_scope:
            return "out-of-scope"
        states = list(self.test_status.values()) + list(self.criterion_status.values())
        if not states or all(s == "not run" for s in states):
            return "not run"
        if any(s == "fail" for s in states):
            return "fail"
        return "pass" if all(s == "pass" for s in states) else "partial"

    def as_dict(self) -> dict:
        s = self.statement
        return {"key": s.key, "statement": s.text, "module": s.module, "in_scope": s.in_scope,
                "reason": s.reason, "tests": self.test_status, "criteria": self.criterion_status,
                "verdict": self.verdict}


def junit_status(path) -> dict:
    """``{"tests/test_x.py::name": "pass" | "fail" | "skip"}`` from a JUnit XML file."""
    out = {}
    for case in ET.parse(path).getroot().iter("testcase"):
        module = case.get("classname", "").replace(".", "/")
        name = case.get("name", "").split("[")[0]
        key = f"{module}.py::{name}"
        if case.find("failure") is not None or case.find("error") is not None:
            status = "fail"
        elif case.find("skipped") is not None:
            status = "skip"
        else:
            status = "pass"
        if out.get(key) != "fail":
            out[key] = status
    return out


def trace(suite_report: dict | None = None, junit: str | Path | None = None) -> list[TraceRow]:
    tests = junit_status(junit) if junit else {}
    crit = (suite_report or {}).get("criteria", {})
    rows = []
    for st in STATEMENTS:
        rows.append(TraceRow(
            st,
            {t: tests.get(t, "not run") for t in st.tests},
            {str(c): ("pass" if crit[str(c)]["passed"] else "fail") if str(c) in crit else "not run"
             for c in st.criteria},
        ))
    return rows


def missing_tests(rows: list[TraceRow]) -> list[str]:
    """In-scope statements without any test identifier."""
    return [r.statement.key for r in rows if r.statement.in_scope and not r.statement.tests]


def format_table(rows: list[TraceRow]) -> str:
    lines = [f"{'statement':<28} {'module':<12} {'verdict':<13} tests"]
    for r in rows:
        names = ", ".join(t.split("::")[1] for t in r.statement.tests) or r.statement.reason
        crit = ",".join(str(c) for c in r.statement.criteria)
        lines.append(f"{r.statement.key:<28} {r.statement.module:<12} {r.verdict:<13} {names}"
                     + (f" [criteria {crit}]" if crit else ""))
    return "\n".join(lines)
