"""``weightlab`` command line.

Every command prints a JSON report (sorted keys) on stdout and exits with 0
exactly when its checks pass.  Configuration errors exit with status 2 and
name the offending key.  ``WEIGHTLAB_THREADS`` caps the trial worker pool.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np
from jsonschema import Draft202012Validator

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .exponents import NAMES, Exponent, InconsistentExponents, admissible_region, solve_consistency
from .io import dumps, load_array, load_space, read_json, write_csv, write_json
from .maximal import Budget, opnorm_maximal
from .space import make_cyclic_space, make_dyadic_space, product_space, validate_basis
from .weights import characteristic_argmax

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

_EXPONENT = {"type": ["string", "number"]}
_EXPONENT_LIST = {"type": "array", "items": _EXPONENT, "minItems": 1, "maxItems": 3}
_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["seed", "space", "operator", "exponents"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "space": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["dyadic", "cyclic", "file"]},
                "levels": {"type": "integer", "minimum": 1, "maximum": 16},
                "n": {"type": "integer", "minimum": 2},
                "path": {"type": "string"},
            },
        },
        "operator": {
            "type": "object",
            "required": ["name"],
            "additionalProperties": False,
            "properties": {
                "name": {"enum": ["identity", "product1", "product2", "product3", "maximal", "multiplier", "pairs"]},
                "factors": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "values_path": {"type": "string"},
                "path": {"type": "string"},
            },
        },
        "exponents": {
            "type": "object",
            "required": ["q0", "p0", "s0", "r0", "gamma"],
            "additionalProperties": False,
            "properties": {"q0": _EXPONENT, "p0": _EXPONENT_LIST, "s0": _EXPONENT_LIST, "r0": _EXPONENT_LIST,
                           "gamma": _EXPONENT_LIST, "gamma2": _EXPONENT_LIST},
        },
        "sampler": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "distribution": {"enum": ["log-uniform", "power", "checkerboard", "mixed"]},
                "trials": {"type": "integer", "minimum": 1},
                "one_weight": {"type": "boolean"},
                "envelope_samples": {"type": "integer", "minimum": 1},
            },
        },
        "run": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["multilinear", "weak", "vector", "mixed"]},
                "kappa": {"type": "number", "exclusiveMinimum": 1},
                "dual_samples": {"type": "integer", "minimum": 0},
                "length": {"type": "integer", "minimum": 1, "maximum": 16},
            },
        },
        "tolerances": {"type": "object", "additionalProperties": False, "properties": {"relative": _POSITIVE}},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"json": {"type": "string"}, "csv": {"type": "string"}},
        },
    },
}


class ConfigError(ValueError):
    """A configuration problem, reported with the offending key."""


def validate_config(cfg: dict) -> None:
    errors = sorted(Draft202012Validator(CONFIG_SCHEMA).iter_errors(cfg), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        where = ".".join(str(p) for p in err.path) or "<root>"
        raise ConfigError(f"config error at '{where}': {err.message}")


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config error: {path} is not valid TOML ({exc})") from exc
    validate_config(cfg)
    return cfg


# -- command implementations -----------------------------------------------------

def _emit(obj) -> None:
    sys.stdout.write(dumps(obj))


def cmd_space_validate(args) -> int:
    space, basis = load_space(args.file)
    report = validate_basis(space, basis)
    _emit(report.to_dict())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_exponents_solve(args) -> int:
    known = {name: getattr(args, name) for name in NAMES if getattr(args, name) is not None}
    gamma = None
    if args.gamma is not None:
        from fractions import Fraction

        gamma = float(Fraction(args.gamma))
    try:
        tup = solve_consistency(known, gamma)
    except InconsistentExponents as exc:
        _emit({"error": str(exc)})
        return EXIT_FAIL
    out = {"tuple": tup.as_dict(readable=True), "reciprocals": tup.as_dict()}
    if None not in (tup.q0, tup.p0, tup.s0, tup.r0):
        region = admissible_region(*(Exponent(x) for x in (tup.q0, tup.p0, tup.s0, tup.r0)))
        out["region"] = region.as_dict()
        out["in_region"] = region.contains_tuple(tup) if None not in (tup.q, tup.p, tup.s, tup.r) else None
    _emit(out)
    return EXIT_OK


def cmd_char(args) -> int:
    _, basis = load_space(args.space)
    w = load_array(args.w)
    v = load_array(args.v) if args.v else w
    value, arg = characteristic_argmax(w, v, args.s, args.r, basis)
    _emit({"value": float(value), "argmax_set": int(arg), "argmax_members": basis.sets[int(arg)].tolist()})
    return EXIT_OK


def _budget(args) -> Budget:
    return Budget(restarts=args.restarts, iterations=args.iterations, seed=args.seed)


def cmd_maxop(args) -> int:
    _, basis = load_space(args.space)
    w = load_array(args.w)
    v = load_array(args.v) if args.v else w
    est = opnorm_maximal(basis, w, v, args.p, _budget(args))
    _emit(est.as_dict())
    return EXIT_OK


def cmd_rdf(args) -> int:
    from fractions import Fraction

    from .rdf import FactorExponents, NonConvergence, factor_pair

    _, basis = load_space(args.space)
    params = read_json(args.params)
    missing = [k for k in ("p0", "s0", "r0", "u0", "gamma") if k not in params]
    if missing:
        raise ConfigError(f"config error at '{missing[0]}': required by the parameter file")
    ex = FactorExponents.from_base(params["p0"], params["s0"], params["r0"], params["u0"],
                                  float(Fraction(str(params["gamma"]))))
    w = load_array(args.w)
    v = load_array(args.v) if args.v else w
    f, h = load_array(args.f), load_array(args.h)
    try:
        res = factor_pair(basis, ex, w, v, f, h, args.kappa, _budget(args))
    except NonConvergence as exc:
        _emit({"error": str(exc)})
        return EXIT_FAIL
    _emit({"exponents": ex.as_dict(), **res.summary(), "w0": res.w0, "v0": res.v0, "ok": res.ok})
    return EXIT_OK if res.ok else EXIT_FAIL


def _space_from_config(spec: dict):
    kind = spec["kind"]
    if kind == "dyadic":
        if "levels" not in spec:
            raise ConfigError("config error at 'space.levels': required for a dyadic space")
        return make_dyadic_space(spec["levels"])
    if kind == "cyclic":
        if "n" not in spec:
            raise ConfigError("config error at 'space.n': required for a cyclic space")
        space, basis, _ = make_cyclic_space(spec["n"])
        return space, basis
    if "path" not in spec:
        raise ConfigError("config error at 'space.path': required for a file space")
    return load_space(spec["path"])


def _operator_from_config(spec: dict, basis):
    from .operators import PairFamily, builtin_operators, multiplier_operator

    name = spec["name"]
    if name == "multiplier":
        if "factors" not in spec or "values_path" not in spec:
            raise ConfigError("config error at 'operator.values_path': multipliers need factors and values_path")
        if int(np.prod(spec["factors"])) != basis.n:
            raise ConfigError("config error at 'operator.factors': group size differs from the space size")
        return multiplier_operator(spec["factors"], load_array(spec["values_path"], complex_ok=True))
    if name == "pairs":
        if "path" not in spec:
            raise ConfigError("config error at 'operator.path': a pair family needs a JSON file")
        data = read_json(spec["path"])
        pairs = [([np.asarray(f, float) for f in item["f"]], np.asarray(item["g"], float)) for item in data["pairs"]]
        return PairFamily(pairs, data.get("label", "pairs"))
    return builtin_operators(basis)[name]


def run_extrapolate(cfg: dict):
    """Dispatch a validated configuration; returns the :class:`BoundReport`."""
    from . import extrapolate as ex
    from .operators import PairFamily, fit_envelope
    from .rng import make_rng

    seed = cfg["seed"]
    space, basis = _space_from_config(cfg["space"])
    op = _operator_from_config(cfg["operator"], basis)
    e = cfg["exponents"]
    try:
        params = ex.MultiParams.from_exponents(e["q0"], e["p0"], e["s0"], e["r0"], e["gamma"])
    except (InconsistentExponents, ValueError) as exc:
        raise ConfigError(f"config error at 'exponents': {exc}") from exc
    if op.arity != params.m:
        raise ConfigError(f"config error at 'exponents.p0': operator takes {op.arity} functions, "
                          f"exponents describe {params.m}")
    sampler = cfg.get("sampler", {})
    run = cfg.get("run", {})
    mode = run.get("mode", "multilinear")
    kappa = run.get("kappa", 2.0)
    dist = sampler.get("distribution", "log-uniform")
    trials = sampler.get("trials", 200)
    budget = Budget(seed=seed)
    common = dict(kappa=kappa, seed=seed, distribution=dist, budget=budget)
    envelope = None
    exact = not isinstance(op, PairFamily) and op.exact_phi and params.diagonal
    if not exact and mode == "multilinear":
        envelope = fit_envelope(op, basis, params.q0, params.p0, params.s0, params.r0, make_rng(seed, "envelope"),
                                samples=sampler.get("envelope_samples", 200), distribution=dist)
    with ex.relative_tolerance(cfg.get("tolerances", {}).get("relative", ex.REL_TOL)):
        if isinstance(op, PairFamily):
            if mode != "multilinear":
                raise ConfigError("config error at 'run.mode': pair families support the multilinear mode only")
            return ex.check_pairs(op, params, basis, envelope, dual_samples=run.get("dual_samples", 64), **common)
        if mode == "multilinear":
            return ex.check_multilinear(op, params, basis, trials=trials, one_weight=sampler.get("one_weight", True),
                                        envelope=envelope, dual_samples=run.get("dual_samples", 64), **common)
        if not exact:
            raise ConfigError(f"config error at 'run.mode': mode {mode!r} needs an operator with a closed-form "
                              "base bound at diagonal exponents")
        if mode == "weak":
            return ex.check_weak_type(op, params, basis, trials=trials, dual_samples=run.get("dual_samples", 8),
                                      **common)
        if mode == "vector":
            length = run.get("length", 8)
            return ex.check_vector_valued([op] * length, params, basis, length=length, trials=trials,
                                          dual_samples=run.get("dual_samples", 8), **common)
        if "gamma2" not in e:
            raise ConfigError("config error at 'exponents.gamma2': required for the mixed mode")
        if cfg["space"]["kind"] != "dyadic":
            raise ConfigError("config error at 'space.kind': the mixed mode squares a dyadic space")
        _, prod = product_space((space, basis), (space, basis))
        gamma2 = tuple(float(ex._signed(g)) for g in e["gamma2"])
        return ex.check_mixed(op, ex.MixedParams(params, gamma2), basis, basis, prod, trials=trials,
                              dual_samples=run.get("dual_samples", 8), **common)


def cmd_extrapolate(args) -> int:
    cfg = load_config(args.config)
    report = run_extrapolate(cfg)
    out = cfg.get("output", {})
    json_path = args.json or out.get("json")
    csv_path = args.csv or out.get("csv")
    payload = {"version": __version__, "config": cfg, "report": report.as_dict(with_trials=True)}
    if json_path:
        write_json(json_path, payload)
    if csv_path:
        write_csv(csv_path, report.csv_rows())
    _emit({"label": report.label, "verdict": report.verdict, "chain_ok": report.chain_ok,
           "implication_ok": report.implication_ok, "trials": len(report.trials),
           "failed_checks": report.failed_checks(), "json": json_path, "csv": csv_path})
    return EXIT_OK if report.verdict == "pass" else EXIT_FAIL


def _factors(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"config error at 'factors': cannot parse {text!r}") from exc


def _matrix(text: str) -> list:
    try:
        return [[int(x) for x in row.split(",")] for row in text.split(";")]
    except ValueError as exc:
        raise ConfigError(f"config error at 'phi': cannot parse {text!r}") from exc


def cmd_transfer(args) -> int:
    from .transfer import FiniteAbelianGroup, GroupHom, dual_hom, transference_check

    H, G = FiniteAbelianGroup(_factors(args.H)), FiniteAbelianGroup(_factors(args.G))
    phi = GroupHom(H, G, _matrix(args.phi))
    w = load_array(args.w) if args.w else np.ones(H.size)
    m = load_array(args.m, complex_ok=True)
    if w.size != H.size:
        raise ConfigError(f"config error at 'w': expected {H.size} values for the group {H.factors}")
    if m.size != G.size:
        raise ConfigError(f"config error at 'm': expected {G.size} values for the group {G.factors}")
    rep = transference_check(phi, w, args.p, m, _budget(args))
    _emit({"phi": phi.as_dict(), "dual": dual_hom(phi).as_dict(), **rep.as_dict()})
    return EXIT_OK if rep.verdict == "consistent" else EXIT_FAIL


def cmd_trace(args) -> int:
    from .trace import format_table, missing_tests, trace

    report = read_json(args.report) if args.report else None
    rows = trace(report, args.junit)
    if args.json:
        _emit([r.as_dict() for r in rows])
    else:
        print(format_table(rows))
    return EXIT_OK if not missing_tests(rows) else EXIT_FAIL


def cmd_suite(args) -> int:
    from .suite import run_suite

    only = {int(x) for x in args.only.split(",")} if args.only else None
    payload, results = run_suite(args.seed, only)
    for r in results:
        print(r.line(), file=sys.stderr)
    if args.output:
        write_json(args.output, payload)
    else:
        _emit(payload)
    if args.timings:
        write_json(args.timings, {str(r.number): {"seconds": r.seconds, "limit": r.limit} for r in results})
    ok = all(r.passed and r.within_time for r in results)
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ---------------------------------------------------------------------

def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weightlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    space = sub.add_parser("space", help="measure spaces and bases")
    space_sub = space.add_subparsers(dest="action", required=True)
    sv = space_sub.add_parser("validate", help="check cover, pair containment and measures")
    sv.add_argument("file")
    sv.set_defaults(func=cmd_space_validate)

    exps = sub.add_parser("exponents", help="exponent arithmetic")
    exps_sub = exps.add_subparsers(dest="action", required=True)
    solve = exps_sub.add_parser("solve", help="complete a tuple from the consistency relations")
    for name in NAMES:
        solve.add_argument(f"--{name}", default=None)
    solve.add_argument("--gamma", default=None, help="signed reciprocal 1/gamma, e.g. -1/2")
    solve.set_defaults(func=cmd_exponents_solve)

    char = sub.add_parser("char", help="two-weight characteristic")
    char.add_argument("--space", required=True)
    char.add_argument("--w", required=True)
    char.add_argument("--v")
    char.add_argument("--s", required=True)
    char.add_argument("--r", required=True)
    char.set_defaults(func=cmd_char)

    maxop = sub.add_parser("maxop", help="weighted operator norm of the maximal operator")
    maxop.add_argument("--space", required=True)
    maxop.add_argument("--w", required=True)
    maxop.add_argument("--v")
    maxop.add_argument("--p", required=True)
    _add_budget(maxop)
    maxop.set_defaults(func=cmd_maxop)

    rdf = sub.add_parser("rdf", help="factor weights from the fixed-point majorant")
    rdf.add_argument("--space", required=True)
    rdf.add_argument("--params", required=True, help="JSON with p0, s0, r0, u0 and gamma (signed 1/gamma)")
    rdf.add_argument("--w", required=True)
    rdf.add_argument("--v")
    rdf.add_argument("--f", required=True)
    rdf.add_argument("--h", required=True)
    rdf.add_argument("--kappa", type=float, default=2.0)
    _add_budget(rdf)
    rdf.set_defaults(func=cmd_rdf)

    extr = sub.add_parser("extrapolate", help="replay the extrapolation argument from a TOML config")
    extr.add_argument("--config", required=True)
    extr.add_argument("--json", help="report path (overrides output.json)")
    extr.add_argument("--csv", help="trial table path (overrides output.csv)")
    extr.set_defaults(func=cmd_extrapolate)

    tr = sub.add_parser("transfer", help="weighted transference along a group homomorphism")
    tr.add_argument("--H", required=True, help="moduli of H, comma separated")
    tr.add_argument("--G", required=True, help="moduli of G, comma separated")
    tr.add_argument("--phi", required=True, help="matrix rows separated by ';', entries by ','")
    tr.add_argument("--p", default="2")
    tr.add_argument("--w", help="weight on H (JSON array); defaults to 1")
    tr.add_argument("--m", required=True, help="multiplier on the dual of G (JSON array)")
    _add_budget(tr)
    tr.set_defaults(func=cmd_transfer)

    trace = sub.add_parser("trace", help="statement-to-test matrix")
    trace.add_argument("--report", help="suite report JSON for criterion verdicts")
    trace.add_argument("--junit", help="pytest JUnit XML for test verdicts")
    trace.add_argument("--json", action="store_true")
    trace.set_defaults(func=cmd_trace)

    suite = sub.add_parser("suite", help="run the acceptance criteria")
    suite.add_argument("--seed", type=int, default=42)
    suite.add_argument("--output", help="write the deterministic payload here instead of stdout")
    suite.add_argument("--timings", help="write wall-clock times here")
    suite.add_argument("--only", help="comma-separated criterion numbers")
    suite.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
