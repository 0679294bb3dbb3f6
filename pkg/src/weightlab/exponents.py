"""Exponent arithmetic on reciprocals.

Every exponent ``p`` in ``(0, inf]`` is stored as ``1/p`` in ``[0, inf)``, so
``inf`` is exactly ``0`` and the affine relations between exponents need no
special cases.  The signed shift ``1/gamma`` is a plain float.

Besides parsing and duality this module solves the consistency relations
between base and target exponents, computes the rescaled parameters that
select the weight transform, describes the admissible exponent region and
evaluates the explicit extrapolation constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Iterable, Sequence

#: absolute tolerance for comparisons between reciprocals
TOL = 1e-12

NAMES = ("q0", "p0", "s0", "r0", "q", "p", "s", "r")


@dataclass(frozen=True)
class Exponent:
    """An exponent in ``(0, inf]`` held through its reciprocal."""

    recip: float

    def __post_init__(self):
        if not math.isfinite(self.recip) or self.recip < 0:
            raise ValueError(f"reciprocal must be finite and >= 0, got {self.recip!r}")

    @classmethod
    def parse(cls, text) -> "Exponent":
        return cls(as_recip(text))

    @classmethod
    def from_value(cls, p: float) -> "Exponent":
        return cls(as_recip(float(p)))

    @property
    def value(self) -> float:
        return math.inf if self.recip == 0 else 1.0 / self.recip

    @property
    def is_infinite(self) -> bool:
        return self.recip == 0.0

    def __str__(self) -> str:
        return format_exponent(self.recip)


def parse_recip(text: str) -> float:
    """Reciprocal of an exponent written as ``inf``, an integer, a decimal or ``a/b``."""
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "+inf", "oo"):
        return 0.0
    try:
        frac = Fraction(t)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse exponent {text!r}") from exc
    if frac <= 0:
        raise ValueError(f"exponent must be positive, got {text!r}")
    return float(1 / frac)


def as_recip(x) -> float:
    """Reciprocal of an exponent-like value (``Exponent``, text, or number)."""
    if isinstance(x, Exponent):
        return x.recip
    if isinstance(x, str):
        return parse_recip(x)
    if isinstance(x, Fraction):
        if x <= 0:
            raise ValueError("exponent must be positive")
        return float(1 / x)
    v = float(x)
    if math.isinf(v) and v > 0:
        return 0.0
    if not v > 0:
        raise ValueError(f"exponent must be positive, got {x!r}")
    return 1.0 / v


def format_exponent(recip: float | None) -> str | None:
    """Readable exponent, using a small fraction when one matches closely."""
    if recip is None:
        return None
    if recip == 0:
        return "inf"
    frac = Fraction(recip).limit_denominator(1000)
    if abs(float(frac) - recip) < 1e-12 and frac != 0:
        inv = 1 / frac
        return str(inv.numerator) if inv.denominator == 1 else f"{inv.numerator}/{inv.denominator}"
    return repr(1.0 / recip)


def dual(p) -> Exponent:
    """Hoelder conjugate ``p'`` with ``1/p + 1/p' = 1``; needs ``p >= 1``."""
    r = as_recip(p)
    if r > 1 + TOL:
        raise ValueError("the conjugate exponent needs p >= 1")
    return Exponent(max(0.0, 1.0 - r))


def dual_recip(r: float) -> float:
    return max(0.0, 1.0 - r)


# ---------------------------------------------------------------------------
# consistency relations


@dataclass(frozen=True)
class ExponentTuple:
    """Reciprocals of ``(q0, p0, s0, r0, q, p, s, r)`` and the shift ``1/gamma``.

    Entries are ``None`` when the supplied data does not determine them.
    """

    q0: float | None = None
    p0: float | None = None
    s0: float | None = None
    r0: float | None = None
    q: float | None = None
    p: float | None = None
    s: float | None = None
    r: float | None = None
    gamma: float | None = None

    def as_dict(self, readable: bool = False) -> dict:
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if readable and f.name != "gamma":
                out[f.name] = format_exponent(val)
            else:
                out[f.name] = val
        return out

    def residuals(self) -> list[float]:
        """Deviations from the four displayed equalities (determined pairs only)."""
        g = self.gamma
        out = []
        for base, target, sign in _PAIRS:
            b, t = getattr(self, base), getattr(self, target)
            if b is not None and t is not None and g is not None:
                out.append(abs(sign * (t - b) - g))
        return out


# (base name, target name, sign) with sign * (1/target - 1/base) = 1/gamma
_PAIRS = (("q0", "q", 1.0), ("p0", "p", 1.0), ("s0", "s", 1.0), ("r0", "r", -1.0))


class InconsistentExponents(ValueError):
    """Raised when exponent data contradicts the consistency relations."""


def solve_consistency(known: dict, gamma=None) -> ExponentTuple:
    """Complete a partial exponent assignment.

    ``known`` maps some of ``q0 p0 s0 r0 q p s r`` to exponent-like values;
    ``gamma`` optionally gives the signed reciprocal ``1/gamma`` directly.
    The relations are ``1/q - 1/q0 = 1/p - 1/p0 = 1/s - 1/s0 = 1/r0 - 1/r``.
    Pairs with neither member known stay ``None``.
    """
    unknown = set(known) - set(NAMES)
    if unknown:
        raise ValueError(f"unknown exponent names: {sorted(unknown)}")
    rec = {k: as_recip(v) for k, v in known.items() if v is not None}
    candidates = []
    if gamma is not None:
        candidates.append(("gamma", float(gamma)))
    for base, target, sign in _PAIRS:
        if base in rec and target in rec:
            candidates.append((f"{base}/{target}", sign * (rec[target] - rec[base])))
    if not candidates:
        raise InconsistentExponents("need 1/gamma or one complete (base, target) pair")
    g = candidates[0][1]
    for name, val in candidates[1:]:
        if abs(val - g) > TOL:
            raise InconsistentExponents(
                f"over-determined: shift from {name} is {val!r}, from {candidates[0][0]} is {g!r}"
            )
    out = {}
    for base, target, sign in _PAIRS:
        b, t = rec.get(base), rec.get(target)
        if b is None and t is not None:
            b = t - sign * g
        elif t is None and b is not None:
            t = b + sign * g
        for name, val in ((base, b), (target, t)):
            if val is not None and val < -TOL:
                raise InconsistentExponents(
                    f"solved 1/{name} = {val!r} < 0: the exponent leaves (0, inf]"
                )
        out[base] = None if b is None else max(b, 0.0)
        out[target] = None if t is None else max(t, 0.0)
    return ExponentTuple(gamma=g, **out)


# ---------------------------------------------------------------------------
# admissible region


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def contains(self, x: float, tol: float = TOL) -> bool:
        if self.lo_closed:
            ok_lo = x >= self.lo - tol
        else:
            ok_lo = x > self.lo + tol
        if self.hi_closed:
            ok_hi = x <= self.hi + tol
        else:
            ok_hi = x < self.hi - tol
        return ok_lo and ok_hi

    @property
    def empty(self) -> bool:
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}


def _intersect(pieces: Iterable[Interval]) -> Interval:
    lo, lo_c, hi, hi_c = -math.inf, False, math.inf, False
    for iv in pieces:
        if iv.lo > lo + TOL:
            lo, lo_c = iv.lo, iv.lo_closed
        elif abs(iv.lo - lo) <= TOL:
            lo_c = lo_c and iv.lo_closed
        if iv.hi < hi - TOL:
            hi, hi_c = iv.hi, iv.hi_closed
        elif abs(iv.hi - hi) <= TOL:
            hi_c = hi_c and iv.hi_closed
    return Interval(lo, hi, lo_c, hi_c)


@dataclass(frozen=True)
class Region:
    """Necessary ranges for ``(1/q, 1/p, 1/s, 1/r)`` given base exponents."""

    q: Interval
    p: Interval
    s: Interval
    r: Interval

    def contains(self, q, p, s, r) -> bool:
        """Membership of target exponents given as exponent-like values."""
        return all(
            iv.contains(as_recip(x)) for iv, x in ((self.q, q), (self.p, p), (self.s, s), (self.r, r))
        )

    def contains_tuple(self, t: ExponentTuple) -> bool:
        return all(
            getattr(t, n) is not None and getattr(self, n).contains(getattr(t, n)) for n in ("q", "p", "s", "r")
        )

    def as_dict(self) -> dict:
        return {k: getattr(self, k).as_dict() for k in ("q", "p", "s", "r")}


def admissible_region(q0, p0, s0, r0) -> Region:
    """The four intersected ranges limiting reachable target exponents."""
    q0, p0, s0, r0 = (as_recip(x) for x in (q0, p0, s0, r0))
    inf = math.inf
    q = _intersect(
        [Interval(q0 - p0, inf, True, False), Interval(q0 - s0, inf, False, False), Interval(0.0, q0 + r0, True, False)]
    )
    p = _intersect(
        [Interval(p0 - q0, inf, True, False), Interval(p0 - s0, inf, False, False), Interval(0.0, p0 + r0, True, False)]
    )
    s = _intersect(
        [Interval(s0 - q0, inf, True, False), Interval(s0 - p0, inf, True, False), Interval(0.0, s0 + r0, False, False)]
    )
    r = _intersect(
        [Interval(0.0, q0 + r0, False, True), Interval(0.0, p0 + r0, False, True), Interval(0.0, s0 + r0, False, False)]
    )
    return Region(q, p, s, r)


# ---------------------------------------------------------------------------
# rescaled parameters

POSITIVE, ZERO, NEGATIVE = "positive", "zero", "negative"


@dataclass(frozen=True)
class RescaledParams:
    """Rescaled exponents and the weight transform they select.

    ``t0``, ``t``, ``alpha``, ``s`` and ``r`` are reciprocals.  In the
    positive case the transform is ``(w**alpha, v**alpha)``, in the negative
    case ``(v**-alpha, w**-alpha)``; the zero case carries no transform and the
    maximal operator is treated as bounded by convention.
    """

    t0: float
    t: float
    case_sign: str
    alpha: float
    gamma: float
    s0: float
    r0: float
    s: float
    r: float

    @property
    def transform(self) -> str:
        return {
            POSITIVE: "(w^alpha, v^alpha)",
            NEGATIVE: "(v^-alpha, w^-alpha)",
            ZERO: "none: maximal operator bounded by convention",
        }[self.case_sign]

    @property
    def weight_class(self) -> str:
        return "fixed pair" if self.case_sign == ZERO else "ratio class with (s0, r0)"

    @property
    def t_exceeds_one(self) -> bool:
        return self.t < 1.0 - TOL

    def transformed_weights(self, w, v):
        """``(w_t, v_t)`` as arrays; ``None`` in the zero case."""
        a = 1.0 / self.alpha if self.alpha > 0 else math.inf
        if self.case_sign == POSITIVE:
            return w**a, v**a
        if self.case_sign == NEGATIVE:
            return v ** (-a), w ** (-a)
        return None

    def recovered_sr(self) -> tuple[float, float]:
        """``(1/s, 1/r)`` recomputed from ``(t0, t, alpha)`` and the case."""
        if self.case_sign == POSITIVE:
            s = self.t * self.alpha
            return s, self.alpha - s
        if self.case_sign == NEGATIVE:
            r = self.t * self.alpha
            return self.alpha - r, r
        return self.s0, self.r0

    def as_dict(self) -> dict:
        return {
            "t0": format_exponent(self.t0),
            "t": format_exponent(self.t),
            "alpha": format_exponent(self.alpha),
            "case": self.case_sign,
            "transform": self.transform,
            "weight_class": self.weight_class,
        }


def _case(g: float) -> str:
    if abs(g) <= TOL:
        return ZERO
    return POSITIVE if g > 0 else NEGATIVE


def rescale_params(gamma_recip: float, s0, r0) -> RescaledParams:
    """Rescaled parameters for a signed shift ``1/gamma`` and base ``(s0, r0)``."""
    g = float(gamma_recip)
    s0r, r0r = as_recip(s0), as_recip(r0)
    s, r = s0r + g, r0r - g
    return _rescale_level(g, s0r, r0r, s, r, s0r + r0r)


def _rescale_level(g, s_prev, r_prev, s, r, alpha) -> RescaledParams:
    if s < -TOL or r < -TOL:
        raise InconsistentExponents(f"derived 1/s={s!r}, 1/r={r!r} leave (0, inf]")
    if alpha <= 0:
        raise InconsistentExponents("1/alpha = 1/s0 + 1/r0 must be positive")
    s, r = max(s, 0.0), max(r, 0.0)
    case = _case(g)
    if case == POSITIVE:
        t0, t = s_prev / alpha, s / alpha
    elif case == NEGATIVE:
        t0, t = r_prev / alpha, r / alpha
    else:
        t0, t = 1.0, 1.0
    return RescaledParams(t0, t, case, alpha, g, s_prev, r_prev, s, r)


def rescale_params_mixed(gamma_recips: Sequence[float], s0, r0) -> list[RescaledParams]:
    """Per-level rescaled parameters for the recursion ``1/s_i = 1/s_(i-1) + 1/gamma_i``.

    Level ``i`` acts on the coordinates ``i..l``; its transform is the tensor
    product of the per-coordinate transforms.
    """
    s_prev, r_prev = as_recip(s0), as_recip(r0)
    alpha = s_prev + r_prev
    out = []
    for g in gamma_recips:
        g = float(g)
        s, r = s_prev + g, r_prev - g
        out.append(_rescale_level(g, s_prev, r_prev, s, r, alpha))
        s_prev, r_prev = max(s, 0.0), max(r, 0.0)
    return out


# ---------------------------------------------------------------------------
# explicit constants


@dataclass(frozen=True)
class IndexInputs:
    """Per-index data entering the constants.

    ``t0``, ``t`` are reciprocals of the rescaled exponents, ``opnorm`` the
    operator norm (or the coefficient ``c(t)`` for the Buckley form) and
    ``char`` the target-level characteristic.
    """

    gamma: float
    t0: float
    t: float
    opnorm: float
    char: float

    @classmethod
    def from_params(cls, params: RescaledParams, opnorm: float, char: float) -> "IndexInputs":
        return cls(params.gamma, params.t0, params.t, opnorm, char)


@dataclass
class ConstantsReport:
    beta: float
    C_kappa: list
    kappa: float
    kappa_prime: float
    form: str = "operator-norm"
    b_ij: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "beta": self.beta,
            "C_kappa": list(self.C_kappa),
            "kappa": self.kappa,
            "kappa_prime": self.kappa_prime,
            "form": self.form,
            "b_ij": [list(row) for row in self.b_ij],
        }


def kappa_prime(kappa: float) -> float:
    if not kappa > 1:
        raise ValueError(f"kappa must exceed 1, got {kappa!r}")
    return kappa / (kappa - 1.0)


def _ratio_recip(num_recip: float, den_recip: float) -> float:
    """``x / y`` for exponents given by reciprocals: ``(1/y) / (1/x)``."""
    if num_recip == 0:
        if den_recip == 0:
            raise ValueError("ratio of two infinite exponents is undefined")
        return math.inf
    return den_recip / num_recip


def shift_exponent(idx: IndexInputs) -> float:
    """``t / |gamma|`` (zero for an unshifted index)."""
    if abs(idx.gamma) <= TOL:
        return 0.0
    if idx.t == 0:
        raise ValueError("t must be finite for a shifted index")
    return abs(idx.gamma) / idx.t


def extrapolation_constants(kappa: float, indices: Sequence[IndexInputs], form: str = "operator-norm") -> ConstantsReport:
    """``beta = sum_j t_j/|gamma_j|`` and the per-index constants ``C_kappa_j``.

    ``form="operator-norm"``: ``C = (kappa' opnorm)^(t/|gamma|) char^(t/t0)``.
    ``form="buckley"``: ``opnorm`` is read as ``c(t)`` and
    ``C = (kappa' c(t))^(t/|gamma|) char^(t'/t0')``; ``t = 1`` is rejected
    because ``c(1)`` has no value.
    """
    kp = kappa_prime(kappa)
    beta = 0.0
    consts = []
    for idx in indices:
        e = shift_exponent(idx)
        beta += e
        if abs(idx.gamma) <= TOL:
            consts.append(float(idx.char))
            continue
        if form == "operator-norm":
            char_exp = _ratio_recip(idx.t, idx.t0)
        elif form == "buckley":
            if abs(idx.t - 1.0) <= TOL:
                raise ValueError("c(1) is unspecified: the Buckley form needs t > 1")
            char_exp = _ratio_recip(dual_recip(idx.t), dual_recip(idx.t0))
        else:
            raise ValueError(f"unknown form {form!r}")
        consts.append(float((kp * idx.opnorm) ** e * idx.char**char_exp))
    return ConstantsReport(beta=beta, C_kappa=consts, kappa=float(kappa), kappa_prime=kp, form=form)


def mixed_constants(kappa: float, levels: Sequence[Sequence[IndexInputs]]) -> ConstantsReport:
    """Iterated constants over ``l`` levels (rows) and ``m`` indices (columns).

    ``b_ij = prod_{k<=i} t'_kj / t'_0kj`` and
    ``C_j = prod_i (kappa' c_ij)^(t_ij b_(i-1)j / |gamma_ij|) char_ij^(b_ij)``;
    unshifted levels contribute the factor ``b = 1``.
    """
    kp = kappa_prime(kappa)
    n_idx = len(levels[0])
    b_prev = [1.0] * n_idx
    b_rows = []
    consts = [1.0] * n_idx
    beta = 0.0
    for row in levels:
        b_row = []
        for j, idx in enumerate(row):
            if abs(idx.gamma) <= TOL:
                ratio = 1.0
            else:
                ratio = _ratio_recip(dual_recip(idx.t), dual_recip(idx.t0))
            b = b_prev[j] * ratio
            e = shift_exponent(idx)
            beta += e
            consts[j] *= (kp * idx.opnorm) ** (e * b_prev[j]) * idx.char**b
            b_row.append(b)
        b_rows.append(b_row)
        b_prev = b_row
    return ConstantsReport(beta=beta, C_kappa=consts, kappa=float(kappa), kappa_prime=kp, form="buckley-mixed", b_ij=b_rows)
