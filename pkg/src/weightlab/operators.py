"""Operators fed to the extrapolation harness, and empirical base-level envelopes.

An :class:`Operator` maps ``m`` functions ``S_j f_j`` to ``T f``.  When its
base-level bound is known in closed form (pointwise products and the
identity at diagonal exponents with one-weight pairs, where Hoelder gives
``phi = 1``), ``exact_phi`` is set.  Otherwise the harness uses an
:class:`Envelope`: the running maximum of measured base ratios indexed by the
characteristic vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .norms import lp_norm
from .space import SetBasis
from .weights import characteristic_recips


@dataclass(frozen=True)
class Operator:
    name: str
    arity: int
    apply: Callable[[Sequence[np.ndarray]], np.ndarray]
    exact_phi: bool = False
    nonnegative_inputs: bool = False
    description: str = ""

    def __call__(self, funcs: Sequence[np.ndarray]) -> np.ndarray:
        if len(funcs) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} functions, got {len(funcs)}")
        return self.apply(funcs)


def identity_operator() -> Operator:
    return Operator("identity", 1, lambda fs: np.asarray(fs[0], dtype=np.float64), exact_phi=True,
                    description="T f = f")


def product_operator(m: int = 2) -> Operator:
    """``T(f_1, ..., f_m) = prod_j f_j``; bounded with ``phi = 1`` at ``1/q0 = sum_j 1/p0j``."""
    if m < 1:
        raise ValueError("arity must be at least 1")
    return Operator(f"product{m}", m, lambda fs: np.prod(np.asarray(fs, dtype=np.float64), axis=0),
                    exact_phi=True, description="pointwise product")


def maximal_operator(basis: SetBasis) -> Operator:
    from .maximal import maximal

    return Operator("maximal", 1, lambda fs: maximal(fs[0], basis), description="basis maximal operator")


def multiplier_operator(factors: Sequence[int], multiplier) -> Operator:
    """``|T_m f|`` for a Fourier multiplier on ``Z_n1 x ... x Z_nd``."""
    from .transfer import FiniteAbelianGroup, multiplier_apply

    group = FiniteAbelianGroup(tuple(factors))
    m = np.asarray(multiplier, dtype=np.complex128)
    return Operator("multiplier", 1, lambda fs: np.abs(multiplier_apply(group, m, fs[0])),
                    description="Fourier multiplier on a finite abelian group")


@dataclass
class PairFamily:
    """Explicit pairs ``(f_vec, g)``: ``S_j`` picks ``f_j`` and ``T`` returns ``g``."""

    pairs: list
    label: str = "pairs"

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("a pair family needs at least one pair")
        n = len(self.pairs[0][1])
        arity = len(self.pairs[0][0])
        for fs, g in self.pairs:
            if len(fs) != arity or any(len(f) != n for f in fs) or len(g) != n:
                raise ValueError("all pairs must share arity and space size")

    @property
    def arity(self) -> int:
        return len(self.pairs[0][0])


def capped_maximal_pairs(basis: SetBasis, funcs: Sequence[np.ndarray]) -> PairFamily:
    """Pairs ``(f, min(M f, median(M f)))``: a dominated family built from ``M``."""
    from .maximal import maximal

    pairs = []
    for f in funcs:
        mf = maximal(f, basis)
        pairs.append(([np.abs(f)], np.minimum(mf, np.median(mf))))
    return PairFamily(pairs, "capped-maximal")


def builtin_operators(basis: SetBasis | None = None) -> dict[str, Operator]:
    """Catalog of ready-made operators.

    The maximal operator needs a basis and is included only when one is given.
    Multiplier operators and pair families are built with
    :func:`multiplier_operator` and :class:`PairFamily`.
    """
    catalog = {
        "identity": identity_operator(),
        "product1": product_operator(1),
        "product2": product_operator(2),
        "product3": product_operator(3),
    }
    if basis is not None:
        catalog["maximal"] = maximal_operator(basis)
    return catalog


@dataclass
class Envelope:
    """Monotone step envelope ``phi(c) = max{ratio_k : chars_k <= c}``.

    Lookups outside the sampled box, or below every sample, return ``None``
    rather than an extrapolated value.
    """

    chars: np.ndarray
    ratios: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.chars = np.atleast_2d(np.asarray(self.chars, dtype=np.float64))
        self.ratios = np.asarray(self.ratios, dtype=np.float64)
        if self.chars.shape[0] != self.ratios.size or self.ratios.size == 0:
            raise ValueError("an envelope needs matching, nonempty samples")

    @property
    def support(self) -> tuple[np.ndarray, np.ndarray]:
        return self.chars.min(axis=0), self.chars.max(axis=0)

    def __call__(self, c) -> float | None:
        c = np.atleast_1d(np.asarray(c, dtype=np.float64))
        if np.any(c > self.support[1]):
            return None
        below = np.all(self.chars <= c, axis=1)
        if not np.any(below):
            return None
        return float(self.ratios[below].max())

    def as_dict(self) -> dict:
        lo, hi = self.support
        return {"samples": int(self.ratios.size), "support_low": lo.tolist(), "support_high": hi.tolist(),
                "max_ratio": float(self.ratios.max()), **self.meta}


def fit_envelope(operator: "Operator | PairFamily", basis: SetBasis, q0: float, p0: Sequence[float],
                 s0: Sequence[float], r0: Sequence[float], rng: np.random.Generator, samples: int = 200,
                 funcs_per_weight: int = 4, distribution: str = "log-uniform") -> Envelope:
    """Measure ``||T f||_{q0, w0} / prod_j ||S_j f_j||_{p0j, v0j}`` on one-weight samples.

    All exponents are reciprocals.  The characteristic recorded for each
    sample is ``([w0j, v0j]_(s0j, r0j))_j``.  For an :class:`Operator` each
    weight is tried on ``funcs_per_weight`` random inputs; for a
    :class:`PairFamily` on every pair.
    """
    from .sampling import sample_function, sample_weight

    n, mass, m = basis.n, basis.mass, operator.arity

    def candidates():
        if isinstance(operator, PairFamily):
            yield from operator.pairs
            return
        for _ in range(funcs_per_weight):
            fs = [sample_function(rng, n, operator.nonnegative_inputs) for _ in range(m)]
            yield fs, operator(fs)

    chars, ratios = [], []
    for _ in range(samples):
        ws = [sample_weight(rng, n, distribution) for _ in range(m)]
        c = [characteristic_recips(w, w, s0[j], r0[j], basis) for j, w in enumerate(ws)]
        w0 = np.prod(ws, axis=0)
        best = 0.0
        for fs, g in candidates():
            den = np.prod([lp_norm(f * w, mass, p0[j]) for j, (f, w) in enumerate(zip(fs, ws))])
            if den > 0:
                best = max(best, float(lp_norm(g * w0, mass, q0) / den))
        chars.append(c)
        ratios.append(best)
    name = operator.label if isinstance(operator, PairFamily) else operator.name
    return Envelope(np.array(chars), np.array(ratios), {"operator": name, "distribution": distribution})
