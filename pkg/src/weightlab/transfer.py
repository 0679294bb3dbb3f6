"""Fourier multipliers on finite abelian groups and weighted transference.

Groups are ``Z_n1 x ... x Z_nd`` with counting measure; the dual group is
identified with the same product and carries the measure ``1/|G|``.  The
pairing is ``(x, chi) = exp(2 pi i sum_k x_k chi_k / n_k)``.  With these
conventions

    f^(chi) = sum_x f(x) conj((x, chi))           (unnormalized forward DFT)
    f(x)    = |G|^-1 sum_chi f^(chi) (x, chi)      (inverse carries 1/|G|)

and Plancherel reads ``||f||_2 = ||f^||_{L^2(dual, 1/|G|)}``.  Elements are
indexed mixed-radix, row-major.

Finite groups need no approximation arguments: ``delta_0`` is an exact
approximate identity and every multiplier is compactly supported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .exponents import as_recip, dual_recip
from .maximal import Budget, OpNormEstimate
from .norms import lp_norm
from .rng import make_rng


@dataclass(frozen=True)
class FiniteAbelianGroup:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(n) for n in self.factors))
        if not self.factors or any(n < 1 for n in self.factors):
            raise ValueError("moduli must be positive integers")

    @property
    def size(self) -> int:
        return int(np.prod(self.factors))

    @property
    def shape(self) -> tuple:
        return self.factors

    def elements(self) -> np.ndarray:
        """Residue tuples of all elements, shape ``(|G|, d)``, row-major order."""
        grids = np.meshgrid(*[np.arange(n) for n in self.factors], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def index(self, elems) -> np.ndarray:
        elems = np.asarray(elems) % np.array(self.factors)
        return np.ravel_multi_index(tuple(elems.T), self.factors)

    def negation(self) -> np.ndarray:
        """Index of ``-x`` for every ``x``."""
        return self.index(-self.elements())

    def translate(self, f, z) -> np.ndarray:
        """``(tau_z f)(x) = f(x - z)``."""
        return np.asarray(f)[self.index(self.elements() - np.asarray(z))]


def dft(group: FiniteAbelianGroup, f) -> np.ndarray:
    f = np.asarray(f)
    if f.shape[-1] != group.size:
        raise ValueError(f"expected {group.size} values, got {f.shape[-1]}")
    lead = f.shape[:-1]
    axes = tuple(range(len(lead), len(lead) + len(group.shape)))
    return np.fft.fftn(f.reshape(lead + group.shape), axes=axes).reshape(lead + (group.size,))


def idft(group: FiniteAbelianGroup, fhat) -> np.ndarray:
    fhat = np.asarray(fhat)
    if fhat.shape[-1] != group.size:
        raise ValueError(f"expected {group.size} values, got {fhat.shape[-1]}")
    lead = fhat.shape[:-1]
    axes = tuple(range(len(lead), len(lead) + len(group.shape)))
    return np.fft.ifftn(fhat.reshape(lead + group.shape), axes=axes).reshape(lead + (group.size,))


def character(group: FiniteAbelianGroup, chi) -> np.ndarray:
    """``x -> (x, chi)`` with the phase accumulated as an exact integer."""
    lcm = reduce(math.lcm, group.factors, 1)
    weights = np.array([lcm // n for n in group.factors], dtype=np.int64)
    phase = (group.elements() * np.asarray(chi, dtype=np.int64) * weights).sum(axis=1) % lcm
    return np.exp(2j * np.pi * phase / lcm)


def multiplier_apply(group: FiniteAbelianGroup, m, f) -> np.ndarray:
    """``T_m f = F^-1(m f^)``."""
    m = np.asarray(m)
    if m.shape[-1] != group.size:
        raise ValueError("multiplier size does not match the group")
    return idft(group, m * dft(group, f))


def multiplier_matrix(group: FiniteAbelianGroup, m) -> np.ndarray:
    """Dense matrix of ``T_m`` (columns are images of point masses)."""
    return multiplier_apply(group, m, np.eye(group.size)).T


def _weighted_matrix(group, m, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    return w[:, None] * multiplier_matrix(group, m) / w[None, :]


def _riesz_thorin(A: np.ndarray, pr: float) -> float:
    """Certified ``||A||_{p->p} <= ||A||_1^(1/p) ||A||_inf^(1/p')`` on counting measure."""
    col = np.abs(A).sum(axis=0).max()
    row = np.abs(A).sum(axis=1).max()
    return float(col**pr * row ** (1.0 - pr))


def _power_ascent(A: np.ndarray, pr: float, budget: Budget) -> tuple[float, np.ndarray]:
    """Boyd-type iteration for ``max ||A x||_p / ||x||_p`` over complex ``x``."""
    n = A.shape[0]
    p = 1.0 / pr
    pd = 1.0 / dual_recip(pr)
    ones = np.ones(n)
    rng = make_rng(budget.seed, "multiplier-norm")
    best, best_x = 0.0, np.eye(n)[0].astype(complex)
    starts = [np.eye(n)[k % n].astype(complex) for k in range(min(n, budget.restarts // 2))]
    while len(starts) < budget.restarts:
        starts.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    for x in starts:
        x = x / lp_norm(x, ones, pr)
        prev = 0.0
        for _ in range(budget.iterations):
            y = A @ x
            ratio = float(lp_norm(y, ones, pr))
            if ratio > best:
                best, best_x = ratio, x.copy()
            if ratio <= prev * (1 + budget.tol):
                break
            prev = ratio
            z = A.conj().T @ (np.abs(y) ** (p - 1) * np.exp(1j * np.angle(y)))
            x = np.abs(z) ** (pd - 1) * np.exp(1j * np.angle(z))
            norm = lp_norm(x, ones, pr)
            if norm == 0:
                break
            x = x / norm
    return best, best_x


def multiplier_norm(group: FiniteAbelianGroup, m, p, w, budget: Budget | None = None,
                    duality_samples: int = 64) -> OpNormEstimate:
    """``||T_m||`` on ``L^p_w``: exact (largest singular value) at ``p = 2``.

    For other ``p`` the value is a lower bound from an ascent and from the
    sampled duality form; ``upper_bound`` is the Riesz-Thorin bound of the
    conjugated matrix.  The witness is a function ``f`` (not ``f w``).
    """
    pr = as_recip(p)
    if not 0 < pr < 1:
        raise ValueError("multiplier norms are computed for 1 < p < inf")
    w = np.asarray(w, dtype=np.float64)
    A = _weighted_matrix(group, m, w)
    if abs(pr - 0.5) <= 1e-15:
        u, sv, vh = np.linalg.svd(A)
        witness = vh[0].conj() / w
        return OpNormEstimate(float(sv[0]), "exact", witness, "largest singular value", float(sv[0]))
    budget = budget or Budget()
    value, x = _power_ascent(A, pr, budget)
    witness = x / w
    method = "power ascent"
    rng = make_rng(budget.seed, "duality-samples")
    ones = np.ones(group.size)
    neg = group.negation()
    pdr = dual_recip(pr)
    for _ in range(duality_samples):
        f = rng.standard_normal(group.size) + 1j * rng.standard_normal(group.size)
        g = rng.standard_normal(group.size) + 1j * rng.standard_normal(group.size)
        val = abs(duality_form(group, m, f, g))
        den = lp_norm(f * w, ones, pr) * lp_norm(g[neg] / w, ones, pdr)
        if den > 0 and val / den > value:
            value, witness, method = float(val / den), f, "duality form"
    return OpNormEstimate(float(value), "lower_bound", witness, method, _riesz_thorin(A, pr))


def duality_form(group: FiniteAbelianGroup, m, f, g) -> complex:
    """``|G|^-1 sum_chi m(chi) f^(chi) g^(chi)``."""
    return complex(np.sum(np.asarray(m) * dft(group, f) * dft(group, g)) / group.size)


def duality_form_spatial(group: FiniteAbelianGroup, m, f, g) -> complex:
    """``sum_x T_m f(x) g(-x)``, equal to :func:`duality_form`."""
    return complex(np.sum(multiplier_apply(group, m, f) * np.asarray(g)[group.negation()]))


@dataclass(frozen=True)
class GroupHom:
    """``Phi(chi)_k = sum_l a_kl chi_l mod n_k`` from ``source`` to ``target``."""

    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=np.int64).reshape(len(self.target.factors), len(self.source.factors))
        object.__setattr__(self, "matrix", a)
        for k, nk in enumerate(self.target.factors):
            for l, nl in enumerate(self.source.factors):
                if (a[k, l] * nl) % nk:
                    raise ValueError(f"not a homomorphism: a[{k},{l}] * {nl} is not divisible by {nk}")

    def apply(self, elems) -> np.ndarray:
        elems = np.atleast_2d(np.asarray(elems, dtype=np.int64))
        return (elems @ self.matrix.T) % np.array(self.target.factors)

    def image_indices(self) -> np.ndarray:
        """Target index of the image of every source element."""
        return self.target.index(self.apply(self.source.elements()))

    def surjective(self) -> bool:
        return np.unique(self.image_indices()).size == self.target.size

    def as_dict(self) -> dict:
        return {"source": list(self.source.factors), "target": list(self.target.factors),
                "matrix": self.matrix.tolist()}


def dual_hom(phi: GroupHom) -> GroupHom:
    """``Phi^`` with ``(Phi^(x), chi) = (x, Phi(chi))``: ``b_lk = a_kl n_l / n_k``."""
    a = phi.matrix
    b = np.zeros((len(phi.source.factors), len(phi.target.factors)), dtype=np.int64)
    for k, nk in enumerate(phi.target.factors):
        for l, nl in enumerate(phi.source.factors):
            b[l, k] = a[k, l] * nl // nk
    return GroupHom(phi.target, phi.source, b)


def pairing_phases(group: FiniteAbelianGroup, x, chi) -> np.ndarray:
    """Exact phases ``sum_k x_k chi_k lcm/n_k mod lcm`` for all pairs (rows of x by rows of chi)."""
    lcm = reduce(math.lcm, group.factors, 1)
    weights = np.array([lcm // n for n in group.factors], dtype=np.int64)
    return ((np.asarray(x) * weights) @ np.asarray(chi).T) % lcm, lcm


def pairing_identity_holds(phi: GroupHom, phi_hat: GroupHom | None = None) -> bool:
    """Exhaustive check of ``(Phi^(x), chi) = (x, Phi(chi))`` with integer phases."""
    phi_hat = phi_hat or dual_hom(phi)
    H_dual, G = phi.source, phi.target
    xs = G.elements()
    chis = H_dual.elements()
    left, l1 = pairing_phases(H_dual, phi_hat.apply(xs), chis)
    right, l2 = pairing_phases(G, xs, phi.apply(chis))
    lcm = math.lcm(l1, l2)
    return bool(np.array_equal(left * (lcm // l1) % lcm, right * (lcm // l2) % lcm))


def homomorphism_duality_check(phi: GroupHom, m, E) -> float:
    """``|sum_x E(Phi^ x) m^(x) - |H|^-1 sum_chi m(Phi chi) E^(chi)|``.

    ``m`` lives on the dual of ``G`` (``phi.target``), ``E`` on ``H``
    (identified with ``phi.source``); ``m^(x) = |G|^-1 sum_chi m(chi) conj((x, chi))``.
    """
    G, H = phi.target, phi.source
    phi_hat = dual_hom(phi)
    m = np.asarray(m, dtype=np.complex128)
    E = np.asarray(E, dtype=np.complex128)
    m_hat = dft(G, m) / G.size
    lhs = np.sum(E[phi_hat.image_indices()] * m_hat)
    rhs = np.sum(m[phi.image_indices()] * dft(H, E)) / H.size
    return float(abs(lhs - rhs))


def translation_invariance_check(group: FiniteAbelianGroup, m, p, w, shifts: Sequence | None = None,
                                 budget: Budget | None = None) -> float:
    """Largest relative deviation of ``||m||_{M_{p, tau_z w}}`` over the shifts (all by default)."""
    shifts = group.elements() if shifts is None else np.atleast_2d(shifts)
    norms = [multiplier_norm(group, m, p, group.translate(w, z), budget).value for z in shifts]
    ref = norms[0]
    return float(max(abs(v - ref) for v in norms) / ref) if ref > 0 else 0.0


@dataclass
class TransferReport:
    lhs: OpNormEstimate
    rhs: OpNormEstimate
    c: float
    surjective: bool
    p: float
    verdict: str
    explanation: str
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs.as_dict(with_witness=False), "rhs": self.rhs.as_dict(with_witness=False),
            "c": self.c, "surjective": self.surjective, "p": self.p, "verdict": self.verdict,
            "explanation": self.explanation, **self.detail,
        }


def transference_check(phi: GroupHom, w_on_H, p, m, budget: Budget | None = None, slack: float = 1e-9) -> TransferReport:
    """Compare ``||m o Phi||_{M_{p,w}(H^)}`` with ``c ||m||_{M_{p, w o Phi^}(G^)}``.

    ``phi`` maps the dual of ``H`` to the dual of ``G``.  ``c = 1`` when
    ``Phi^`` is onto; otherwise ``c`` is measured for this multiplier as the
    largest ratio ``||m||_{M_{p, (tau_u w) o Phi^}} / ||m||_{M_{p, w o Phi^}}``
    over ``u`` in ``H``.

    Verdicts: ``consistent`` when a certified upper bound of the left side is at
    most ``c`` times a lower bound of the right side (always decidable at
    ``p = 2``), ``violated`` when a lower bound of the left side exceeds ``c``
    times a certified upper bound of the right side, else ``inconclusive``.
    """
    G, H = phi.target, phi.source
    phi_hat = dual_hom(phi)
    w = np.asarray(w_on_H, dtype=np.float64)
    m = np.asarray(m, dtype=np.complex128)
    pull = phi_hat.image_indices()
    lhs = multiplier_norm(H, m[phi.image_indices()], p, w, budget)
    rhs = multiplier_norm(G, m, p, w[pull], budget)
    surjective = phi_hat.surjective()
    detail = {}
    if surjective:
        c = 1.0
    else:
        ratios = []
        for u in H.elements():
            shifted = H.translate(w, u)[pull]
            ratios.append(multiplier_norm(G, m, p, shifted, budget).value / rhs.value if rhs.value > 0 else 1.0)
        c = float(max(ratios))
        detail["c_measured_over"] = H.size
    pr = as_recip(p)
    if lhs.upper_bound <= c * rhs.value * (1 + slack):
        verdict = "consistent"
    elif lhs.value > c * rhs.upper_bound * (1 + slack):
        verdict = "violated"
    else:
        verdict = "inconclusive"
    explanation = (
        "exact norms (largest singular values)" if abs(pr - 0.5) <= 1e-15
        else "lower bounds from ascent and duality samples against Riesz-Thorin upper bounds"
    )
    return TransferReport(lhs, rhs, c, surjective, 1.0 / pr, verdict, explanation, detail)
