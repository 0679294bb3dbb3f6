"""Finite measure spaces carrying a basis of sets.

A :class:`MeasureSpace` is a finite point set ``0..N-1`` with positive masses.
A :class:`SetBasis` is a family of nonempty subsets that covers the space and
contains, for every pair of points, a set holding both.  Constructors build
dyadic grids on ``[0, 1)``, interval bases on cyclic groups and products.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .kernels import CSR

#: exhaustive pair-containment scans are performed up to this many points
PAIR_CHECK_LIMIT = 2**12


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Finite atomic measure space with per-point masses."""

    mass: np.ndarray
    label: str = ""

    def __post_init__(self):
        mass = np.ascontiguousarray(self.mass, dtype=np.float64)
        if mass.ndim != 1 or mass.size < 1:
            raise ValueError("a measure space needs at least one point")
        if not np.all(np.isfinite(mass)) or np.any(mass <= 0):
            raise ValueError("masses must be positive and finite")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @property
    def n(self) -> int:
        return self.mass.size

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())


@dataclass(frozen=True, eq=False)
class SetBasis:
    """Family of index sets over a :class:`MeasureSpace`.

    ``sets`` holds sorted ``int64`` index arrays; ``measures`` is ``mu(U)``
    for every set and ``csr`` the compressed layout used by the kernels.
    """

    space: MeasureSpace
    sets: tuple
    csr: CSR = field(init=False, repr=False)
    measures: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        cleaned = []
        for s in self.sets:
            arr = np.unique(np.asarray(s, dtype=np.int64))
            if arr.size == 0:
                raise ValueError("basis sets must be nonempty")
            if arr[0] < 0 or arr[-1] >= self.space.n:
                raise ValueError("basis set index out of range")
            arr.setflags(write=False)
            cleaned.append(arr)
        object.__setattr__(self, "sets", tuple(cleaned))
        sizes = [len(s) for s in cleaned]
        indptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        indices = (np.concatenate(cleaned) if cleaned else np.zeros(0)).astype(np.int64)
        object.__setattr__(self, "csr", CSR(indptr, indices, self.space.n))
        measures = np.array([self.space.mass[s].sum() for s in cleaned], dtype=np.float64)
        measures.setflags(write=False)
        object.__setattr__(self, "measures", measures)

    def __len__(self) -> int:
        return len(self.sets)

    @property
    def mass(self) -> np.ndarray:
        return self.space.mass

    @property
    def n(self) -> int:
        return self.space.n

    def incidence(self) -> sp.csr_matrix:
        """Sparse ``(S, N)`` 0/1 matrix with a row per basis set."""
        data = np.ones(self.csr.indices.size, dtype=np.int8)
        return sp.csr_matrix((data, self.csr.indices, self.csr.indptr), shape=(len(self), self.n))


@dataclass(frozen=True, eq=False)
class GroupBasis:
    """Nested symmetric neighbourhoods of zero in a cyclic group.

    ``levels[k]`` is ``U_k`` as a sorted index array, ``theta`` the level map
    (``theta[k] == len(levels)`` means the whole group), and
    ``doubling_constant`` the smallest ``A`` with
    ``mu(x + U_theta(k)) <= A mu(x + U_k)`` for all points and levels.
    """

    base: SetBasis
    levels: tuple
    theta: tuple
    doubling_constant: float

    def level_set(self, k: int) -> np.ndarray:
        if k >= len(self.levels):
            return np.arange(self.base.n, dtype=np.int64)
        return self.levels[k]


@dataclass
class ValidationReport:
    cover: bool
    pair_containment: bool
    measures_ok: bool
    pair_checked_exhaustively: bool = True
    failing_pair: tuple | None = None
    uncovered: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.cover and self.pair_containment and self.measures_ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "cover": self.cover,
            "pair_containment": self.pair_containment,
            "measures_ok": self.measures_ok,
            "pair_checked_exhaustively": self.pair_checked_exhaustively,
            "failing_pair": list(self.failing_pair) if self.failing_pair else None,
            "uncovered": self.uncovered[:20],
        }


def make_dyadic_space(levels: int) -> tuple[MeasureSpace, SetBasis]:
    """Uniform grid of ``2**levels`` points modelling ``[0, 1)``.

    The basis holds every dyadic interval of every generation, the whole
    interval being generation zero, so pair containment holds.

    >>> space, basis = make_dyadic_space(2)
    >>> space.n, len(basis)
    (4, 7)
    """
    if not isinstance(levels, (int, np.integer)) or not 1 <= levels <= 16:
        raise ValueError(f"levels must be an integer in [1, 16], got {levels!r}")
    n = 2**levels
    space = MeasureSpace(np.full(n, 1.0 / n), label=f"dyadic({levels})")
    sets = []
    for gen in range(levels + 1):
        width = n >> gen
        for start in range(0, n, width):
            sets.append(np.arange(start, start + width))
    return space, SetBasis(space, tuple(sets))


def _interval(center: int, radius: int, n: int) -> np.ndarray:
    return np.unique((center + np.arange(-radius, radius + 1)) % n)


def make_cyclic_space(n: int) -> tuple[MeasureSpace, SetBasis, GroupBasis]:
    """The group ``Z_n`` with unit masses and translated symmetric intervals.

    Level ``k`` is ``{-a_k, ..., a_k}`` with ``a_k = min(2**k, n // 2)``; the
    last level is the whole group.  The basis is the deduplicated family of
    all translates of all levels.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"cyclic space needs n >= 2, got {n!r}")
    space = MeasureSpace(np.ones(n), label=f"cyclic({n})")
    levels = []
    k = 0
    while True:
        radius = min(2**k, n // 2)
        levels.append(_interval(0, radius, n))
        if levels[-1].size == n:
            break
        k += 1
    seen = set()
    sets = []
    for lev in levels:
        for x in range(n):
            s = np.sort((lev + x) % n)
            key = s.tobytes()
            if key not in seen:
                seen.add(key)
                sets.append(s)
    basis = SetBasis(space, tuple(sets))
    theta = tuple(k + 1 for k in range(len(levels)))
    group = GroupBasis(basis, tuple(levels), theta, 1.0)
    _check_group_axioms(group, n)
    const = _doubling_constant(group, n)
    return space, basis, GroupBasis(basis, tuple(levels), theta, const)


def _check_group_axioms(group: GroupBasis, n: int) -> None:
    for k, lev in enumerate(group.levels):
        if not np.array_equal(np.sort((-lev) % n), lev):
            raise AssertionError(f"level {k} is not symmetric")
        if k + 1 < len(group.levels) and not np.all(np.isin(lev, group.levels[k + 1])):
            raise AssertionError(f"levels {k} and {k + 1} are not nested")
        sumset = np.unique((lev[:, None] + lev[None, :]) % n)
        if not np.all(np.isin(sumset, group.level_set(group.theta[k]))):
            raise AssertionError(f"2U_{k} is not contained in U_theta({k})")


def _doubling_constant(group: GroupBasis, n: int) -> float:
    # Unit masses and translation invariance make mu(x + U) = |U|; the scan
    # over x is kept so that the check stays exhaustive.
    worst = 1.0
    for k, lev in enumerate(group.levels):
        big = group.level_set(group.theta[k])
        for x in range(n):
            ratio = np.unique((big + x) % n).size / np.unique((lev + x) % n).size
            worst = max(worst, ratio)
    return float(worst)


def product_space(a: tuple, b: tuple) -> tuple[MeasureSpace, SetBasis]:
    """Cartesian product of two spaces with the basis of all products ``U' x U''``.

    Point ``(x1, x2)`` gets flat index ``x1 * N2 + x2``; reshaping a function
    to ``(N1, N2)`` puts the first factor on axis 0.
    """
    space_a, basis_a = a[0], a[1]
    space_b, basis_b = b[0], b[1]
    n2 = space_b.n
    mass = np.outer(space_a.mass, space_b.mass).ravel()
    label = f"{space_a.label} x {space_b.label}"
    space = MeasureSpace(mass, label=label)
    sets = []
    for ua in basis_a.sets:
        for ub in basis_b.sets:
            sets.append((ua[:, None] * n2 + ub[None, :]).ravel())
    return space, SetBasis(space, tuple(sets))


def validate_basis(space: MeasureSpace, basis: SetBasis) -> ValidationReport:
    """Check cover, pair containment and set measures without raising."""
    n = space.n
    if len(basis) == 0:
        return ValidationReport(False, False, True, True, (0, 0) if n else None, list(range(n)))
    measures_ok = bool(np.all(np.isfinite(basis.measures)) and np.all(basis.measures > 0))
    inc = basis.incidence().astype(np.int32)
    covered = np.asarray(inc.sum(axis=0)).ravel() > 0
    cover = bool(covered.all())
    uncovered = [int(x) for x in np.flatnonzero(~covered)]
    exhaustive = n <= PAIR_CHECK_LIMIT
    failing = None
    if exhaustive:
        inc_t = inc.T.tocsr()
        chunk = max(1, 2**22 // max(n, 1))
        for start in range(0, n, chunk):
            block = (inc_t[start : start + chunk] @ inc).toarray()
            bad = np.argwhere(block == 0)
            if bad.size:
                failing = (int(bad[0, 0] + start), int(bad[0, 1]))
                break
    pair_ok = failing is None and exhaustive
    return ValidationReport(cover, pair_ok, measures_ok, exhaustive, failing, uncovered)


def space_to_json(space: MeasureSpace, basis: SetBasis) -> str:
    return json.dumps({"masses": space.mass.tolist(), "basis": [s.tolist() for s in basis.sets]})


def space_from_dict(data: dict) -> tuple[MeasureSpace, SetBasis]:
    if "masses" not in data or "basis" not in data:
        raise ValueError("space JSON needs 'masses' and 'basis' keys")
    space = MeasureSpace(np.asarray(data["masses"], dtype=np.float64), label=data.get("label", "file"))
    return space, SetBasis(space, tuple(np.asarray(s, dtype=np.int64) for s in data["basis"]))

