import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weightlab.maximal import Budget
from weightlab.norms import lp_norm
from weightlab.transfer import (
    FiniteAbelianGroup,
    GroupHom,
    character,
    dft,
    dual_hom,
    duality_form,
    duality_form_spatial,
    homomorphism_duality_check,
    idft,
    multiplier_apply,
    multiplier_norm,
    pairing_identity_holds,
    transference_check,
    translation_invariance_check,
)

BUDGET = Budget(restarts=8, iterations=200, seed=2)
factor_lists = st.lists(st.integers(1, 6), min_size=1, max_size=3)


def _cplx(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _dft_matrix(group):
    """Row chi holds conj((x, chi)) evaluated in floating point."""
    xs = group.elements()
    phase = sum(np.outer(xs[:, k], xs[:, k]) / n for k, n in enumerate(group.factors))
    return np.exp(-2j * np.pi * phase)


def _norm_by_svd(group, m, w):
    F = _dft_matrix(group)
    T = np.linalg.inv(F) @ np.diag(m) @ F
    return np.linalg.svd(np.diag(w) @ T @ np.diag(1 / w), compute_uv=False)[0]


def _random_hom(rng, src, tgt):
    a = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for k, nk in enumerate(tgt):
        for l, nl in enumerate(src):
            step = nk // math.gcd(nk, nl)
            a[k, l] = step * rng.integers(0, nk)
    return GroupHom(FiniteAbelianGroup(src), FiniteAbelianGroup(tgt), a)


@given(factor_lists, st.integers(0, 2**32 - 1))
def test_dft_matches_definition(factors, seed):
    group = FiniteAbelianGroup(factors)
    f = _cplx(np.random.default_rng(seed), group.size)
    np.testing.assert_allclose(dft(group, f), _dft_matrix(group) @ f, atol=1e-9)
    np.testing.assert_allclose(idft(group, dft(group, f)), f, atol=1e-12)
    # Plancherel with the 1/|G| measure on the dual group
    assert np.sum(np.abs(dft(group, f)) ** 2) / group.size == pytest.approx(np.sum(np.abs(f) ** 2))


def test_character_is_exact_for_large_moduli():
    group = FiniteAbelianGroup((1000, 999))
    chi = character(group, (1, 1))
    np.testing.assert_allclose(np.abs(chi), 1.0)
    assert chi[group.index([[0, 0]])[0]] == 1.0
    np.testing.assert_allclose(dft(group, np.ones(group.size))[0], group.size)


def test_multiplier_is_convolution(rng):
    group = FiniteAbelianGroup((12,))
    m, f = _cplx(rng, 12), _cplx(rng, 12)
    kernel = idft(group, m)
    conv = np.array([sum(kernel[(x - y) % 12] * f[y] for y in range(12)) for x in range(12)])
    np.testing.assert_allclose(multiplier_apply(group, m, f), conv, atol=1e-12)


@given(factor_lists, st.integers(0, 2**32 - 1))
def test_l2_norm_matches_svd(factors, seed):
    group = FiniteAbelianGroup(factors)
    r = np.random.default_rng(seed)
    m, w = _cplx(r, group.size), np.exp(r.normal(size=group.size))
    est = multiplier_norm(group, m, 2, w)
    assert est.kind == "exact"
    assert est.value == pytest.approx(_norm_by_svd(group, m, w), rel=1e-10)
    assert multiplier_norm(group, m, 2, np.ones(group.size)).value == pytest.approx(np.abs(m).max(), rel=1e-10)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_general_p_bounds(p, rng):
    group = FiniteAbelianGroup((3, 4))
    m, w = _cplx(rng, 12), np.exp(rng.normal(size=12))
    est = multiplier_norm(group, m, p, w, BUDGET)
    assert est.kind == "lower_bound"
    assert est.value <= est.upper_bound * (1 + 1e-12)
    ones = np.ones(12)
    for _ in range(50):
        f = _cplx(rng, 12)
        ratio = lp_norm(multiplier_apply(group, m, f) * w, ones, 1 / p) / lp_norm(f * w, ones, 1 / p)
        assert ratio <= est.value * (1 + 1e-9)
    # a constant multiplier is a scalar, so both bounds are exact
    const = multiplier_norm(group, np.full(12, 2.5), p, w, BUDGET)
    assert const.value == pytest.approx(2.5) and const.upper_bound == pytest.approx(2.5)
    with pytest.raises(ValueError):
        multiplier_norm(group, m, 1, w)


@given(factor_lists, st.integers(0, 2**32 - 1))
def test_duality_form_two_orders(factors, seed):
    group = FiniteAbelianGroup(factors)
    r = np.random.default_rng(seed)
    m, f, g = (_cplx(r, group.size) for _ in range(3))
    assert abs(duality_form(group, m, f, g) - duality_form_spatial(group, m, f, g)) <= 1e-9 * group.size


def test_duality_form_delta(rng):
    group = FiniteAbelianGroup((2, 5))
    m = _cplx(rng, 10)
    delta = np.zeros(10)
    delta[0] = 1.0
    # both transforms of delta_0 are identically 1
    assert duality_form(group, m, delta, delta) == pytest.approx(m.sum() / 10)
    assert duality_form_spatial(group, m, delta, delta) == pytest.approx(m.sum() / 10)


def test_dual_hom_z2_z4():
    phi = GroupHom(FiniteAbelianGroup((2,)), FiniteAbelianGroup((4,)), [[2]])
    phi_hat = dual_hom(phi)
    assert phi_hat.matrix.tolist() == [[1]]
    assert phi_hat.apply(np.arange(4)[:, None]).ravel().tolist() == [0, 1, 0, 1]
    assert phi_hat.surjective() and not phi.surjective()
    assert pairing_identity_holds(phi)
    # all 8 pairs, compared in floating point
    for x in range(4):
        for chi in range(2):
            assert np.exp(2j * np.pi * (x % 2) * chi / 2) == pytest.approx(np.exp(2j * np.pi * x * (2 * chi) / 4))


def test_dual_hom_identity_and_zero():
    for factors in [(5,), (2, 6)]:
        group = FiniteAbelianGroup(factors)
        eye = GroupHom(group, group, np.eye(len(factors), dtype=int))
        assert np.array_equal(dual_hom(eye).matrix, np.eye(len(factors)))
        zero = GroupHom(group, group, np.zeros((len(factors),) * 2, dtype=int))
        assert not dual_hom(zero).matrix.any()
        assert pairing_identity_holds(eye) and pairing_identity_holds(zero)


def test_rejects_non_homomorphism():
    with pytest.raises(ValueError):
        GroupHom(FiniteAbelianGroup((2,)), FiniteAbelianGroup((4,)), [[1]])


@given(factor_lists, factor_lists, st.integers(0, 2**32 - 1))
def test_random_dual_pairing(src, tgt, seed):
    phi = _random_hom(np.random.default_rng(seed), tuple(src), tuple(tgt))
    phi_hat = dual_hom(phi)
    assert pairing_identity_holds(phi)
    # independent floating-point comparison of (phi_hat x, chi) and (x, phi chi)
    xs, chis = phi.target.elements(), phi.source.elements()
    left = np.exp(2j * np.pi * (phi_hat.apply(xs) / np.array(src)) @ chis.T)
    right = np.exp(2j * np.pi * (xs / np.array(tgt)) @ phi.apply(chis).T)
    np.testing.assert_allclose(left, right, atol=1e-9)


@given(factor_lists, factor_lists, st.integers(0, 2**32 - 1))
def test_homomorphism_duality_random(src, tgt, seed):
    r = np.random.default_rng(seed)
    phi = _random_hom(r, tuple(src), tuple(tgt))
    m, E = _cplx(r, phi.target.size), _cplx(r, phi.source.size)
    scale = np.abs(m).sum() * np.abs(E).sum()
    assert homomorphism_duality_check(phi, m, E) <= 1e-12 * max(scale, 1.0)


def test_homomorphism_duality_zero_hom(rng):
    H, G = FiniteAbelianGroup((6,)), FiniteAbelianGroup((4, 2))
    phi = GroupHom(H, G, np.zeros((2, 1), dtype=int))
    m, E = _cplx(rng, G.size), _cplx(rng, H.size)
    # both sides collapse to E(0) m(0)
    m_hat = dft(G, m) / G.size
    assert np.sum(E[0] * m_hat) == pytest.approx(E[0] * m[0])
    assert homomorphism_duality_check(phi, m, E) <= 1e-12 * np.abs(m).sum() * np.abs(E).sum()


@given(factor_lists, st.integers(0, 2**32 - 1))
def test_translation_invariance_random(factors, seed):
    group = FiniteAbelianGroup(factors)
    r = np.random.default_rng(seed)
    m, w = _cplx(r, group.size), np.exp(r.normal(size=group.size))
    assert translation_invariance_check(group, m, 2, w) <= 1e-9


def test_transference_z2_z4(rng):
    phi = GroupHom(FiniteAbelianGroup((2,)), FiniteAbelianGroup((4,)), [[2]])
    m = _cplx(rng, 4)
    report = transference_check(phi, np.ones(2), 2, m)
    assert report.lhs.value == pytest.approx(max(abs(m[0]), abs(m[2])))
    assert report.rhs.value == pytest.approx(np.abs(m).max())
    assert report.c == 1.0 and report.surjective
    assert report.verdict == "consistent"


@pytest.mark.parametrize("p", [2, 3])
def test_transference_identity(p, rng):
    group = FiniteAbelianGroup((3, 3))
    phi = GroupHom(group, group, np.eye(2, dtype=int))
    m, w = _cplx(rng, 9), np.exp(rng.normal(size=9))
    report = transference_check(phi, w, p, m, BUDGET)
    assert report.lhs.value == report.rhs.value
    assert report.lhs.upper_bound == report.rhs.upper_bound
    if p == 2:
        assert report.verdict == "consistent"
    else:
        assert report.verdict in ("consistent", "inconclusive")


def test_transference_z8_z4_svd(rng):
    H, G = FiniteAbelianGroup((8,)), FiniteAbelianGroup((4,))
    phi = GroupHom(H, G, [[1]])
    phi_hat = dual_hom(phi)
    assert phi_hat.matrix.tolist() == [[2]] and not phi_hat.surjective()
    m, w = _cplx(rng, 4), np.exp(rng.normal(size=8))
    report = transference_check(phi, w, 2, m)
    pulled = m[np.arange(8) % 4]
    assert report.lhs.value == pytest.approx(_norm_by_svd(H, pulled, w), rel=1e-10)
    image = (2 * np.arange(4)) % 8
    assert report.rhs.value == pytest.approx(_norm_by_svd(G, m, w[image]), rel=1e-10)
    shifted = max(_norm_by_svd(G, m, np.roll(w, u)[image]) for u in range(8))
    assert report.c == pytest.approx(shifted / report.rhs.value, rel=1e-9)
    assert report.verdict == "consistent"
    assert report.as_dict()["c_measured_over"] == 8
