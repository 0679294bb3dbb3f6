import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import two_point_space
from weightlab.maximal import Budget, upper_bound
from weightlab.norms import lp_norm
from weightlab.rdf import (
    FactorExponents,
    NonConvergence,
    core_estimate,
    embed,
    factor_pair,
    iterate_properties,
    rdf_iterate,
    one_weight_bound,
    split_dual_function,
)
from weightlab.space import make_dyadic_space
from weightlab.weights import characteristic_recips

DYADIC = make_dyadic_space(3)
BUDGET = Budget(restarts=6, iterations=150, seed=3)
SHOWCASE = FactorExponents.from_recips(1.5, 1.0, 0.0, 1.5, -0.5)


def _positive(rng, n, spread=1.0):
    return np.exp(rng.uniform(-spread, spread, n))


def test_iterate_uniform_closed_form():
    _, basis = DYADIC
    one = np.ones(basis.n)
    # constants solve R = 1 + R / c with c = kappa' * opnorm = 3
    it = rdf_iterate(basis, one, one, 2, 2.0, one, 1.5)
    np.testing.assert_allclose(it.R, 1.5, rtol=1e-11)
    props = iterate_properties(basis, one, one, 2, 2.0, one, it.R, 1.5)
    assert props["i_R_geq_H"] and props["ii_maximal_bound"] and props["iii_norm_bound"]


def test_iterate_point_indicator():
    _, basis = two_point_space()
    one = np.ones(2)
    it = rdf_iterate(basis, one, one, 2, 2.0, np.array([1.0, 0.0]), 2.0)
    # with c = 4: a = 1 + a / 4 and b = (a + b) / 8
    np.testing.assert_allclose(it.R, [4 / 3, 4 / 21], rtol=1e-11)


def test_iterate_large_kappa(rng):
    _, basis = DYADIC
    w, v = _positive(rng, basis.n), _positive(rng, basis.n)
    H = rng.exponential(size=basis.n)
    op = upper_bound(w, v, 2, basis)
    it = rdf_iterate(basis, w, v, 2, 1e6, H, op)
    props = iterate_properties(basis, w, v, 2, 1e6, H, it.R, op)
    assert props["i_R_geq_H"] and props["ii_maximal_bound"] and props["iii_norm_bound"]


def test_iterate_diverges_for_small_opnorm():
    _, basis = DYADIC
    one = np.ones(basis.n)
    with pytest.raises(NonConvergence):
        rdf_iterate(basis, one, one, 2, 2.0, one, 0.25)


def test_iterate_rejects_zero_seed():
    _, basis = DYADIC
    with pytest.raises(ValueError):
        rdf_iterate(basis, np.ones(basis.n), np.ones(basis.n), 2, 2.0, np.zeros(basis.n), 1.0)


def test_showcase_factor_pair(rng):
    _, basis = DYADIC
    w = _positive(rng, basis.n, 2.0)
    f, h = rng.normal(size=basis.n), rng.normal(size=basis.n)
    res = factor_pair(basis, SHOWCASE, w, w, f, h, 2.0, BUDGET)
    assert res.ok, res.checks
    assert res.swapped
    assert res.char_bound_lhs <= res.char_bound_rhs * (1 + 1e-9)
    assert res.normprod_lhs <= res.normprod_rhs * (1 + 1e-9)
    np.testing.assert_allclose(res.w0 / res.v0, 1.0, rtol=1e-10)


def test_negative_shift_equals_swapped_run(rng):
    _, basis = DYADIC
    ex = FactorExponents.from_recips(0.8, 0.3, 0.6, 0.9, -0.2)
    w, v = _positive(rng, basis.n), _positive(rng, basis.n)
    f, h = rng.normal(size=basis.n), rng.normal(size=basis.n)
    direct = factor_pair(basis, ex, w, v, f, h, 2.0, BUDGET)
    mirrored = factor_pair(basis, ex.swapped(), 1 / v, 1 / w, h, f, 2.0, BUDGET)
    assert direct.ok and mirrored.ok
    np.testing.assert_allclose(direct.w0, 1 / mirrored.v0, rtol=1e-12)
    np.testing.assert_allclose(direct.v0, 1 / mirrored.w0, rtol=1e-12)


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_random_instances_postconditions(seed):
    from weightlab.sampling import sample_function, sample_weight
    from weightlab.suite import sample_factor_exponents

    rng = np.random.default_rng(seed)
    _, basis = DYADIC
    ex = sample_factor_exponents(rng)
    w = sample_weight(rng, basis.n, "mixed")
    v = w.copy() if rng.random() < 0.5 else sample_weight(rng, basis.n, "mixed")
    res = factor_pair(basis, ex, w, v, sample_function(rng, basis.n), sample_function(rng, basis.n), 2.0, BUDGET)
    assert res.ok, (ex, res.checks)


def test_zero_shift_returns_inputs(rng):
    _, basis = DYADIC
    ex = FactorExponents.from_recips(0.5, 0.5, 0.5, 0.5, 0.0)
    w, v = _positive(rng, basis.n), _positive(rng, basis.n)
    res = factor_pair(basis, ex, w, v, rng.normal(size=basis.n), rng.normal(size=basis.n), 2.0)
    np.testing.assert_array_equal(res.w0, w)
    np.testing.assert_array_equal(res.v0, v)
    assert res.ok and res.R is None


def test_one_weight_bound(rng):
    _, basis = DYADIC
    ex = FactorExponents.from_recips(0.6, 0.4, 0.4, 0.7, 0.2)
    w = _positive(rng, basis.n)
    res = factor_pair(basis, ex, w, w, rng.normal(size=basis.n), rng.normal(size=basis.n), 2.0, BUDGET)
    bound = one_weight_bound(basis, ex, w, 2.0, res.opnorm)
    assert res.ok
    assert res.char_bound_lhs <= bound * (1 + 1e-9)
    zero = FactorExponents.from_recips(0.6, 0.4, 0.4, 0.7, 0.0)
    assert one_weight_bound(basis, zero, w, 2.0, 1.0) == pytest.approx(characteristic_recips(w, w, 0.4, 0.4, basis))


def test_core_estimate_shared(rng):
    _, basis = DYADIC
    w, v = _positive(rng, basis.n), _positive(rng, basis.n)
    est = core_estimate(basis, SHOWCASE, w, v, BUDGET)
    f, h = rng.normal(size=basis.n), rng.normal(size=basis.n)
    shared = factor_pair(basis, SHOWCASE, w, v, f, h, 2.0, BUDGET, estimate=est)
    fresh = factor_pair(basis, SHOWCASE, w, v, f, h, 2.0, BUDGET)
    np.testing.assert_allclose(shared.w0, fresh.w0)
    assert core_estimate(basis, FactorExponents.from_recips(0.5, 0.5, 0.5, 0.5, 0.0), w, v) is None


def test_embed_membership(rng):
    _, basis = DYADIC
    w, v = _positive(rng, basis.n, 2.0), _positive(rng, basis.n, 2.0)
    f = rng.normal(size=basis.n)
    w0, v0, res = embed(basis, "2/3", 1, "inf", -0.5, w, v, f, budget=BUDGET)
    assert res.ok
    np.testing.assert_allclose((w0 / v0) / (w / v), 1.0, rtol=1e-10)
    assert np.isfinite(lp_norm(f * v0, basis.mass, 1.5))
    assert np.isfinite(characteristic_recips(w0, v0, 1.0, 0.0, basis))


def test_embed_two_level(rng):
    _, basis = DYADIC
    w, v = _positive(rng, basis.n), _positive(rng, basis.n)
    f = rng.normal(size=basis.n)
    w1, v1, first = embed(basis, 2, 2, 2, 0.25, w, v, f, budget=BUDGET)
    w2, v2, second = embed(basis, "4/3", "4/3", 4, 0.25, w1, v1, f, budget=BUDGET)
    assert first.ok and second.ok
    np.testing.assert_allclose((w2 / v2) / (w / v), 1.0, rtol=1e-9)


def test_split_dual_single_factor(rng):
    _, basis = DYADIC
    w1 = _positive(rng, basis.n)
    lam_recip, u_recip = 2.0, 0.3
    qd = u_recip / lam_recip
    h = rng.normal(size=basis.n)
    h = h / lp_norm(h * w1 ** (-1 / lam_recip), basis.mass, qd)
    (h1,) = split_dual_function(h, [w1], lam_recip, qd, [u_recip])
    assert lp_norm(h1 / w1, basis.mass, u_recip) == pytest.approx(1.0)
    np.testing.assert_allclose(h1 ** (1 / lam_recip), np.abs(h), rtol=1e-12)


def test_split_dual_two_factors(rng):
    _, basis = DYADIC
    w_list = [_positive(rng, basis.n), _positive(rng, basis.n)]
    lam_recip, u_recips = 3.0, [0.2, 0.5]
    qd = sum(u / lam_recip for u in u_recips)
    lam = 1 / lam_recip
    h = rng.normal(size=basis.n)
    h = h / lp_norm(h * (w_list[0] * w_list[1]) ** (-lam), basis.mass, qd)
    parts = split_dual_function(h, w_list, lam_recip, qd, u_recips)
    for part, wj, uj in zip(parts, w_list, u_recips):
        assert lp_norm(part / wj, basis.mass, uj) == pytest.approx(1.0)
    np.testing.assert_allclose(np.prod([p**lam for p in parts], axis=0), np.abs(h), rtol=1e-12)
    with pytest.raises(ValueError):
        split_dual_function(h, w_list, lam_recip, qd + 0.1, u_recips)
