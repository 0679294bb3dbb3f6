import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import two_point_space
from weightlab.maximal import Budget, buckley_ratio, maximal, norm_ratio, opnorm_maximal, upper_bound
from weightlab.space import make_cyclic_space, make_dyadic_space
from weightlab.weights import characteristic

DYADIC = make_dyadic_space(3)
seeds = st.integers(0, 2**32 - 1)
SMALL = Budget(restarts=6, iterations=150, seed=1)


def _weights(seed, n, spread=1.5):
    r = np.random.default_rng(seed)
    return np.exp(r.uniform(-spread, spread, n)), np.exp(r.uniform(-spread, spread, n))


def _loop_maximal(f, basis):
    out = np.zeros(basis.n)
    for u in basis.sets:
        avg = (np.abs(f[u]) * basis.mass[u]).sum() / basis.mass[u].sum()
        out[u] = np.maximum(out[u], avg)
    return out


def test_two_point_maximal():
    _, basis = two_point_space()
    np.testing.assert_allclose(maximal(np.array([1.0, 0.0]), basis), [1.0, 0.5])


def test_constant_function():
    for basis in (DYADIC[1], make_cyclic_space(10)[1]):
        np.testing.assert_allclose(maximal(np.full(basis.n, 3.5), basis), 3.5)


@given(seeds)
def test_matches_loop_definition(seed):
    _, basis = DYADIC
    f = np.random.default_rng(seed).normal(size=basis.n)
    np.testing.assert_allclose(maximal(f, basis), _loop_maximal(f, basis), rtol=1e-13)


@given(seeds, st.floats(-3, 3))
def test_sublinear(seed, c):
    _, basis = DYADIC
    r = np.random.default_rng(seed)
    f, g = r.normal(size=basis.n), r.normal(size=basis.n)
    assert np.all(maximal(f + g, basis) <= (maximal(f, basis) + maximal(g, basis)) * (1 + 1e-12))
    np.testing.assert_allclose(maximal(c * f, basis), abs(c) * maximal(f, basis), rtol=1e-12, atol=1e-300)


@given(seeds)
def test_positive_when_nonzero(seed):
    _, basis = DYADIC
    f = np.zeros(basis.n)
    f[np.random.default_rng(seed).integers(basis.n)] = 1.0
    assert np.all(maximal(f, basis) > 0)
    assert np.all(maximal(np.zeros(basis.n), basis) == 0)


@given(seeds)
def test_sup_norm_identities(seed):
    _, basis = DYADIC
    w, v = _weights(seed, basis.n)
    mirror = opnorm_maximal(basis, w, v, "inf")
    assert mirror.kind == "exact"
    assert mirror.value == pytest.approx(characteristic(w, v, "inf", 1, basis), rel=1e-12)
    dual_side = opnorm_maximal(basis, 1 / v, 1 / w, "inf")
    assert dual_side.value == pytest.approx(characteristic(w, v, 1, "inf", basis), rel=1e-12)
    # the witness attains the value
    ratio = np.max(maximal(mirror.witness, basis) * w) / np.max(mirror.witness * v)
    assert ratio == pytest.approx(mirror.value)


@given(seeds)
def test_p_one_is_exact(seed):
    _, basis = DYADIC
    w, v = _weights(seed, basis.n)
    est = opnorm_maximal(basis, w, v, 1)
    assert est.kind == "exact"
    assert norm_ratio(est.witness, w, v, 1, basis) == pytest.approx(est.value)
    f = np.abs(np.random.default_rng(seed).normal(size=(64, basis.n)))
    assert np.all(norm_ratio(f, w, v, 1, basis) <= est.value * (1 + 1e-12))


@pytest.mark.parametrize("p", [1.3, 2.0, 4.0])
def test_ascent_between_samples_and_upper_bound(p, rng):
    _, basis = DYADIC
    w, v = np.exp(rng.uniform(-1, 1, basis.n)), np.exp(rng.uniform(-1, 1, basis.n))
    est = opnorm_maximal(basis, w, v, p, SMALL)
    assert est.kind == "lower_bound"
    assert norm_ratio(est.witness, w, v, p, basis) == pytest.approx(est.value, rel=1e-9)
    samples = norm_ratio(np.abs(rng.normal(size=(256, basis.n))), w, v, p, basis)
    assert samples.max() <= est.value * (1 + 1e-9)
    assert est.value <= est.upper_bound * (1 + 1e-12)
    assert est.upper_bound == pytest.approx(upper_bound(w, v, p, basis))


def test_unweighted_norm_on_two_points():
    # with w = v = 1 and p = 2 the norm is the top of a smooth one-dimensional problem
    _, basis = two_point_space()
    est = opnorm_maximal(basis, np.ones(2), np.ones(2), 2, SMALL)
    grid = np.linspace(0, 1, 20001)
    f = np.stack([np.ones_like(grid), grid], axis=1)
    brute = norm_ratio(f, np.ones(2), np.ones(2), 2, basis).max()
    assert est.value == pytest.approx(brute, rel=1e-7)


def test_rejects_p_below_one():
    _, basis = DYADIC
    with pytest.raises(ValueError):
        opnorm_maximal(basis, np.ones(basis.n), np.ones(basis.n), 0.5)


def test_buckley_ratio_finite_on_groups(rng):
    _, basis, _ = make_cyclic_space(16)
    for _ in range(3):
        w = np.exp(rng.uniform(-1, 1, basis.n))
        ratio = buckley_ratio(basis, w, 2, SMALL)
        assert np.isfinite(ratio) and ratio > 0
    with pytest.raises(ValueError):
        buckley_ratio(basis, np.ones(basis.n), 1)
