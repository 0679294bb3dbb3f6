import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import two_point_space
from weightlab.space import make_dyadic_space, product_space
from weightlab.weights import (
    characteristic,
    characteristic_argmax,
    characteristic_p,
    characteristic_recips,
    classical_ap,
    fujii_wilson,
    reverse_holder,
    tensor_weight,
)

DYADIC = make_dyadic_space(3)
seeds = st.integers(0, 2**32 - 1)
recip = st.floats(0.0, 1.5)


def _weights(seed, n, spread=2.0):
    r = np.random.default_rng(seed)
    return np.exp(r.uniform(-spread, spread, n)), np.exp(r.uniform(-spread, spread, n))


def _set_norm(x, m, rec):
    top = x.max()
    if rec == 0:
        return top
    return top * (((x / top) ** (1 / rec)) * m).sum() ** rec


def _brute(w, v, s_recip, r_recip, basis):
    best = 0.0
    for u in basis.sets:
        m = basis.mass[u]
        mu = m.sum()
        ws, vs = _set_norm(w[u], m, s_recip), _set_norm(1 / v[u], m, r_recip)
        best = max(best, mu ** (-s_recip - r_recip) * ws * vs)
    return best


def test_unit_weights():
    _, basis = DYADIC
    one = np.ones(basis.n)
    for s, r in [(1, 1), (2, "inf"), ("inf", "inf"), ("3/2", 5)]:
        assert characteristic(one, one, s, r, basis) == pytest.approx(1.0)


def test_two_point_example():
    _, basis = two_point_space()
    w = np.array([1.0, 2.0])
    # avg(w) avg(1/w) over the pair is (3/2)(3/4); singletons give 1
    assert classical_ap(w, 2, basis) == pytest.approx(9 / 8)
    assert characteristic_p(np.sqrt(w), 2, basis) ** 2 == pytest.approx(9 / 8)
    value, arg = characteristic_argmax(np.sqrt(w), np.sqrt(w), 2, 2, basis)
    assert basis.sets[int(arg)].tolist() == [0, 1]


@given(seeds, recip, recip)
def test_characteristic_p_brute_force(seed, s_recip, r_recip):
    _, basis = DYADIC
    w, v = _weights(seed, basis.n)
    got = characteristic_recips(w, v, s_recip, r_recip, basis)
    assert got == pytest.approx(_brute(w, v, s_recip, r_recip, basis), rel=1e-12)
    p_recip = min(s_recip, 1.0)
    assert characteristic_p(w, 1 / p_recip if p_recip else "inf", basis) == pytest.approx(
        _brute(w, w, p_recip, 1 - p_recip, basis), rel=1e-12
    )


def test_batched_characteristic_matches_rows(rng):
    _, basis = DYADIC
    w = np.exp(rng.normal(size=(4, basis.n)))
    v = np.exp(rng.normal(size=(4, basis.n)))
    batch = characteristic(w, v, 2, 3, basis)
    assert batch.shape == (4,)
    np.testing.assert_allclose(batch, [characteristic(w[k], v[k], 2, 3, basis) for k in range(4)])


@given(seeds, recip, recip)
def test_symmetry_identity(seed, s_recip, r_recip):
    _, basis = DYADIC
    w, v = _weights(seed, basis.n)
    lhs = characteristic_recips(w, v, s_recip, r_recip, basis)
    rhs = characteristic_recips(1 / v, 1 / w, r_recip, s_recip, basis)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@given(seeds, recip, recip, st.floats(0.1, 5.0))
def test_rescaling_identity(seed, s_recip, r_recip, a):
    _, basis = DYADIC
    w, v = _weights(seed, basis.n)
    lhs = characteristic_recips(w**a, v**a, s_recip * a, r_recip * a, basis)
    assert lhs == pytest.approx(characteristic_recips(w, v, s_recip, r_recip, basis) ** a, rel=1e-10)


@given(seeds, recip, recip, recip, recip)
def test_holder_product(seed, s1, r1, s2, r2):
    _, basis = DYADIC
    w1, v1 = _weights(seed, basis.n)
    w2, v2 = _weights(seed + 1, basis.n)
    lhs = characteristic_recips(w1 * w2, v1 * v2, s1 + s2, r1 + r2, basis)
    rhs = characteristic_recips(w1, v1, s1, r1, basis) * characteristic_recips(w2, v2, s2, r2, basis)
    assert lhs <= rhs * (1 + 1e-12)


@given(seeds, recip, recip, st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_monotonicity(seed, s_recip, r_recip, ds, dr):
    # larger exponents (smaller reciprocals) give a larger characteristic
    _, basis = DYADIC
    w, v = _weights(seed, basis.n)
    small = characteristic_recips(w, v, s_recip + ds, r_recip + dr, basis)
    large = characteristic_recips(w, v, s_recip, r_recip, basis)
    assert small <= large * (1 + 1e-12)


@given(seeds, recip, recip, recip, recip, st.floats(0.0, 1.0))
def test_interpolation(seed, s0, r0, s1, r1, theta):
    _, basis = DYADIC
    w0, v0 = _weights(seed, basis.n)
    w1, v1 = _weights(seed + 7, basis.n)
    wt = w0 ** (1 - theta) * w1**theta
    vt = v0 ** (1 - theta) * v1**theta
    lhs = characteristic_recips(wt, vt, (1 - theta) * s0 + theta * s1, (1 - theta) * r0 + theta * r1, basis)
    rhs = (characteristic_recips(w0, v0, s0, r0, basis) ** (1 - theta)
           * characteristic_recips(w1, v1, s1, r1, basis) ** theta)
    assert lhs <= rhs * (1 + 1e-10)


@given(seeds, st.floats(1.1, 6.0))
def test_classical_ap_relation(seed, p):
    _, basis = DYADIC
    w, _ = _weights(seed, basis.n)
    assert classical_ap(w**p, p, basis) == pytest.approx(characteristic_p(w, p, basis) ** p, rel=1e-10)


def test_classical_ap_range():
    _, basis = DYADIC
    with pytest.raises(ValueError):
        classical_ap(np.ones(basis.n), 1, basis)


@given(seeds, st.floats(1.0, 8.0))
def test_reverse_holder_definition(seed, s):
    _, basis = DYADIC
    w, _ = _weights(seed, basis.n)
    assert reverse_holder(w, s, basis) == pytest.approx(_brute(w, 1 / w, 1 / s, 1.0, basis), rel=1e-12)
    assert reverse_holder(w, s, basis) == pytest.approx(characteristic(w, 1 / w, s, 1, basis))


@given(seeds, st.floats(1.0, 8.0), st.floats(0.0, 4.0))
def test_reverse_holder_monotone(seed, s, ds):
    _, basis = DYADIC
    w, _ = _weights(seed, basis.n)
    assert reverse_holder(w, s, basis) <= reverse_holder(w, s + ds, basis) * (1 + 1e-12)


def test_fujii_wilson_examples():
    _, basis = two_point_space()
    # {1} gives 2, the pair gives (3/2 + 2)/2
    assert fujii_wilson(np.array([1.0, 2.0]), basis) == pytest.approx(2.0)
    _, dyadic = DYADIC
    assert fujii_wilson(np.ones(dyadic.n), dyadic) == pytest.approx(1.0)
    # a point mass spike of height h on a single dyadic cell
    spike = np.ones(dyadic.n)
    spike[0] = 9.0
    assert fujii_wilson(spike, dyadic) == pytest.approx(9.0)


@given(seeds, recip, recip)
def test_tensor_submultiplicative(seed, s_recip, r_recip):
    a, b = make_dyadic_space(2), make_dyadic_space(2)
    _, basis = product_space(a, b)
    w1, v1 = _weights(seed, 4)
    w2, v2 = _weights(seed + 3, 4)
    lhs = characteristic_recips(tensor_weight(w1, w2), tensor_weight(v1, v2), s_recip, r_recip, basis)
    rhs = (characteristic_recips(w1, v1, s_recip, r_recip, a[1])
           * characteristic_recips(w2, v2, s_recip, r_recip, b[1]))
    assert lhs <= rhs * (1 + 1e-12)
    # product sets make the bound an identity
    assert lhs == pytest.approx(rhs, rel=1e-12)
