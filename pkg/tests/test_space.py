import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weightlab.space import (
    MeasureSpace,
    SetBasis,
    make_cyclic_space,
    make_dyadic_space,
    product_space,
    space_from_dict,
    space_to_json,
    validate_basis,
)


def test_dyadic_counts_and_measures():
    space, basis = make_dyadic_space(3)
    assert space.n == 8
    assert len(basis) == 1 + 2 + 4 + 8
    np.testing.assert_allclose(space.total_mass, 1.0)
    np.testing.assert_allclose(sorted(set(np.round(basis.measures, 12))), [1 / 8, 1 / 4, 1 / 2, 1.0])


def test_dyadic_rejects_bad_levels():
    with pytest.raises(ValueError):
        make_dyadic_space(0)
    with pytest.raises(ValueError):
        make_dyadic_space(2.5)


def test_cyclic_four():
    space, basis, group = make_cyclic_space(4)
    assert [lev.tolist() for lev in group.levels] == [[0, 1, 3], [0, 1, 2, 3]]
    assert group.theta == (1, 2)
    # four translates of {-1, 0, 1} and the whole group
    assert len(basis) == 5
    assert group.doubling_constant == pytest.approx(4 / 3)
    assert validate_basis(space, basis).ok


@given(st.integers(min_value=2, max_value=40))
def test_group_basis_invariants(n):
    space, basis, group = make_cyclic_space(n)
    assert group.levels[-1].size == n
    for k, lev in enumerate(group.levels):
        assert np.array_equal(np.sort((-lev) % n), lev)
        sumset = np.unique((lev[:, None] + lev[None, :]) % n)
        assert np.all(np.isin(sumset, group.level_set(group.theta[k])))
        if k + 1 < len(group.levels):
            assert np.all(np.isin(lev, group.levels[k + 1]))
    assert 1.0 <= group.doubling_constant <= n
    assert validate_basis(space, basis).ok


def test_product_layout():
    a = make_dyadic_space(1)
    b = make_dyadic_space(2)
    space, basis = product_space(a, b)
    assert space.n == 8
    assert len(basis) == len(a[1]) * len(b[1])
    # the set {0} x {0, 1} is flat indices 0 and 1
    assert any(s.tolist() == [0, 1] for s in basis.sets)
    np.testing.assert_allclose(space.total_mass, 1.0)
    assert validate_basis(space, basis).ok


def test_validate_detects_missing_cover_and_pairs():
    space = MeasureSpace(np.ones(3))
    basis = SetBasis(space, (np.array([0]), np.array([1])))
    report = validate_basis(space, basis)
    assert not report.cover
    assert report.uncovered == [2]
    assert not report.pair_containment
    assert report.failing_pair == (0, 1)
    assert report.to_dict()["ok"] is False


def test_json_round_trip():
    space, basis = make_dyadic_space(2)
    space2, basis2 = space_from_dict(json.loads(space_to_json(space, basis)))
    np.testing.assert_array_equal(space.mass, space2.mass)
    assert [s.tolist() for s in basis.sets] == [s.tolist() for s in basis2.sets]


def test_invalid_inputs():
    with pytest.raises(ValueError):
        MeasureSpace(np.array([1.0, 0.0]))
    space = MeasureSpace(np.ones(2))
    with pytest.raises(ValueError):
        SetBasis(space, (np.array([], dtype=np.int64),))
    with pytest.raises(ValueError):
        SetBasis(space, (np.array([2]),))
    with pytest.raises(ValueError):
        space_from_dict({"masses": [1.0]})
