import numpy as np
import pytest

from cmk.constant_bins import (band_count, band_of, build_value_bands, choose_branch,
                               constant_bins, dispatch, first_items, local_search,
                               solve_assign_lp)
from cmk.core import Instance
from cmk.errors import BudgetError, InputError
from cmk.exact import solve_exact_cmk
from conftest import make, random_instance


def test_local_search_prefers_heavy_valuable_item():
    inst = make([(0.9, 10), (0.2, 1), (0.2, 1)], m=1, k=1)
    assert local_search(inst).value(inst) == 10


def test_local_search_empty():
    inst = Instance((), 2, 2)
    assert local_search(inst).value(inst) == 0


def test_band_count():
    assert band_count(0.1, 2) == 16


def test_band_of_boundary():
    assert band_of(0.3, 0.5) == 2
    assert band_of(0.5, 0.5) == 2
    assert band_of(0.51, 0.5) == 1
    assert band_of(0.25, 0.5) == 3


def test_bands_without_value():
    inst = make([(0.5, 0), (0.5, 0)])
    table = build_value_bands(inst, 0.1, 0.0)
    assert table.valuable == frozenset() and table.bands == {}


def test_first_items():
    inst = make([(0.9, 1), (0.2, 1), (0.5, 1)], m=1, k=3)
    table = build_value_bands(inst, 0.1, 1.0)
    (r,) = table.bands
    assert first_items(table, r, 0) == ()
    assert first_items(table, r, 2) == (1, 2)
    assert first_items(table, r, 10) == (1, 2, 0)


def test_assign_lp_overfull_bin():
    inst = make([(0.6, 5), (0.6, 5), (0.1, 0.01)], m=1, k=3)
    assert solve_assign_lp(inst, {0, 1}, [(0, 1)]).status == "infeasible"


def test_assign_lp_without_rest():
    inst = make([(0.6, 5)], m=1, k=3)
    res = solve_assign_lp(inst, {0}, [(0,)])
    assert res.status == "optimal" and res.objective == 0 and res.x == {}


def test_assign_lp_fractional_entries(rng):
    for _ in range(20):
        m = int(rng.integers(1, 5))
        inst = random_instance(rng, int(rng.integers(5, 30)), m, int(rng.integers(1, 5)))
        res = solve_assign_lp(inst, set(), [()] * m)
        assert res.fractional_count <= 4 * m


def test_constant_bins_two_unit_items():
    inst = make([(1, 5), (1, 3)], m=1, k=1)
    assert constant_bins(inst, 0.25).value(inst) == 5


def test_constant_bins_nothing_valuable():
    inst = make([(0.5, 0), (0.2, 0)], m=2, k=2)
    assert constant_bins(inst, 0.25).value(inst) == 0


def test_constant_bins_budget():
    inst = random_instance(np.random.default_rng(0), 40, 4, 5)
    with pytest.raises(BudgetError) as err:
        constant_bins(inst, 0.25, budget=10)
    assert err.value.estimate > 10


def test_constant_bins_near_optimal(rng):
    for _ in range(10):
        inst = random_instance(rng, 7, 2, 3)
        opt = solve_exact_cmk(inst)[1]
        assert constant_bins(inst, 0.25).value(inst) >= 0.75 * opt - 1e-9


def test_branches():
    five = make([(0.5, 1)], m=5)
    assert choose_branch(five, 0.25, "faithful") == "constant_bins"
    big = make([(0.5, 1)], m=64)
    assert choose_branch(big, 0.25, "practical") == "iterative"
    with pytest.raises(InputError):
        choose_branch(big, 0.25, "other")


def test_dispatch_falls_back_to_local_search():
    inst = random_instance(np.random.default_rng(1), 40, 4, 5)
    info = {}
    sol = dispatch(inst, 0.25, budget=10, info=info)
    assert info["branch"] == "local_search"
    sol.validate(inst)
