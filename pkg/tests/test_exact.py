import pytest

from cmk.core import Instance
from cmk.errors import CapacityError, InputError
from cmk.exact import OracleLimits, solve_exact_cmk
from conftest import make, random_instance
from oracles import best_packing


def test_two_bins_one_slot():
    inst = make([(0.6, 4), (0.6, 3), (0.3, 2)], m=2, k=1)
    sol, val = solve_exact_cmk(inst)
    assert val == 7 and sol.value(inst) == 7


def test_pair_does_not_fit():
    assert solve_exact_cmk(make([(0.6, 1), (0.6, 1)], m=1, k=2))[1] == 1


def test_empty():
    sol, val = solve_exact_cmk(Instance((), 2, 1))
    assert val == 0 and sol.bins == ((), ())


def test_limits():
    with pytest.raises(CapacityError):
        solve_exact_cmk(make([(0.1, 1)] * 11, m=1, k=3))
    with pytest.raises(CapacityError):
        solve_exact_cmk(make([(0.1, 1)], m=4, k=3))
    with pytest.raises(InputError):
        OracleLimits(max_items=0)


def test_matches_brute_force(rng):
    for _ in range(40):
        inst = random_instance(rng, int(rng.integers(0, 7)), int(rng.integers(1, 4)),
                               int(rng.integers(1, 4)))
        items = [(it.id, it.weight, it.value) for it in inst.items]
        sol, val = solve_exact_cmk(inst)
        sol.validate(inst)
        assert val == pytest.approx(best_packing(items, inst.m, inst.k), abs=1e-12)
