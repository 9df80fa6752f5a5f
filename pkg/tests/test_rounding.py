import itertools

import numpy as np
import pytest

from cmk.core import FractionalSolution, Instance
from cmk.errors import InputError
from cmk.rounding import (ConfigurationSampler, RoundingParams, check_bookkeeping,
                          iterative_rounding, oneshot_rounding, sample_configuration, schedule,
                          substream)
from conftest import make, random_instance


def test_probabilities_follow_weights():
    s = ConfigurationSampler(FractionalSolution({(0,): 2, (1,): 1}))
    probs = dict(zip(s.support, s.probabilities()))
    assert probs[(0,)] == pytest.approx(2 / 3)


def test_single_configuration_always_drawn():
    x = FractionalSolution({(3,): 5})
    rng = np.random.default_rng(0)
    assert all(sample_configuration(x, rng) == (3,) for _ in range(50))


def test_empty_solution_cannot_be_sampled():
    with pytest.raises(InputError):
        ConfigurationSampler(FractionalSolution())


def test_substreams_are_reproducible_and_distinct():
    a = substream(7, 1, 0).random(4)
    assert np.array_equal(a, substream(7, 1, 0).random(4))
    assert not np.array_equal(a, substream(7, 1, 1).random(4))
    assert not np.array_equal(a, substream(7, 2, 0).random(4))


@pytest.mark.parametrize("m,eps", [(1, 0.5), (10, 0.2), (7, 0.3), (40, 0.2), (3, 1.0)])
def test_practical_schedule_sums_to_m(m, eps):
    qs = schedule(m, RoundingParams(eps))
    assert sum(qs) == m and all(q >= 1 for q in qs)


def test_faithful_schedule():
    p = RoundingParams(1 / 16, mode="faithful")
    p.validate(32)
    assert schedule(32, p) == [2] * 16


@pytest.mark.parametrize("eps,m", [(0.2, 10), (1 / 16, 3), (1 / 8, 8)])
def test_faithful_mode_preconditions(eps, m):
    with pytest.raises(InputError):
        RoundingParams(eps, mode="faithful").validate(m)


@pytest.mark.parametrize("bad", [dict(eps=0), dict(eps=1.5), dict(eps=0.1, seed=-1),
                                 dict(eps=0.1, mode="fast")])
def test_bad_params(bad):
    with pytest.raises(InputError):
        RoundingParams(**bad).validate(4)


def test_no_items():
    inst = Instance((), 3, 2)
    for fn in (iterative_rounding, oneshot_rounding):
        sol, _ = fn(inst, RoundingParams(0.5))
        assert sol.bins == ((), (), ()) and sol.value(inst) == 0


def test_single_item_single_bin():
    inst = make([(0.5, 7)], m=1, k=1)
    for seed in range(5):
        for fn in (iterative_rounding, oneshot_rounding):
            sol, _ = fn(inst, RoundingParams(1.0, seed))
            assert sol.value(inst) == pytest.approx(7)


def test_oneshot_expectation_on_two_singletons():
    # x uniform over {a}, {b}: each of the 4 equally likely pairs, value 1, 2, 2, 1
    pairs = list(itertools.product([(0,), (1,)], repeat=2))
    exact = sum(len({i for c in p for i in c}) for p in pairs) / len(pairs)
    assert exact == 1.5
    x = FractionalSolution({(0,): 1, (1,): 1})
    s = ConfigurationSampler(x)
    values = []
    for seed in range(4000):
        drawn = [s.draw(substream(seed, 1, b)) for b in range(2)]
        values.append(len({i for c in drawn for i in c}))
    assert np.mean(values) == pytest.approx(1.5, abs=0.03)


def test_iterative_bookkeeping(rng):
    for seed in range(4):
        inst = random_instance(rng, 60, 8, 4)
        sol, trace = iterative_rounding(inst, RoundingParams(0.25, seed))
        check_bookkeeping(inst, sol, trace)
        assert len(trace) == 4 and sum(r.q for r in trace) == 8
        for a, b in zip(trace, trace[1:]):
            assert b.remaining_before == a.remaining_after


def test_same_seed_same_solution():
    inst = random_instance(np.random.default_rng(5), 40, 6, 3)
    a, _ = iterative_rounding(inst, RoundingParams(0.3, 11))
    b, _ = iterative_rounding(inst, RoundingParams(0.3, 11))
    assert a == b
