import json
from fractions import Fraction

import pytest

from cmk.core import (FractionalSolution, Instance, Item, Solution, cover, integral_encoding,
                      solution_value, validate_configuration)
from cmk.errors import InputError
from conftest import make


def test_overweight_pair_is_not_a_configuration():
    inst = make([(0.6, 1), (0.6, 1)], k=2)
    assert not validate_configuration(inst, (0, 1))


def test_empty_set_is_a_configuration():
    assert validate_configuration(make([(0.5, 1)], k=1), ())


def test_cardinality_limit():
    assert not validate_configuration(make([(0.1, 1), (0.1, 1)], k=1), (0, 1))


def test_weight_tolerance_for_floats():
    inst = make([(0.7, 1), (0.3 + 1e-10, 1)], k=2)
    assert validate_configuration(inst, (0, 1))
    inst = make([(0.7, 1), (0.3 + 1e-6, 1)], k=2)
    assert not validate_configuration(inst, (0, 1))


def test_exact_weights_have_no_tolerance():
    inst = Instance((Item(0, Fraction(1, 2), 1), Item(1, Fraction(1, 2) + Fraction(1, 10**12), 1)),
                    1, 2)
    assert not validate_configuration(inst, (0, 1))


def test_unknown_item_raises():
    with pytest.raises(InputError):
        validate_configuration(make([(0.5, 1)]), (7,))


def test_cover_sums_over_configurations():
    x = FractionalSolution({(0, 1): 0.5, (1,): 0.5})
    cv = cover(x)
    assert cv[0] == 0.5 and cv[1] == 1.0


def test_cover_of_empty_solution():
    assert dict(cover(FractionalSolution())) == {}


def test_equal_configurations_merge():
    x = FractionalSolution([((0,), 0.3), ((0,), 0.3)])
    assert len(x) == 1
    assert cover(x)[0] == pytest.approx(0.6)


def test_value_counts_union():
    inst = make([(0.5, 5)], m=2)
    assert solution_value(inst, Solution(((0,), (0,)))) == 5


def test_value_two_bins():
    inst = make([(0.5, 3), (0.5, 4)], m=2)
    assert solution_value(inst, Solution(((0,), (1,)))) == 7


def test_value_empty_bins():
    assert solution_value(make([(0.5, 3)], m=2), Solution(((), ()))) == 0


def test_invalid_bin_rejected():
    inst = make([(0.6, 1), (0.6, 1)], m=1, k=2)
    with pytest.raises(InputError):
        Solution(((0, 1),)).validate(inst)


def test_wrong_bin_count_rejected():
    with pytest.raises(InputError):
        Solution(((),)).validate(make([(0.5, 1)], m=2))


@pytest.mark.parametrize("bad", [
    {"m": 0, "k": 1, "items": []},
    {"m": 1, "k": 1, "items": [{"id": 0, "weight": 1.5, "value": 1}]},
    {"m": 1, "k": 1, "items": [{"id": 0, "weight": 0.5, "value": -1}]},
    {"m": 1, "k": 1, "items": [{"id": 0, "weight": 0.5, "value": 1},
                               {"id": 0, "weight": 0.5, "value": 1}]},
    {"m": 1, "items": []},
])
def test_malformed_instances(bad):
    with pytest.raises(InputError):
        Instance.from_dict(bad)


def test_instance_json_round_trip():
    inst = make([(0.25, 3), (0.5, 1.5)], m=2, k=3)
    again = Instance.from_json(inst.to_json())
    assert again == inst and again.digest() == inst.digest()


def test_integral_encoding():
    inst = make([(0.5, 3), (0.5, 4), (0.2, 1)], m=3, k=2)
    s = Solution(((0, 2), (1,), ()))
    x = integral_encoding(s)
    assert x.size() == 2
    assert x.value(inst) == s.value(inst)
    assert sorted(x.cover().values()) == [1, 1, 1]


def test_solution_json():
    s = Solution(((2, 0), ()))
    assert json.loads(json.dumps(s.to_dict())) == {"bins": [[0, 2], []]}
    assert Solution.from_dict(s.to_dict()) == s
