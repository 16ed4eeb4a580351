import numpy as np
import pytest

from contextuality.errors import InvalidScenario, SizeLimitExceeded
from contextuality.scenario import (MeasurementScenario, assignment_codes, bell_scenario,
                                    build_incidence_matrix, enumerate_global_assignments,
                                    global_codes)

from conftest import oracle_incidence


def test_bell_scenario_layout():
    scn = bell_scenario(2)
    assert scn.measurements == ("a1", "a2", "b1", "b2")
    assert scn.contexts == (("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2"))
    assert scn.n_global == 16
    assert scn.n_local == 16
    assert list(scn.offsets) == [0, 4, 8, 12]


def test_contexts_follow_declared_measurement_order():
    scn = MeasurementScenario(["x", "y"], ["0", "1"], [["y", "x"]])
    assert scn.contexts == (("x", "y"),)


@pytest.mark.parametrize("kwargs", [
    dict(measurements=["a", "a"], outcomes=["0"], contexts=[["a"]]),
    dict(measurements=["a"], outcomes=[], contexts=[["a"]]),
    dict(measurements=["a"], outcomes=["0"], contexts=[["b"]]),
    dict(measurements=["a", "b"], outcomes=["0"], contexts=[["a"]]),
    dict(measurements=["a"], outcomes=["0"], contexts=[["a"], ["a"]]),
])
def test_invalid_scenarios(kwargs):
    with pytest.raises(InvalidScenario):
        MeasurementScenario(**kwargs)


def test_global_assignments_are_lexicographic():
    scn = bell_scenario(2)
    codes = global_codes(scn)
    assert codes.shape == (16, 4)
    assert list(codes[1]) == [0, 0, 0, 1]
    assert list(codes[8]) == [1, 0, 0, 0]
    g = enumerate_global_assignments(scn)[5]
    assert dict(g.assignment) == {"a1": "0", "a2": "1", "b1": "0", "b2": "1"}
    assert g.restrict(("a2", "b2")) == ("1", "1")


@pytest.mark.parametrize("scn", [
    bell_scenario(2),
    bell_scenario(3),
    bell_scenario(2, settings=3),
    bell_scenario(2, outcomes=3),
    MeasurementScenario(["p", "q", "r"], ["u", "v"], [["p", "q"], ["q", "r"], ["r"]]),
])
def test_incidence_matches_first_principles(scn):
    inc = build_incidence_matrix(scn)
    assert inc.m == scn.n_local and inc.n == scn.n_global
    np.testing.assert_array_equal(inc.matrix, oracle_incidence(scn))
    # each column has exactly one 1 per context
    assert np.all(inc.matrix.sum(axis=0) == len(scn.contexts))


def test_size_guard():
    scn = bell_scenario(3)
    with pytest.raises(SizeLimitExceeded):
        build_incidence_matrix(scn, limit=32)
    with pytest.raises(SizeLimitExceeded):
        build_incidence_matrix(scn, entry_limit=100)


def test_assignment_codes_accepts_mappings_and_sequences():
    scn = bell_scenario(2)
    a = assignment_codes(scn, {"a1": "1", "a2": "0", "b1": "1", "b2": "1"})
    b = assignment_codes(scn, ["1", "0", "1", "1"])
    assert list(a) == list(b) == [1, 0, 1, 1]
