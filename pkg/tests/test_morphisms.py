import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contextuality.catalog import chsh_model, deterministic_zero, pr_box
from contextuality.empirical import SubDistribution, deterministic_model, mix, uniform_model
from contextuality.errors import NotContextPreserving, OutcomeMismatch, SizeLimitExceeded
from contextuality.fraction import noncontextual_fraction
from contextuality.morphisms import (MeasurementTranslation, choice, coarse_grain,
                                     couple_subdistributions, deterministic_local_model,
                                     marginals, product, relabel, translate)
from contextuality.randomize import (random_coarse_graining, random_model, random_subdistribution,
                                     random_translation, embed_outcomes)
from contextuality.scenario import MeasurementScenario, bell_scenario

SCN = bell_scenario(2)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def ncf(e):
    return noncontextual_fraction(e).ncf


# translation

def test_identity_translation():
    f = MeasurementTranslation(SCN, SCN, {x: x for x in SCN.measurements})
    assert translate(f, chsh_model()) == chsh_model()


def test_single_context_inclusion_is_noncontextual():
    src = MeasurementScenario(["a1", "b1"], ["0", "1"], [["a1", "b1"]])
    f = MeasurementTranslation(src, SCN, {"a1": "a1", "b1": "b1"})
    e = translate(f, pr_box())
    assert e.tables[0].tolist() == [F(1, 2), 0, 0, F(1, 2)]
    assert ncf(e) == 1


def test_relabelling_bijection_keeps_pr_box_strongly_contextual():
    swap = {"a1": "a2", "a2": "a1"}
    e = relabel(pr_box(), measurements=swap)
    assert e.scenario.measurements == ("a2", "a1", "b1", "b2")
    assert noncontextual_fraction(e).cf == 1
    # the same bijection as a translation on the fixed scenario
    f = MeasurementTranslation(SCN, SCN, {"a1": "a2", "a2": "a1", "b1": "b1", "b2": "b2"})
    moved = translate(f, pr_box())
    assert moved != pr_box()
    assert noncontextual_fraction(moved).cf == 1


def test_non_context_preserving_map():
    src = MeasurementScenario(["x", "y"], ["0", "1"], [["x", "y"]])
    with pytest.raises(NotContextPreserving):
        MeasurementTranslation(src, SCN, {"x": "a1", "y": "a2"})


def test_collapsing_translation_copies_outcomes():
    # both source measurements read a1, so they always agree
    src = MeasurementScenario(["x", "y"], ["0", "1"], [["x", "y"]])
    e = translate(MeasurementTranslation(src, SCN, {"x": "a1", "y": "a1"}), chsh_model())
    assert e.tables[0].tolist() == [F(1, 2), 0, 0, F(1, 2)]


# coarse-graining

def test_identity_and_constant_coarse_graining():
    assert coarse_grain(pr_box(), {"0": "0", "1": "1"}) == pr_box()
    e = coarse_grain(pr_box(), {"0": "*", "1": "*"})
    assert e.scenario.outcomes == ("*",)
    assert all(t.tolist() == [1] for t in e.tables)
    assert noncontextual_fraction(e).cf == 0


def test_outcome_swap_keeps_pr_box():
    e = coarse_grain(pr_box(), {"0": "1", "1": "0"}, ["0", "1"])
    assert noncontextual_fraction(e).cf == 1


def test_partial_map_rejected():
    with pytest.raises(OutcomeMismatch):
        coarse_grain(pr_box(), {"0": "0"})


# choice and product

def test_choice_examples():
    det = deterministic_zero()
    assert ncf(choice(det, det)) == 1
    assert ncf(choice(pr_box(), det)) == 0
    assert noncontextual_fraction(choice(chsh_model(), det)).cf == F(1, 4)
    both = choice(pr_box(), det)
    assert both.scenario.measurements[0] == "a1#1"
    assert all(np.array_equal(a, b) for a, b in zip(both.tables[:4], pr_box().tables))


def test_choice_needs_same_outcomes():
    other = coarse_grain(pr_box(), {"0": "x", "1": "y"})
    with pytest.raises(OutcomeMismatch):
        choice(pr_box(), other)


def test_product_examples():
    det = deterministic_zero()
    assert ncf(product(det, det)) == 1
    assert noncontextual_fraction(product(pr_box(), det)).cf == 1
    assert ncf(product(chsh_model(), chsh_model())) == F(9, 16)


def test_product_table_layout():
    e = product(chsh_model(), pr_box())
    assert len(e.scenario.contexts) == 16
    # first context is (a1,b1 | a1,b1) of both: outer product of the tables
    expected = np.outer(chsh_model().tables[0], pr_box().tables[0]).reshape(-1)
    assert e.tables[0].tolist() == expected.tolist()


def test_product_size_guard():
    with pytest.raises(SizeLimitExceeded):
        product(pr_box(), pr_box(), limit=2**7)


# coupling

def test_coupling_examples():
    b = couple_subdistributions(SubDistribution({"s": 0.4}), SubDistribution({"t": 0.4}))
    assert b.weights == {("s", "t"): 0.4}
    bS = SubDistribution({"s1": F(3, 10), "s2": F(2, 10)})
    bT = SubDistribution({"t1": F(1, 10), "t2": F(4, 10)})
    b = couple_subdistributions(bS, bT)
    assert b.weights == {("s1", "t1"): F(1, 10), ("s1", "t2"): F(2, 10), ("s2", "t2"): F(2, 10)}
    left, right = marginals(b)
    assert left.weights == bS.weights and right.weights == bT.weights


def test_coupling_shrinks_the_heavier_side():
    bS = SubDistribution({"s1": F(3, 10), "s2": F(2, 10)})
    bT = SubDistribution({"t1": F(1, 10), "t2": F(3, 20)})
    b = couple_subdistributions(bS, bT)
    assert b.weight == F(1, 4)
    left, right = marginals(b)
    assert right.weights == bT.weights
    assert all(left[s] <= bS[s] for s in bS.weights)
    assert couple_subdistributions(SubDistribution({}), bT).weight == 0


@settings(max_examples=200, deadline=None)
@given(seeds, st.booleans(), st.booleans())
def test_coupling_properties(seed, exact, equal):
    rng = np.random.default_rng(seed)
    bS = random_subdistribution(rng, exact=exact, prefix="s")
    bT = random_subdistribution(rng, exact=exact, prefix="t",
                                weight=bS.weight if equal else None)
    b = couple_subdistributions(bS, bT)
    tol = 0 if exact else 1e-12
    assert abs(b.weight - min(bS.weight, bT.weight)) <= tol
    left, right = marginals(b)
    assert all(left[s] <= bS[s] + tol for s in left.weights)
    assert all(right[t] <= bT[t] + tol for t in right.weights)
    if equal and exact:
        assert left.weights == {k: v for k, v in bS.weights.items() if v > 0}
        assert right.weights == {k: v for k, v in bT.weights.items() if v > 0}
    elif equal:
        assert all(abs(left[s] - bS[s]) <= 1e-12 for s in bS.weights)
        assert all(abs(right[t] - bT[t]) <= 1e-12 for t in bT.weights)


# monotonicity properties

@settings(max_examples=25, deadline=None)
@given(seeds)
def test_translation_does_not_increase_cf(seed):
    rng = np.random.default_rng(seed)
    e = random_model(2 + seed % 2, rng)
    f = random_translation(e.scenario, rng)
    assert noncontextual_fraction(translate(f, e)).cf <= noncontextual_fraction(e).cf + 1e-7


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_coarse_graining_does_not_increase_cf(seed):
    rng = np.random.default_rng(seed)
    e = embed_outcomes(random_model(2, rng), ["0", "1", "2"], rng)
    h, labels = random_coarse_graining(e.scenario.outcomes, rng)
    assert noncontextual_fraction(coarse_grain(e, h, labels)).cf <= \
        noncontextual_fraction(e).cf + 1e-7


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]))
def test_mixing_is_convex(seed, lam):
    rng = np.random.default_rng(seed)
    e1, e2 = random_model(2, rng), random_model(2, rng)
    cf1, cf2 = noncontextual_fraction(e1).cf, noncontextual_fraction(e2).cf
    assert noncontextual_fraction(mix(e1, e2, lam)).cf <= lam * cf1 + (1 - lam) * cf2 + 1e-7


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_choice_takes_the_minimum(seed):
    rng = np.random.default_rng(seed)
    e1, e2 = random_model(2, rng), random_model(2, rng)
    assert abs(ncf(choice(e1, e2)) - min(ncf(e1), ncf(e2))) <= 1e-6


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_product_multiplies(seed):
    rng = np.random.default_rng(seed)
    e1, e2 = random_model(2, rng), random_model(2, rng)
    assert abs(ncf(product(e1, e2)) - ncf(e1) * ncf(e2)) <= 1e-6


# generator construction

@pytest.mark.parametrize("assignment", list(itertools.product("01", repeat=4))[::3])
def test_generator_recipe_builds_deterministic_models(assignment):
    rows = [list(assignment[:2]), list(assignment[2:])]
    e = deterministic_local_model(rows, ["0", "1"])
    assert e == deterministic_model(SCN, list(assignment))
    assert ncf(e) == 1


def test_generator_recipe_three_parties():
    e = deterministic_local_model([["1", "0"], ["0", "0"], ["1", "1"]], ["0", "1"])
    assert e.scenario == bell_scenario(3)
    assert ncf(e) == 1
    assert ncf(uniform_model(bell_scenario(3))) == 1
