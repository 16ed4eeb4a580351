from fractions import Fraction as F

import numpy as np
import pytest
from scipy.optimize import linprog

from contextuality.lp import LinearProgram, residuals, solve, verify_duality


def test_textbook_max():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36
    lp = LinearProgram([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    for backend in ("float", "rational"):
        sol = solve(lp, backend)
        assert sol.optimal
        assert sol.value == 36
        assert list(map(float, sol.x)) == [2.0, 6.0]
    exact = solve(lp, "rational")
    assert isinstance(exact.value, F)
    # duals certify the optimum: y >= 0, y.b = value
    assert sum(y * b for y, b in zip(exact.duals, [4, 12, 18])) == 36
    assert all(y >= 0 for y in exact.duals)


def test_mixed_relations_min():
    # min 2x + 3y with x + y >= 5, x - y = 1, x <= 10
    lp = LinearProgram([2, 3], [[1, 1], [1, -1], [1, 0]], [5, 1, 10], [">=", "=", "<="], "min")
    sol = solve(lp, "rational")
    assert sol.value == 12 and list(sol.x) == [3, 2]
    assert sum(y * b for y, b in zip(sol.duals, [5, 1, 10])) == 12


def test_infeasible_and_unbounded():
    assert solve(LinearProgram([1], [[1], [1]], [1, 2], ["<=", ">="]), "rational").status == \
        "infeasible"
    assert solve(LinearProgram([1, 1], [[1, -1]], [1]), "float").status == "unbounded"


def test_lower_bounds_and_negative_rhs():
    # max -x with x >= 2 via a lower bound, and -x <= -1 redundant
    lp = LinearProgram([-1], [[-1]], [-1], "<=", "max", lower=[2])
    sol = solve(lp, "rational")
    assert sol.value == -2 and sol.x[0] == 2


def test_degenerate_lp_terminates():
    # Beale's cycling example; Bland's rule must terminate at value 1/20
    c = [F(3, 4), -150, F(1, 50), -6]
    A = [[F(1, 4), -60, F(-1, 25), 9], [F(1, 2), -90, F(-1, 50), 3], [0, 0, 1, 0]]
    sol = solve(LinearProgram(c, A, [0, 0, 1]), "rational")
    assert sol.optimal and sol.value == F(1, 20)


def test_input_is_not_mutated():
    A = np.array([[1.0, 2.0], [3.0, 1.0]])
    b = np.array([4.0, 6.0])
    solve(LinearProgram([1, 1], A, b), "float")
    assert A.tolist() == [[1.0, 2.0], [3.0, 1.0]] and b.tolist() == [4.0, 6.0]


@pytest.mark.parametrize("seed", range(25))
def test_random_lps_match_highs(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(2, 7, size=2)
    A = rng.integers(-3, 6, size=(m, n)).astype(float)
    b = rng.integers(0, 10, size=m).astype(float)
    c = rng.integers(-2, 6, size=n).astype(float)
    ours = solve(LinearProgram(c, A, b), "float")
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    if ref.status == 3:
        assert ours.status == "unbounded"
        return
    assert ours.optimal
    assert abs(ours.value - (-ref.fun)) <= 1e-8
    assert np.max(residuals(LinearProgram(c, A, b), ours.x)) <= 1e-9
    exact = solve(LinearProgram(c.astype(int), A.astype(int), b.astype(int)), "rational")
    assert abs(float(exact.value) - ours.value) <= 1e-9


def test_duality_report():
    primal = LinearProgram([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    dual = LinearProgram([4, 12, 18], [[1, 0, 3], [0, 2, 2]], [3, 5], ">=", "min")
    rep = verify_duality(primal, dual, "rational")
    assert rep.ok and rep.gap == 0
