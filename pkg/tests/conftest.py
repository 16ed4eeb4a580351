"""Shared oracles.

The oracles here avoid the package's own LP and enumeration code: the
incidence structure is rebuilt with itertools and the fraction LP is handed
to scipy's HiGHS solver.
"""
import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from contextuality.empirical import to_vector


def oracle_incidence(scn):
    """Incidence matrix from first principles, rows per context then lexicographic."""
    X = list(scn.measurements)
    O = list(scn.outcomes)
    cols = list(itertools.product(range(len(O)), repeat=len(X)))
    rows = []
    for ctx in scn.contexts:
        pos = [X.index(x) for x in ctx]
        for s in itertools.product(range(len(O)), repeat=len(ctx)):
            rows.append([int(all(g[p] == v for p, v in zip(pos, s))) for g in cols])
    return np.array(rows, dtype=float)


def oracle_ncf(e):
    """max 1.b subject to M b <= v, b >= 0, solved by HiGHS."""
    M = oracle_incidence(e.scenario)
    v = np.asarray(to_vector(e), dtype=float)
    res = linprog(-np.ones(M.shape[1]), A_ub=M, b_ub=v, bounds=(0, None), method="highs")
    assert res.status == 0
    return -res.fun


def oracle_dual(e):
    """min v.y subject to M^T y >= 1, y >= 0, solved by HiGHS."""
    M = oracle_incidence(e.scenario)
    v = np.asarray(to_vector(e), dtype=float)
    res = linprog(v, A_ub=-M.T, b_ub=-np.ones(M.shape[1]), bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
