"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

The same pivoting code runs on float64 arrays (``backend="float"``) and on
object arrays of :class:`fractions.Fraction` (``backend="rational"``).  The
rational backend is exact: comparisons use zero tolerance and the optimal
value is a Fraction.

Bland's rule (lowest-index entering column, lowest-index leaving basic
variable among ratio ties) makes the returned vertex a deterministic
function of the variable order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NumericalBreakdown, StatusMismatch

try:  # GMP rationals are an order of magnitude faster than Fraction
    from gmpy2 import mpq as _rational
except ImportError:  # pragma: no cover
    _rational = Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

#: Pivot and reduced-cost tolerance of the float backend.
FLOAT_EPS = 1e-11
#: Maximum admissible constraint residual of a float solution.
RESIDUAL_TOL = 1e-9
#: Tolerance on the exactness of the strong-duality gap (float backend).
DUALITY_TOL = 1e-7


@dataclass
class LinearProgram:
    """``sense`` c.x subject to ``A x (relations) b`` and ``x >= lower``.

    ``relations`` holds one of ``"<="``, ``">="``, ``"="`` per row.  Lower
    bounds default to zero.
    """

    c: Sequence
    A: Sequence
    b: Sequence
    relations: Sequence[str] | str = "<="
    sense: str = "max"
    lower: Sequence | None = None

    def __post_init__(self):
        A = np.asarray(self.A, dtype=object if _has_fractions(self.A) else float)
        if A.ndim != 2:
            A = A.reshape(len(self.b), -1)
        self.A = A
        self.c = np.asarray(self.c, dtype=object if _has_fractions(self.c) else float)
        self.b = np.asarray(self.b, dtype=object if _has_fractions(self.b) else float)
        m, n = A.shape
        if isinstance(self.relations, str):
            self.relations = [self.relations] * m
        self.relations = list(self.relations)
        if self.c.shape != (n,) or self.b.shape != (m,) or len(self.relations) != m:
            raise ValueError("inconsistent linear program dimensions")
        if any(r not in ("<=", ">=", "=") for r in self.relations):
            raise ValueError("relations must be '<=', '>=' or '='")
        if self.sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        if self.lower is None:
            self.lower = np.zeros(n, dtype=int)
        self.lower = np.asarray(self.lower)
        if self.lower.shape != (n,):
            raise ValueError("one lower bound per variable is required")
        for arr in (self.A, self.b, self.c, self.lower):
            if arr.dtype != object and not np.all(np.isfinite(arr)):
                raise ValueError("linear program entries must be finite")

    @property
    def shape(self):
        return self.A.shape


@dataclass
class LPSolution:
    status: str
    value: object = None
    x: np.ndarray | None = None
    basis: list = field(default_factory=list)
    duals: np.ndarray | None = None
    iterations: int = 0
    backend: str = "float"

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass
class DualityReport:
    primal_value: object
    dual_value: object
    gap: object
    backend: str

    @property
    def ok(self) -> bool:
        if self.backend == "rational":
            return self.gap == 0
        return abs(self.gap) <= DUALITY_TOL


def _has_fractions(values) -> bool:
    arr = np.asarray(values, dtype=object).ravel()
    return any(isinstance(v, Fraction) for v in arr)


def to_fraction(v) -> Fraction:
    """Exact Fraction of a Python or numpy scalar (numpy integers overflow inside Fraction)."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    return Fraction(float(v))


def _convert(arr, backend):
    arr = np.asarray(arr)
    if backend == "rational":
        out = np.empty(arr.shape, dtype=object)
        flat = out.reshape(-1)
        for k, v in enumerate(arr.reshape(-1)):
            f = to_fraction(v)
            flat[k] = _rational(f.numerator, f.denominator)
        return out
    return np.asarray(arr, dtype=float)


def _to_fractions(arr):
    out = np.empty(np.shape(arr), dtype=object)
    flat = out.reshape(-1)
    for k, v in enumerate(np.asarray(arr, dtype=object).reshape(-1)):
        flat[k] = Fraction(int(v.numerator), int(v.denominator))
    return out


class _Tableau:
    """Simplex tableau in dictionary form; the last row holds reduced costs.

    For a maximisation the objective row stores ``-c + c_B B^-1 A`` so the
    current vertex is optimal once no entry is negative.
    """

    def __init__(self, T, basis, eps, max_iter):
        self.T = T
        self.basis = basis
        self.eps = eps
        self.max_iter = max_iter
        self.iterations = 0

    def set_objective(self, cost):
        T = self.T
        T[-1, :] = 0
        T[-1, :-1] = -cost
        for i, bv in enumerate(self.basis):
            if cost[bv] != 0:
                T[-1] += cost[bv] * T[i]

    def pivot(self, r, j):
        T = self.T
        support = np.nonzero(T[r])[0]
        T[r, support] = T[r, support] / T[r, j]
        col = T[:, j].copy()
        col[r] = 0
        nz = np.nonzero(col)[0]
        if len(nz):
            T[np.ix_(nz, support)] -= np.outer(col[nz], T[r, support])
        if T.dtype != object:
            T[:, j] = 0
            T[r, j] = 1
        self.basis[r] = j
        self.iterations += 1

    def entering(self, allowed):
        row = self.T[-1, :-1]
        candidates = np.nonzero(row[:allowed] < -self.eps)[0]
        return int(candidates[0]) if len(candidates) else None

    def leaving(self, j):
        T, eps = self.T, self.eps
        col = T[:-1, j]
        rows = np.nonzero(col > eps)[0]
        if len(rows) == 0:
            return None
        ratios = [T[i, -1] / T[i, j] for i in rows]
        best = min(ratios)
        slack = 0 if T.dtype == object else eps * max(1.0, abs(float(best)))
        tied = [i for i, q in zip(rows, ratios) if q <= best + slack]
        return min(tied, key=lambda i: self.basis[i])

    def run(self, allowed):
        while True:
            if self.iterations >= self.max_iter:
                raise NumericalBreakdown(f"simplex did not converge in {self.max_iter} pivots")
            j = self.entering(allowed)
            if j is None:
                return OPTIMAL
            r = self.leaving(j)
            if r is None:
                return UNBOUNDED
            self.pivot(r, j)
            if self.T.dtype != object:
                rhs = self.T[:-1, -1]
                if np.any(rhs < -1e-7):
                    raise NumericalBreakdown("basic solution lost feasibility")
                rhs[rhs < 0] = 0.0


def solve(lp: LinearProgram, backend: str = "float", max_iter: int | None = None) -> LPSolution:
    """Solve ``lp`` with the two-phase simplex method.

    Parameters
    ----------
    lp : LinearProgram
    backend : {"float", "rational"}
        The rational backend converts every input to an exact Fraction.
    max_iter : int, optional
        Pivot cap; exceeding it raises :class:`NumericalBreakdown`.
    """
    if backend not in ("float", "rational"):
        raise ValueError(f"unknown backend {backend!r}")
    A = _convert(lp.A, backend).copy()
    b = _convert(lp.b, backend).copy()
    c = _convert(lp.c, backend)
    lower = _convert(lp.lower, backend)
    m, n = A.shape
    zero = _rational(0) if backend == "rational" else 0.0
    one = _rational(1) if backend == "rational" else 1.0
    eps = 0 if backend == "rational" else FLOAT_EPS
    if lp.sense == "min":
        c = -c

    # shift to x' = x - lower >= 0, then make every right-hand side nonnegative
    rhs = b - A.dot(lower) if n else b.copy()
    rel = list(lp.relations)
    sign = np.ones(m, dtype=int)
    for i in range(m):
        if rhs[i] < 0:
            A[i] = -A[i]
            rhs[i] = -rhs[i]
            sign[i] = -1
            rel[i] = {"<=": ">=", ">=": "<=", "=": "="}[rel[i]]

    n_slack = sum(r != "=" for r in rel)
    n_art = sum(r != "<=" for r in rel)
    width = n + n_slack + n_art
    dtype = object if backend == "rational" else float
    T = np.empty((m + 1, width + 1), dtype=dtype)
    T[:] = zero
    T[:m, :n] = A
    T[:m, -1] = rhs
    basis = [0] * m
    identity_col = [0] * m
    s, a = n, n + n_slack
    for i, r in enumerate(rel):
        if r == "<=":
            T[i, s] = one
            basis[i] = identity_col[i] = s
            s += 1
        else:
            if r == ">=":
                T[i, s] = -one
                s += 1
            T[i, a] = one
            basis[i] = identity_col[i] = a
            a += 1

    original = T[:m, :width].copy() if backend == "float" else None
    if max_iter is None:
        max_iter = 50 * (m + width) + 1000
    tab = _Tableau(T, basis, eps, max_iter)
    art_start = n + n_slack

    if n_art:
        phase1 = np.empty(width, dtype=dtype)
        phase1[:] = zero
        phase1[art_start:] = -one
        tab.set_objective(phase1)
        tab.run(width)
        infeas = -tab.T[-1, -1]
        tol = 0 if backend == "rational" else 1e-9 * max(1.0, float(np.max(np.abs(rhs), initial=0)))
        if infeas > tol:
            return LPSolution(INFEASIBLE, iterations=tab.iterations, backend=backend)
        # drive zero-level artificials out of the basis, dropping redundant rows
        keep = []
        for i in range(m):
            if tab.basis[i] >= art_start:
                row = tab.T[i, :art_start]
                cand = np.nonzero(np.abs(row) > eps)[0] if dtype is float else \
                    [k for k, v in enumerate(row) if v != 0]
                if len(cand):
                    tab.pivot(i, int(cand[0]))
                    keep.append(i)
            else:
                keep.append(i)
        dropped = [i for i in range(m) if i not in keep]
        if dropped:
            tab.T = np.delete(tab.T, dropped, axis=0)
            tab.basis = [tab.basis[i] for i in keep]
    else:
        keep = list(range(m))

    cost = np.empty(width, dtype=dtype)
    cost[:] = zero
    cost[:n] = c
    tab.set_objective(cost)
    status = tab.run(art_start)
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED, iterations=tab.iterations, backend=backend)

    xs = np.empty(width, dtype=dtype)
    xs[:] = zero
    for i, bv in enumerate(tab.basis):
        xs[bv] = tab.T[i, -1]
    duals = np.empty(m, dtype=dtype)
    duals[:] = zero
    for i in range(m):
        duals[i] = int(sign[i]) * tab.T[-1, identity_col[i]]
    if backend == "float":
        _refine(original, rhs, cost, keep, tab.basis, sign, xs, duals)
        value = float(cost @ xs)
    else:
        value = tab.T[-1, -1]
    x = xs[:n] + lower
    if n:
        value = value + c.dot(lower)
    if lp.sense == "min":
        value = -value
        duals = -duals

    if backend == "rational":
        x, duals = _to_fractions(x), _to_fractions(duals)
        value = Fraction(int(value.numerator), int(value.denominator))
    sol = LPSolution(OPTIMAL, value, x, list(tab.basis), duals, tab.iterations, backend)
    if backend == "float":
        _check_residuals(lp, sol)
    return sol


def _refine(W, rhs, cost, keep, basis, sign, xs, duals):
    """Recompute the final basic solution from the original data.

    Hundreds of float pivots accumulate rounding error in the tableau; one
    solve with the optimal basis matrix restores full accuracy.  The
    tableau values are kept if the basis matrix is numerically singular.
    """
    B = W[np.ix_(keep, basis)]
    try:
        xb = np.linalg.solve(B, rhs[keep])
        y = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError:
        return
    if not (np.all(np.isfinite(xb)) and np.all(np.isfinite(y))) or np.min(xb) < -1e-9:
        return
    xs[:] = 0.0
    xs[basis] = np.clip(xb, 0.0, None)
    duals[:] = 0.0
    duals[keep] = sign[keep] * y


def residuals(lp: LinearProgram, x) -> np.ndarray:
    """Signed constraint violations (positive means violated)."""
    x = np.asarray(x, dtype=float)
    Ax = np.asarray(lp.A, dtype=float) @ x
    b = np.asarray(lp.b, dtype=float)
    out = np.empty(len(b))
    for i, r in enumerate(lp.relations):
        if r == "<=":
            out[i] = Ax[i] - b[i]
        elif r == ">=":
            out[i] = b[i] - Ax[i]
        else:
            out[i] = abs(Ax[i] - b[i])
    return out


def _check_residuals(lp, sol):
    x = np.asarray(sol.x, dtype=float)
    worst = max(float(np.max(residuals(lp, x), initial=0.0)),
                float(np.max(np.asarray(lp.lower, dtype=float) - x, initial=0.0)))
    if worst > RESIDUAL_TOL:
        raise NumericalBreakdown(f"float solution violates constraints by {worst:.3g}")
    c = np.asarray(lp.c, dtype=float)
    if abs(c @ x - float(sol.value)) > RESIDUAL_TOL * max(1.0, abs(float(sol.value))):
        raise NumericalBreakdown("objective value is inconsistent with the primal point")


def verify_duality(primal: LinearProgram, dual: LinearProgram, backend: str = "float") -> DualityReport:
    """Solve a primal/dual pair and report the gap between their optimal values."""
    p = solve(primal, backend)
    d = solve(dual, backend)
    if not (p.optimal and d.optimal):
        raise StatusMismatch(f"primal is {p.status}, dual is {d.status}")
    return DualityReport(p.value, d.value, p.value - d.value, backend)
