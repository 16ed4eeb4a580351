"""Non-contextual fraction, its dual witness inequality and the NC/SC decomposition.

The primal program maximises the weight ``1 . b`` of a subprobability
distribution ``b`` on global assignments subject to ``M b <= v^e``.  Its
symmetric dual minimises ``y . v^e`` subject to ``M^T y >= 1, y >= 0``; the
shift ``a = 1/|M| - y`` turns a dual optimum into a Bell inequality with
bound 0 whose normalised violation by ``e`` is the contextual fraction.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bell import BellInequality, evaluate, max_no_signalling_value
from .empirical import (QUANTUM_TOL, EmpiricalModel, SubDistribution, from_vector,
                        is_strongly_contextual, to_vector)
from .errors import DegenerateDecomposition, PreconditionViolated
from .lp import LinearProgram, solve, to_fraction
from .scenario import IncidenceMatrix, build_incidence_matrix

#: Weight below which a decomposition part is considered absent.
DEGENERACY_DELTA = 1e-9
#: Float entries at or below this are treated as zero by the presolve.
PRESOLVE_FLOOR = 1e-13
#: Tolerance for "cf is zero" when flagging trivial witnesses.
ZERO_TOL = 1e-9


def default_backend(e: EmpiricalModel) -> str:
    return "rational" if e.exact else "float"


@dataclass
class FractionResult:
    ncf: object
    cf: object
    b: SubDistribution
    b_vector: np.ndarray
    incidence: IncidenceMatrix = field(repr=False)
    backend: str = "float"

    @property
    def lam(self):
        return self.ncf


@dataclass
class Decomposition:
    ncf: object
    noncontextual: EmpiricalModel | None
    strongly_contextual: EmpiricalModel | None
    degenerate: bool = False

    @property
    def cf(self):
        return 1 - self.ncf

    def recombined(self) -> np.ndarray:
        v = 0
        if self.noncontextual is not None:
            v = v + float(self.ncf) * to_vector(self.noncontextual).astype(float)
        if self.strongly_contextual is not None:
            v = v + float(self.cf) * to_vector(self.strongly_contextual).astype(float)
        return np.asarray(v, dtype=float)


@dataclass(frozen=True, eq=False)
class WitnessInequality(BellInequality):
    """Bell inequality extracted from the dual program.

    ``trivial_witness`` is set when the model is non-contextual and the
    inequality is not violated by any no-signalling model either.
    """

    dual_value: object = None
    y: np.ndarray | None = field(default=None, repr=False)
    trivial_witness: bool = False


def _prepare(e, backend, limit):
    backend = backend or default_backend(e)
    inc = build_incidence_matrix(e.scenario, limit)
    v = to_vector(e)
    if backend == "float":
        v = np.asarray(v, dtype=float)
    elif v.dtype != object:
        v = np.array([to_fraction(x) for x in v], dtype=object)
    return backend, inc, v


def primal_program(e: EmpiricalModel, backend: str | None = None, limit=None) -> LinearProgram:
    """The fraction LP: maximise 1.b subject to M b <= v^e, b >= 0."""
    backend, inc, v = _prepare(e, backend, limit)
    return LinearProgram(np.ones(inc.n, dtype=int), inc.matrix, v, "<=", "max")


def dual_program(e: EmpiricalModel, backend: str | None = None, limit=None) -> LinearProgram:
    """Minimise y.v^e subject to M^T y >= 1, y >= 0."""
    backend, inc, v = _prepare(e, backend, limit)
    return LinearProgram(v, inc.matrix.T, np.ones(inc.n, dtype=int), ">=", "min")


def noncontextual_fraction(e: EmpiricalModel, backend: str | None = None,
                           presolve: bool = True, limit: int | None = None) -> FractionResult:
    """Solve the primal fraction LP.

    With ``presolve`` the global assignments that touch a zero-probability
    local assignment are fixed at zero before solving (they can carry no
    weight in any feasible ``b``), as are the then-empty rows.
    """
    backend, inc, v = _prepare(e, backend, limit)
    M = inc.matrix
    cols = np.arange(inc.n)
    rows = np.arange(inc.m)
    if presolve:
        floor = 0 if backend == "rational" else PRESOLVE_FLOOR
        zero_rows = np.array([x <= floor for x in v])
        cols = np.nonzero(~np.any(M[zero_rows], axis=0))[0]
        rows = np.nonzero(~zero_rows)[0]
    b = np.zeros(inc.n, dtype=object if backend == "rational" else float)
    if backend == "rational":
        b[:] = Fraction(0)
    if len(cols):
        lp = LinearProgram(np.ones(len(cols), dtype=int), M[np.ix_(rows, cols)], v[rows],
                           "<=", "max")
        sol = solve(lp, backend)
        # fraction LPs are feasible (b = 0) and bounded (0 <= b <= 1)
        assert sol.optimal, sol.status
        b[cols] = sol.x
        ncf = sol.value
    else:
        ncf = Fraction(0) if backend == "rational" else 0.0
    if backend == "float":
        b = np.clip(b, 0.0, None)
        ncf = float(min(max(ncf, 0.0), 1.0))
    outcomes = e.scenario.outcomes
    weights = {tuple(outcomes[k] for k in inc.codes[g]): b[g] for g in np.nonzero(b)[0]}
    return FractionResult(ncf, 1 - ncf, SubDistribution(weights), b, inc, backend)


def contextual_fraction(e: EmpiricalModel, backend: str | None = None) -> object:
    return noncontextual_fraction(e, backend).cf


def dual_solution(e: EmpiricalModel, backend: str | None = None, limit=None):
    """Optimal ``y*`` and value of the dual program."""
    sol = solve(dual_program(e, backend, limit), backend or default_backend(e))
    assert sol.optimal, sol.status
    return sol.x, sol.value


def witnessing_inequality(e: EmpiricalModel, backend: str | None = None,
                          limit: int | None = None) -> WitnessInequality:
    """Bell inequality (bound 0) maximally violated by ``e``.

    Its normalised violation by ``e`` equals CF(e) and its algebraic bound is
    1 whenever ``e`` is contextual.
    """
    backend = backend or default_backend(e)
    y, value = dual_solution(e, backend, limit)
    k = len(e.scenario.contexts)
    if backend == "rational":
        a = np.array([Fraction(1, k) - yi for yi in y], dtype=object)
        zero = Fraction(0)
    else:
        a = 1.0 / k - np.asarray(y, dtype=float)
        zero = 0.0
    trivial = False
    if 1 - value <= ZERO_TOL:
        probe = BellInequality(e.scenario, a, zero)
        trivial = max_no_signalling_value(probe, backend) <= ZERO_TOL
    return WitnessInequality(e.scenario, a, zero, dual_value=value, y=y, trivial_witness=trivial)


def _clean(vec):
    if vec.dtype == object:
        return vec
    vec = np.asarray(vec, dtype=float)
    vec[(vec < 0) & (vec > -1e-9)] = 0.0
    return vec


def decompose(e: EmpiricalModel, result: FractionResult | None = None,
              delta: float = DEGENERACY_DELTA) -> Decomposition:
    """Split ``e`` as NCF(e) e^NC + CF(e) e^SC using the optimal ``b*``.

    A part whose weight is positive but below ``delta`` is omitted and a
    :class:`DegenerateDecomposition` warning is issued.
    """
    result = result or noncontextual_fraction(e)
    ncf, cf = result.ncf, result.cf
    M = result.incidence.matrix
    b = result.b_vector
    exact = result.backend == "rational"
    mb = M.astype(object).dot(b) if exact else M.astype(float) @ np.asarray(b, dtype=float)
    v = to_vector(e) if exact else np.asarray(to_vector(e), dtype=float)
    if exact and v.dtype != object:
        v = np.array([to_fraction(x) for x in v], dtype=object)
    tol = 0 if exact else QUANTUM_TOL
    degenerate = (0 < ncf < delta) or (0 < cf < delta)
    if degenerate:
        warnings.warn(f"decomposition part below {delta} omitted (ncf={float(ncf):.3g})",
                      DegenerateDecomposition, stacklevel=2)
    nc = sc = None
    if ncf >= delta:
        nc = from_vector(e.scenario, _clean(mb / ncf), tol=tol or QUANTUM_TOL)
    if cf >= delta:
        sc = from_vector(e.scenario, _clean((v - mb) / cf), tol=tol or QUANTUM_TOL)
    return Decomposition(ncf, nc, sc, degenerate)


@dataclass
class TightnessReport:
    noncontextual_value: float
    strongly_contextual_value: float
    tol: float

    @property
    def ok(self) -> bool:
        return (abs(self.noncontextual_value) <= self.tol
                and abs(self.strongly_contextual_value - 1) <= self.tol)


def check_tightness(e: EmpiricalModel, ineq: BellInequality, dec: Decomposition,
                    tol: float = 1e-6) -> TightnessReport:
    """The NC part saturates the witness (value 0), the SC part attains 1."""
    if not (0 < dec.ncf < 1) or dec.noncontextual is None or dec.strongly_contextual is None:
        raise PreconditionViolated("tightness needs 0 < CF(e) < 1")
    return TightnessReport(float(evaluate(ineq, dec.noncontextual)),
                           float(evaluate(ineq, dec.strongly_contextual)), tol)


def sc_part_is_strongly_contextual(dec: Decomposition, tol: float = 1e-7) -> bool:
    return dec.strongly_contextual is not None and is_strongly_contextual(
        dec.strongly_contextual, tol=tol)
