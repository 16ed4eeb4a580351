"""Generalised Bell inequalities in local-assignment coefficient form.

An inequality is a coefficient vector ``a`` over the canonical local
assignments of a scenario together with a bound ``R``; it reads
``a . v^e <= R``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping

import numpy as np

from .empirical import EmpiricalModel, marginalize, to_vector
from .errors import ScenarioMismatch, TrivialInequality
from .lp import LinearProgram, solve
from .scenario import MeasurementScenario, global_codes, local_rows

#: Equality tolerance when deciding whether a vertex saturates the bound.
TIGHT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BellInequality:
    scenario: MeasurementScenario
    coefficients: np.ndarray
    bound: object = 0

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients)
        if coeffs.shape != (self.scenario.n_local,):
            raise ValueError(f"expected {self.scenario.n_local} coefficients")
        if self.bound < 0:
            raise ValueError("the bound R must be nonnegative")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def algebraic_bound(self):
        return algebraic_bound(self)

    @property
    def is_trivial(self) -> bool:
        """True when ``||a|| <= R``, i.e. every model satisfies the inequality."""
        return algebraic_bound(self) <= self.bound

    def blocks(self) -> list:
        scn = self.scenario
        bounds = list(scn.offsets) + [scn.n_local]
        return [self.coefficients[a:b] for a, b in zip(bounds[:-1], bounds[1:])]

    def to_dict(self, model: EmpiricalModel | None = None) -> dict:
        scn = self.scenario
        entries = []
        for c, block in enumerate(self.blocks()):
            for s, value in zip(scn.local_assignments(c), block):
                entries.append({"context": c, "assignment": ",".join(map(str, s)),
                                "value": float(value)})
        out = {"bound": float(self.bound), "coefficients": entries,
               "algebraic_bound": float(algebraic_bound(self))}
        if model is not None and not self.is_trivial:
            out["normalized_violation"] = float(normalized_violation(self, model))
        return out


def evaluate(ineq: BellInequality, e: EmpiricalModel):
    """The left-hand side a . v^e."""
    if e.scenario != ineq.scenario:
        raise ScenarioMismatch("inequality and model live on different scenarios")
    v = to_vector(e)
    a = ineq.coefficients
    if a.dtype != object or v.dtype != object:
        return float(np.asarray(a, dtype=float) @ np.asarray(v, dtype=float))
    return a.dot(v)


def algebraic_bound(ineq: BellInequality):
    """Sum over contexts of the largest coefficient in that context."""
    return sum(max(block) for block in ineq.blocks())


def normalized_violation(ineq: BellInequality, e: EmpiricalModel):
    excess = algebraic_bound(ineq) - ineq.bound
    if excess <= 0:
        raise TrivialInequality("the algebraic bound does not exceed the bound R")
    return max(0, evaluate(ineq, e) - ineq.bound) / excess


def vertex_values(ineq: BellInequality, limit: int | None = None) -> np.ndarray:
    """a . v^{delta_g} for every global assignment g, in canonical order."""
    scn = ineq.scenario
    rows = local_rows(scn, global_codes(scn, limit))
    a = ineq.coefficients
    if a.dtype == object:
        return np.array([sum(a[r]) for r in rows], dtype=object)
    return a[rows].sum(axis=1)


def is_bell_inequality(ineq: BellInequality, tol: float = TIGHT_TOL, limit: int | None = None) -> bool:
    """True when every deterministic non-contextual model satisfies the inequality.

    Deterministic models are the vertices of the non-contextual polytope, so
    checking them all is sufficient.
    """
    values = vertex_values(ineq, limit)
    slack = 0 if values.dtype == object else tol
    return bool(max(values) <= ineq.bound + slack)


def is_tight(ineq: BellInequality, tol: float = TIGHT_TOL, limit: int | None = None) -> bool:
    """True when some deterministic model attains the bound (and none exceeds it)."""
    values = vertex_values(ineq, limit)
    slack = 0 if values.dtype == object else tol
    top = max(values)
    return bool(top <= ineq.bound + slack and abs(top - ineq.bound) <= slack)


def no_signalling_program(ineq: BellInequality, backend: str = "float") -> LinearProgram:
    """LP maximising a . v over the no-signalling polytope of the scenario."""
    scn = ineq.scenario
    m = scn.n_local
    rows, rhs, rel = [], [], []
    bounds = list(scn.offsets) + [m]
    for c in range(len(scn.contexts)):
        row = np.zeros(m)
        row[bounds[c]:bounds[c + 1]] = 1
        rows.append(row)
        rhs.append(1)
        rel.append("=")
    d = scn.n_outcomes
    for i, j in combinations(range(len(scn.contexts)), 2):
        ci, cj = scn.contexts[i], scn.contexts[j]
        overlap = [x for x in ci if x in set(cj)]
        if not overlap:
            continue
        # marginal operators: indicator of each local assignment's restriction
        pi = _marginal_operator(ci, overlap, d)
        pj = _marginal_operator(cj, overlap, d)
        for t in range(pi.shape[0]):
            row = np.zeros(m)
            row[bounds[i]:bounds[i + 1]] += pi[t]
            row[bounds[j]:bounds[j + 1]] -= pj[t]
            rows.append(row)
            rhs.append(0)
            rel.append("=")
    c = ineq.coefficients
    if backend == "float":
        c = np.asarray(c, dtype=float)
    return LinearProgram(c, np.array(rows), rhs, rel, "max")


def _marginal_operator(context, subset, d):
    size = d ** len(context)
    eye = np.eye(size)
    return np.stack([marginalize(eye[:, k], context, subset, d) for k in range(size)], axis=1)


def max_no_signalling_value(ineq: BellInequality, backend: str = "float"):
    """Largest value of a . v attained by any no-signalling model."""
    sol = solve(no_signalling_program(ineq, backend), backend)
    return sol.value


def from_correlators(scn: MeasurementScenario, terms: Mapping, bound) -> BellInequality:
    """Convert a correlator-form inequality to local-assignment coefficients.

    ``terms`` maps a context (any iterable of measurement labels) to the
    coefficient of its correlator E_C = sum_s (-1)^(sum of outcome indices) e_C(s).
    Requires two outcomes.
    """
    if scn.n_outcomes != 2:
        raise ValueError("correlator form needs binary outcomes")
    coeffs = [Fraction(0)] * scn.n_local
    for ctx, weight in terms.items():
        c = scn.context_index(ctx)
        off = scn.offsets[c]
        for k in range(scn.context_sizes[c]):
            parity = bin(k).count("1") % 2
            coeffs[off + k] = Fraction(weight) * (1 if parity == 0 else -1)
    return BellInequality(scn, np.array(coeffs, dtype=object), Fraction(bound))


def chsh_inequality(scn: MeasurementScenario, bound=2) -> BellInequality:
    """E11 + E12 + E21 - E22 <= bound on the (2,2,2) Bell scenario."""
    c = scn.contexts
    return from_correlators(scn, {c[0]: 1, c[1]: 1, c[2]: 1, c[3]: -1}, bound)
