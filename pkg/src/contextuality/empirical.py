"""Empirical models: per-context probability tables over a scenario.

Tables are 1-D arrays in the canonical lexicographic order of each
context's local assignments.  A model whose entries are all
:class:`fractions.Fraction` is *exact*; exact models carry an object-dtype
array and are solved with the rational LP backend downstream.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainMismatch, InvalidModel, ScenarioMismatch
from .lp import to_fraction
from .scenario import (
    MeasurementScenario,
    assignment_codes,
    check_size,
    global_codes,
    local_rows,
)

log = logging.getLogger(__name__)

#: Validation tolerance for hand-entered (rational or decimal) tables.
EXACT_TOL = 1e-9
#: Validation tolerance for tables produced by floating-point Born-rule evaluation.
QUANTUM_TOL = 1e-7


def as_probability_array(values: Iterable) -> np.ndarray:
    """Coerce to an exact object array if every entry is rational, else float."""
    values = list(values)
    if values and all(isinstance(v, (Fraction, int, np.integer)) and not isinstance(v, bool)
                      for v in values):
        return np.array([to_fraction(v) for v in values], dtype=object)
    return np.array([float(v) for v in values], dtype=float)


def is_exact(arr: np.ndarray) -> bool:
    return arr.dtype == object


def marginalize(table: Sequence, context: Sequence, subset: Iterable, n_outcomes: int) -> np.ndarray:
    """Marginal of a context table onto ``subset``.

    ``table`` is indexed lexicographically by outcome tuples over
    ``context``; the result is indexed the same way over the measurements of
    ``subset`` taken in context order.
    """
    context = list(context)
    subset = set(subset)
    if not subset <= set(context):
        raise DomainMismatch(f"{sorted(subset, key=str)} is not contained in {context}")
    arr = np.asarray(table)
    tensor = arr.reshape((n_outcomes,) * len(context))
    drop = tuple(i for i, x in enumerate(context) if x not in subset)
    if drop:
        tensor = tensor.sum(axis=drop)
    return np.asarray(tensor).reshape(-1)


@dataclass
class SignallingReport:
    passed: bool
    worst: float
    pair: tuple | None = None
    overlap: tuple = ()

    def __bool__(self):
        return self.passed


@dataclass(frozen=True)
class SubDistribution:
    """Nonnegative weights on a finite carrier, total weight at most 1."""

    weights: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for k, w in self.weights.items():
            if w < 0:
                raise InvalidModel(f"negative weight {w} at {k!r}")
        if self.weight > 1 + EXACT_TOL:
            raise InvalidModel(f"subdistribution weight {self.weight} exceeds 1")

    @property
    def weight(self):
        return sum(self.weights.values(), 0)

    @property
    def support(self) -> list:
        return [k for k, w in self.weights.items() if w > 0]

    def __getitem__(self, key):
        return self.weights.get(key, 0)

    def __len__(self):
        return len(self.weights)


class EmpiricalModel:
    """A family of context distributions with compatible marginals.

    Parameters
    ----------
    scenario : MeasurementScenario
    tables : sequence of sequences
        One table per context, ordered as ``scenario.contexts``.
    tol : float
        Normalisation, positivity and no-signalling tolerance.  Entries in
        ``[-tol, 0)`` are clamped to zero with a warning.
    validate : bool
        Skip the no-signalling check when False (used internally for
        intermediate results that are checked separately).
    """

    def __init__(self, scenario: MeasurementScenario, tables: Sequence[Sequence],
                 tol: float = EXACT_TOL, validate: bool = True):
        tables = list(tables)
        if len(tables) != len(scenario.contexts):
            raise InvalidModel(f"expected {len(scenario.contexts)} tables, got {len(tables)}")
        arrays = [as_probability_array(t) for t in tables]
        if not all(is_exact(a) for a in arrays):
            arrays = [a.astype(float) for a in arrays]
        clamped = False
        for i, (a, size) in enumerate(zip(arrays, scenario.context_sizes)):
            if a.shape != (size,):
                raise InvalidModel(f"table {i} has {a.size} entries, expected {size}")
            low = min(a)
            if low < -tol:
                raise InvalidModel(f"table {i} has negative entry {low}")
            if low < 0:
                a[a < 0] = 0
                clamped = True
            total = sum(a)
            if abs(total - 1) > tol:
                raise InvalidModel(f"table {i} sums to {total}, not 1")
        if clamped:
            warnings.warn("clamped small negative probabilities to zero", RuntimeWarning,
                          stacklevel=2)
        for a in arrays:
            a.setflags(write=False)
        self.scenario = scenario
        self.tables = tuple(arrays)
        self.tol = tol
        if validate:
            report = check_no_signalling(self, tol)
            if not report:
                raise InvalidModel(
                    f"marginals of contexts {report.pair} disagree on {report.overlap} "
                    f"by {report.worst:.3g}")

    @property
    def exact(self) -> bool:
        return is_exact(self.tables[0])

    def table(self, context) -> np.ndarray:
        if not isinstance(context, (int, np.integer)):
            context = self.scenario.context_index(context)
        return self.tables[context]

    def prob(self, context, outcomes: Sequence) -> float:
        """Probability of a joint outcome tuple given in context order."""
        idx = self.scenario.context_index(context) if not isinstance(context, int) else context
        ctx = self.scenario.contexts[idx]
        if len(outcomes) != len(ctx):
            raise DomainMismatch("outcome tuple length differs from context size")
        d = self.scenario.n_outcomes
        lookup = {o: i for i, o in enumerate(self.scenario.outcomes)}
        flat = 0
        for o in outcomes:
            flat = flat * d + lookup[o]
        return self.tables[idx][flat]

    def marginal(self, subset: Iterable) -> np.ndarray:
        """Marginal onto any subset of a context (taken from the first covering context)."""
        subset = list(subset)
        i = self.scenario.covering_context(subset)
        return marginalize(self.tables[i], self.scenario.contexts[i], subset,
                           self.scenario.n_outcomes)

    def as_float(self) -> "EmpiricalModel":
        if not self.exact:
            return self
        return EmpiricalModel(self.scenario, [t.astype(float) for t in self.tables],
                              tol=self.tol, validate=False)

    def __eq__(self, other):
        if not isinstance(other, EmpiricalModel) or other.scenario != self.scenario:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.tables, other.tables))

    def allclose(self, other: "EmpiricalModel", atol: float = 1e-9) -> bool:
        if other.scenario != self.scenario:
            return False
        return bool(np.max(np.abs(to_vector(self).astype(float)
                                  - to_vector(other).astype(float))) <= atol)

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return (f"EmpiricalModel({len(self.scenario.measurements)} measurements, "
                f"{len(self.scenario.contexts)} contexts, {kind})")


def check_no_signalling(e: EmpiricalModel, tol: float = EXACT_TOL) -> SignallingReport:
    scn = e.scenario
    worst, worst_pair, worst_overlap = 0.0, None, ()
    for i, j in combinations(range(len(scn.contexts)), 2):
        overlap = [x for x in scn.contexts[i] if x in set(scn.contexts[j])]
        if not overlap:
            continue
        mi = marginalize(e.tables[i], scn.contexts[i], overlap, scn.n_outcomes)
        mj = marginalize(e.tables[j], scn.contexts[j], overlap, scn.n_outcomes)
        gap = float(max(abs(a - b) for a, b in zip(mi, mj)))
        if gap > worst:
            worst, worst_pair, worst_overlap = gap, (i, j), tuple(overlap)
    return SignallingReport(worst <= tol, worst, worst_pair, worst_overlap)


def to_vector(e: EmpiricalModel) -> np.ndarray:
    """The model vector v^e: context tables concatenated in canonical order."""
    return np.concatenate(e.tables)


def from_vector(scn: MeasurementScenario, vector: Sequence, tol: float = EXACT_TOL,
                validate: bool = True) -> EmpiricalModel:
    vector = np.asarray(vector)
    bounds = np.concatenate([scn.offsets, [scn.n_local]])
    tables = [vector[a:b] for a, b in zip(bounds[:-1], bounds[1:])]
    return EmpiricalModel(scn, tables, tol=tol, validate=validate)


def deterministic_model(scn: MeasurementScenario, g) -> EmpiricalModel:
    """Point masses at the restrictions of the global assignment ``g``."""
    codes = assignment_codes(scn, g)
    rows = local_rows(scn, codes[None, :])[0]
    vec = np.zeros(scn.n_local, dtype=object)
    vec[:] = Fraction(0)
    vec[rows] = Fraction(1)
    return from_vector(scn, vec)


def uniform_model(scn: MeasurementScenario) -> EmpiricalModel:
    return EmpiricalModel(scn, [[Fraction(1, size)] * size for size in scn.context_sizes])


def mix(e1: EmpiricalModel, e2: EmpiricalModel, lam) -> EmpiricalModel:
    """The convex combination lam*e1 + (1-lam)*e2."""
    if e1.scenario != e2.scenario:
        raise ScenarioMismatch("mixing requires a common scenario")
    if not 0 <= lam <= 1:
        raise ValueError("mixing weight must lie in [0, 1]")
    if isinstance(lam, float) or not (e1.exact and e2.exact):
        v1, v2, lam = to_vector(e1.as_float()), to_vector(e2.as_float()), float(lam)
    else:
        v1, v2, lam = to_vector(e1), to_vector(e2), Fraction(lam)
    return from_vector(e1.scenario, lam * v1 + (1 - lam) * v2, tol=max(e1.tol, e2.tol))


def support_sets(e: EmpiricalModel, tol: float = EXACT_TOL) -> list:
    return [np.asarray(t, dtype=float) > tol for t in e.tables]


def possible_global_assignments(e: EmpiricalModel, tol: float = EXACT_TOL,
                                limit: int | None = None) -> np.ndarray:
    """Codes of global assignments consistent with every context's support."""
    scn = e.scenario
    check_size(scn.n_global, limit, "global assignments")
    codes = global_codes(scn, limit)
    rows = local_rows(scn, codes)
    vec = np.asarray(to_vector(e), dtype=float)
    ok = np.all(vec[rows] > tol, axis=1)
    return codes[ok]


def is_strongly_contextual(e: EmpiricalModel, tol: float = EXACT_TOL,
                           limit: int | None = None) -> bool:
    """True when no global assignment is possible in every context.

    Decided by a direct search over global assignments, independently of the
    LP route to the contextual fraction.
    """
    return len(possible_global_assignments(e, tol, limit)) == 0
