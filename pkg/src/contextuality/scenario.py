"""Measurement scenarios, assignment enumeration and the incidence matrix.

A scenario is the triple of measurements, contexts (sets of jointly
performable measurements) and a shared outcome set.  Every enumeration here
uses one canonical order: measurements and outcomes as declared, assignments
lexicographic with the first measurement varying slowest.  The LP column and
row orders are derived from it, so optimal vertices are reproducible.
"""
from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidScenario, SizeLimitExceeded

#: Default cap on the number of global assignments |O|^|X|.
DEFAULT_SIZE_LIMIT = 2**20
#: Default cap on the number of incidence-matrix entries m * n.
DEFAULT_ENTRY_LIMIT = 2**26


@dataclass(frozen=True)
class MeasurementScenario:
    """The triple <X, M, O>.

    Contexts are stored as tuples of measurement labels, reordered to follow
    the declared measurement order.  Nested or overlapping contexts are kept
    as given.
    """

    measurements: tuple
    outcomes: tuple
    contexts: tuple
    _index: dict = field(init=False, repr=False, compare=False)

    def __init__(self, measurements: Iterable, outcomes: Iterable,
                 contexts: Iterable[Iterable]):
        measurements = tuple(measurements)
        outcomes = tuple(outcomes)
        if len(set(measurements)) != len(measurements):
            raise InvalidScenario("measurement labels must be distinct")
        if len(set(outcomes)) != len(outcomes):
            raise InvalidScenario("outcome labels must be distinct")
        if not outcomes:
            raise InvalidScenario("the outcome set must be nonempty")
        index = {x: i for i, x in enumerate(measurements)}
        ordered = []
        for ctx in contexts:
            ctx = list(ctx)
            if not ctx:
                raise InvalidScenario("contexts must be nonempty")
            unknown = [x for x in ctx if x not in index]
            if unknown:
                raise InvalidScenario(f"context mentions unknown measurements {unknown}")
            if len(set(ctx)) != len(ctx):
                raise InvalidScenario(f"context {ctx} repeats a measurement")
            ordered.append(tuple(sorted(ctx, key=index.__getitem__)))
        if len(set(ordered)) != len(ordered):
            raise InvalidScenario("contexts must be distinct")
        covered = {x for ctx in ordered for x in ctx}
        missing = [x for x in measurements if x not in covered]
        if missing:
            raise InvalidScenario(f"measurements {missing} lie in no context")
        object.__setattr__(self, "measurements", measurements)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "contexts", tuple(ordered))
        object.__setattr__(self, "_index", index)

    def __hash__(self):
        return hash((self.measurements, self.outcomes, self.contexts))

    @property
    def n_outcomes(self) -> int:
        return len(self.outcomes)

    @property
    def n_global(self) -> int:
        """Number of global assignments, n = |O|^|X|."""
        return len(self.outcomes) ** len(self.measurements)

    @property
    def context_sizes(self) -> tuple:
        return tuple(len(self.outcomes) ** len(c) for c in self.contexts)

    @property
    def n_local(self) -> int:
        """Number of local assignments, m = sum over contexts of |O|^|C|."""
        return sum(self.context_sizes)

    @property
    def offsets(self) -> np.ndarray:
        """Start row of each context block in the canonical vector."""
        return np.concatenate([[0], np.cumsum(self.context_sizes)[:-1]]).astype(int)

    def measurement_index(self, x) -> int:
        return self._index[x]

    def context_index(self, context: Iterable) -> int:
        key = set(context)
        for i, ctx in enumerate(self.contexts):
            if set(ctx) == key:
                return i
        raise KeyError(f"{sorted(key, key=str)} is not a context")

    def covering_context(self, subset: Iterable) -> int:
        """Index of the first context containing ``subset``."""
        subset = set(subset)
        for i, ctx in enumerate(self.contexts):
            if subset <= set(ctx):
                return i
        raise KeyError(f"no context contains {sorted(subset, key=str)}")

    def local_assignments(self, context_index: int) -> list:
        """Outcome tuples of one context in lexicographic order."""
        k = len(self.contexts[context_index])
        return list(itertools.product(self.outcomes, repeat=k))

    def to_dict(self) -> dict:
        return {
            "measurements": list(self.measurements),
            "outcomes": list(self.outcomes),
            "contexts": [list(c) for c in self.contexts],
        }


@dataclass(frozen=True)
class LocalAssignment:
    context_index: int
    assignment: Mapping

    def key(self, scenario: MeasurementScenario) -> str:
        ctx = scenario.contexts[self.context_index]
        return ",".join(str(self.assignment[x]) for x in ctx)


@dataclass(frozen=True)
class GlobalAssignment:
    assignment: Mapping

    def restrict(self, context: Iterable) -> tuple:
        return tuple(self.assignment[x] for x in context)


@dataclass(frozen=True)
class IncidenceMatrix:
    """The m x n 0/1 restriction matrix.

    ``matrix[r, g]`` is 1 exactly when global assignment ``g`` restricts to
    local assignment ``r``.  ``codes[g]`` holds the outcome indices of
    global assignment ``g`` (one column per measurement).
    """

    scenario: MeasurementScenario
    matrix: np.ndarray
    codes: np.ndarray

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


def bell_scenario(parties: int, settings: int = 2, outcomes: int = 2) -> MeasurementScenario:
    """The (n, k, l) Bell scenario.

    Party ``j`` is named by the j-th lowercase letter and its measurements
    are ``a1, a2, ...``.  Contexts pick one setting per party and are listed
    with the first party's setting most significant, so for two parties the
    order is a1b1, a1b2, a2b1, a2b2.
    """
    if parties < 1 or parties > 26:
        raise InvalidScenario("between 1 and 26 parties are supported")
    letters = string.ascii_lowercase[:parties]
    names = [[f"{p}{k + 1}" for k in range(settings)] for p in letters]
    measurements = [x for party in names for x in party]
    contexts = itertools.product(*names)
    return MeasurementScenario(measurements, [str(o) for o in range(outcomes)], contexts)


def check_size(count: int, limit: int | None, what: str) -> None:
    limit = DEFAULT_SIZE_LIMIT if limit is None else limit
    if count > limit:
        raise SizeLimitExceeded(f"{what}: {count} exceeds the size guard {limit}")


def global_codes(scn: MeasurementScenario, limit: int | None = None) -> np.ndarray:
    """Outcome-index array of shape (|O|^|X|, |X|) in canonical order."""
    check_size(scn.n_global, limit, "global assignments")
    k, d = len(scn.measurements), scn.n_outcomes
    idx = np.arange(d**k)
    powers = d ** np.arange(k - 1, -1, -1)
    return (idx[:, None] // powers[None, :]) % d


def enumerate_global_assignments(scn: MeasurementScenario, limit: int | None = None) -> list:
    codes = global_codes(scn, limit)
    return [
        GlobalAssignment({x: scn.outcomes[c] for x, c in zip(scn.measurements, row)})
        for row in codes
    ]


def enumerate_local_assignments(scn: MeasurementScenario) -> list:
    out = []
    for i, ctx in enumerate(scn.contexts):
        for s in scn.local_assignments(i):
            out.append(LocalAssignment(i, dict(zip(ctx, s))))
    return out


def local_rows(scn: MeasurementScenario, codes: np.ndarray) -> np.ndarray:
    """Row index, per context, of each global assignment's restriction.

    Returns an integer array of shape (len(codes), |M|).
    """
    d = scn.n_outcomes
    rows = np.empty((codes.shape[0], len(scn.contexts)), dtype=np.int64)
    for c, (ctx, off) in enumerate(zip(scn.contexts, scn.offsets)):
        cols = [scn.measurement_index(x) for x in ctx]
        powers = d ** np.arange(len(cols) - 1, -1, -1)
        rows[:, c] = off + codes[:, cols] @ powers
    return rows


def build_incidence_matrix(scn: MeasurementScenario, limit: int | None = None,
                           entry_limit: int | None = None) -> IncidenceMatrix:
    codes = global_codes(scn, limit)
    m, n = scn.n_local, codes.shape[0]
    check_size(m * n, DEFAULT_ENTRY_LIMIT if entry_limit is None else entry_limit,
               "incidence matrix entries")
    matrix = np.zeros((m, n), dtype=np.uint8)
    rows = local_rows(scn, codes)
    cols = np.broadcast_to(np.arange(n)[:, None], rows.shape)
    matrix[rows.ravel(), cols.ravel()] = 1
    return IncidenceMatrix(scn, matrix, codes)


def assignment_codes(scn: MeasurementScenario, assignment: Mapping | Sequence) -> np.ndarray:
    """Outcome indices of a global assignment given as a mapping or sequence."""
    if isinstance(assignment, GlobalAssignment):
        assignment = assignment.assignment
    if isinstance(assignment, Mapping):
        values = [assignment[x] for x in scn.measurements]
    else:
        values = list(assignment)
        if len(values) != len(scn.measurements):
            raise InvalidScenario("global assignment must be total on the measurements")
    lookup = {o: i for i, o in enumerate(scn.outcomes)}
    return np.array([lookup[v] for v in values], dtype=np.int64)
