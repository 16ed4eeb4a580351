"""Operations on empirical models under which CF cannot increase.

Translation of measurements and coarse-graining of outcomes act on a single
model; mixing lives in :mod:`contextuality.empirical`; controlled choice and
product combine two models.  :func:`couple_subdistributions` is the interval
("quantile") coupling behind the lower bound for choice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .empirical import EmpiricalModel, SubDistribution, marginalize
from .errors import NotContextPreserving, OutcomeMismatch
from .scenario import MeasurementScenario, check_size


def _zeros(size, exact):
    if exact:
        out = np.empty(size, dtype=object)
        out[:] = Fraction(0)
        return out
    return np.zeros(size)


@dataclass(frozen=True)
class MeasurementTranslation:
    """A context-preserving map ``f`` from source measurements to target measurements."""

    source: MeasurementScenario
    target: MeasurementScenario
    mapping: Mapping

    def __post_init__(self):
        if self.source.outcomes != self.target.outcomes:
            raise OutcomeMismatch("translation needs a shared outcome set")
        missing = [x for x in self.source.measurements if x not in self.mapping]
        if missing:
            raise NotContextPreserving(f"map is undefined on {missing}")
        bad = [x for x in self.source.measurements if self.mapping[x] not in self.target._index]
        if bad:
            raise NotContextPreserving(f"{bad} map outside the target measurements")
        for ctx in self.source.contexts:
            try:
                self.target.covering_context(self.image(ctx))
            except KeyError:
                raise NotContextPreserving(
                    f"image of context {ctx} lies in no target context") from None

    def image(self, context: Sequence) -> list:
        """f(C) as a list in target measurement order."""
        targets = {self.mapping[x] for x in context}
        return sorted(targets, key=self.target.measurement_index)


def translate(f: MeasurementTranslation, e: EmpiricalModel) -> EmpiricalModel:
    """Pull ``e`` (on the target scenario) back along ``f`` to the source scenario."""
    if e.scenario != f.target:
        raise NotContextPreserving("model does not live on the translation's target scenario")
    scn, d = f.source, f.source.n_outcomes
    tables = []
    for ctx in scn.contexts:
        image = f.image(ctx)
        cover = f.target.covering_context(image)
        t = marginalize(e.tables[cover], f.target.contexts[cover], image, d)
        pos = [image.index(f.mapping[x]) for x in ctx]
        out = _zeros(d ** len(ctx), e.exact)
        for k, t_codes in enumerate(itertools.product(range(d), repeat=len(image))):
            flat = 0
            for p in pos:
                flat = flat * d + t_codes[p]
            out[flat] += t[k]
        tables.append(out)
    return EmpiricalModel(scn, tables, tol=e.tol)


def coarse_grain(e: EmpiricalModel, h: Mapping, outcomes: Sequence | None = None) -> EmpiricalModel:
    """Push every context distribution forward along ``h: O' -> O``."""
    old = e.scenario.outcomes
    missing = [o for o in old if o not in h]
    if missing:
        raise OutcomeMismatch(f"coarse-graining map is undefined on {missing}")
    if outcomes is None:
        outcomes = list(dict.fromkeys(h[o] for o in old))
    outcomes = list(outcomes)
    lookup = {o: i for i, o in enumerate(outcomes)}
    if any(h[o] not in lookup for o in old):
        raise OutcomeMismatch("coarse-graining map leaves the target outcome set")
    scn = MeasurementScenario(e.scenario.measurements, outcomes, e.scenario.contexts)
    d_old, d_new = len(old), len(outcomes)
    image = [lookup[h[o]] for o in old]
    tables = []
    for ctx, table in zip(scn.contexts, e.tables):
        out = _zeros(d_new ** len(ctx), e.exact)
        for k, codes in enumerate(itertools.product(range(d_old), repeat=len(ctx))):
            flat = 0
            for c in codes:
                flat = flat * d_new + image[c]
            out[flat] += table[k]
        tables.append(out)
    return EmpiricalModel(scn, tables, tol=e.tol)


def relabel(e: EmpiricalModel, measurements: Mapping | None = None,
            outcomes: Mapping | None = None) -> EmpiricalModel:
    """Rename measurements and/or outcomes bijectively (unmapped labels are kept)."""
    scn = e.scenario
    if measurements:
        renamed = [measurements.get(x, x) for x in scn.measurements]
        source = MeasurementScenario(renamed, scn.outcomes,
                                     [[measurements.get(x, x) for x in c] for c in scn.contexts])
        inverse = dict(zip(renamed, scn.measurements))
        e = translate(MeasurementTranslation(source, scn, inverse), e)
    if outcomes:
        h = {o: outcomes.get(o, o) for o in e.scenario.outcomes}
        if len(set(h.values())) != len(h):
            raise OutcomeMismatch("outcome relabelling must be injective")
        e = coarse_grain(e, h, [h[o] for o in e.scenario.outcomes])
    return e


def _disjoint_labels(s1: MeasurementScenario, s2: MeasurementScenario):
    if s1.outcomes != s2.outcomes:
        raise OutcomeMismatch("combined models need the same outcome set")
    if set(s1.measurements).isdisjoint(s2.measurements):
        return {x: x for x in s1.measurements}, {x: x for x in s2.measurements}
    return ({x: f"{x}#1" for x in s1.measurements}, {x: f"{x}#2" for x in s2.measurements})


def choice(e1: EmpiricalModel, e2: EmpiricalModel) -> EmpiricalModel:
    """Controlled choice e1 & e2 on <X1 + X2, M1 + M2, O>.

    Clashing measurement labels are disambiguated with ``#1``/``#2`` suffixes.
    """
    n1, n2 = _disjoint_labels(e1.scenario, e2.scenario)
    s1, s2 = e1.scenario, e2.scenario
    scn = MeasurementScenario(
        [n1[x] for x in s1.measurements] + [n2[x] for x in s2.measurements], s1.outcomes,
        [[n1[x] for x in c] for c in s1.contexts] + [[n2[x] for x in c] for c in s2.contexts])
    tables = list(e1.tables) + list(e2.tables)
    if e1.exact != e2.exact:
        tables = [np.asarray(t, dtype=float) for t in tables]
    return EmpiricalModel(scn, tables, tol=max(e1.tol, e2.tol))


def product(e1: EmpiricalModel, e2: EmpiricalModel, limit: int | None = None) -> EmpiricalModel:
    """Independent product e1 (x) e2 with contexts C1 + C2 (first factor major)."""
    n1, n2 = _disjoint_labels(e1.scenario, e2.scenario)
    s1, s2 = e1.scenario, e2.scenario
    check_size(s1.n_outcomes ** (len(s1.measurements) + len(s2.measurements)), limit,
               "product global assignments")
    contexts, tables = [], []
    exact = e1.exact and e2.exact
    for c1, t1 in zip(s1.contexts, e1.tables):
        for c2, t2 in zip(s2.contexts, e2.tables):
            contexts.append([n1[x] for x in c1] + [n2[x] for x in c2])
            if exact:
                tables.append(np.outer(t1, t2).reshape(-1))
            else:
                tables.append(np.outer(np.asarray(t1, dtype=float),
                                       np.asarray(t2, dtype=float)).reshape(-1))
    scn = MeasurementScenario(
        [n1[x] for x in s1.measurements] + [n2[x] for x in s2.measurements], s1.outcomes, contexts)
    return EmpiricalModel(scn, tables, tol=max(e1.tol, e2.tol))


def couple_subdistributions(bS: SubDistribution, bT: SubDistribution) -> SubDistribution:
    """Joint subdistribution on S x T of weight min(|bS|, |bT|) with dominated marginals.

    The heavier input is first shrunk to the lighter weight; the two are then
    laid out as consecutive intervals of [0, w] (in their iteration order) and
    each pair (s, t) receives the length of the overlap of their intervals.
    With equal weights the marginals are reproduced exactly.
    """
    S = [(k, w) for k, w in bS.weights.items() if w > 0]
    T = [(k, w) for k, w in bT.weights.items() if w > 0]
    wS, wT = bS.weight, bT.weight
    if not S or not T or wS == 0 or wT == 0:
        return SubDistribution({})
    if wS > wT:
        S = [(k, w * wT / wS) for k, w in S]
    elif wT > wS:
        T = [(k, w * wS / wT) for k, w in T]
    out = {}
    i = j = 0
    left_s = left_t = 0
    right_s, right_t = S[0][1], T[0][1]
    while i < len(S) and j < len(T):
        overlap = min(right_s, right_t) - max(left_s, left_t)
        if overlap > 0:
            out[(S[i][0], T[j][0])] = overlap
        # advance whichever interval ends first (both on a tie)
        if right_s <= right_t:
            i += 1
            left_s = right_s
            if i < len(S):
                right_s = right_s + S[i][1]
        else:
            j += 1
            left_t = right_t
            if j < len(T):
                right_t = right_t + T[j][1]
    return SubDistribution(out)


def marginals(b: SubDistribution):
    """Left and right marginals of a subdistribution on pairs."""
    left, right = {}, {}
    for (s, t), w in b.weights.items():
        left[s] = left.get(s, 0) + w
        right[t] = right.get(t, 0) + w
    return SubDistribution(left), SubDistribution(right)


def generator() -> EmpiricalModel:
    """One measurement with one outcome: ``{m -> *}``."""
    return EmpiricalModel(MeasurementScenario(["m"], ["*"], [["m"]]), [[Fraction(1)]])


def deterministic_local_model(assignments: Sequence[Sequence], outcomes: Sequence) -> EmpiricalModel:
    """Deterministic local model built only from the generator and the operations.

    ``assignments[p][j]`` is the outcome of party ``p``'s ``j``-th
    measurement.  Each single-measurement model is G coarse-grained by
    ``* -> outcome``; a party is the choice of its measurements; parties are
    combined by product.  Measurements are then named a1, a2, b1, ...
    """
    parties = []
    for p, row in enumerate(assignments):
        model = None
        for j, outcome in enumerate(row):
            single = coarse_grain(generator(), {"*": outcome}, outcomes)
            single = relabel(single, measurements={"m": f"p{p}m{j}"})
            model = single if model is None else choice(model, single)
        parties.append(model)
    result = parties[0]
    for model in parties[1:]:
        result = product(result, model)
    names = {}
    for p, row in enumerate(assignments):
        for j in range(len(row)):
            names[f"p{p}m{j}"] = f"{chr(ord('a') + p)}{j + 1}"
    return relabel(result, measurements=names)
