"""Seeded generators of random models, maps and computations for property checks.

Every generator takes a :class:`numpy.random.Generator`, so a corpus is
reproduced exactly from its seed.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .empirical import EmpiricalModel, SubDistribution, deterministic_model, from_vector, to_vector
from .games import ConstraintSystem, Formula
from .mbqc import L2MBQC, BooleanFunctionTable
from .morphisms import MeasurementTranslation, coarse_grain
from .quantum import PureState, born_model
from .scenario import MeasurementScenario, bell_scenario


def random_deterministic(scn: MeasurementScenario, rng) -> EmpiricalModel:
    return deterministic_model(scn, [scn.outcomes[k] for k in
                                     rng.integers(scn.n_outcomes, size=len(scn.measurements))])


def random_pr_box(rng) -> EmpiricalModel:
    """A uniformly chosen relabelling of the PR box on (2,2,2)."""
    alpha, beta, gamma = rng.integers(2, size=3)
    tables = []
    for x, y in itertools.product((0, 1), repeat=2):
        parity = (x * y + alpha * x + beta * y + gamma) % 2
        tables.append([Fraction(1, 2) if (a ^ b) == parity else Fraction(0)
                       for a, b in itertools.product((0, 1), repeat=2)])
    return EmpiricalModel(bell_scenario(2), tables)


def random_state(n: int, rng) -> PureState:
    amp = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return PureState(amp / np.linalg.norm(amp))


def random_born(n: int, rng) -> EmpiricalModel:
    return born_model(random_state(n, rng), rng.uniform(0, 2 * np.pi, size=(n, 2)))


def _ghz_like(n, rng):
    amp = np.zeros(2**n, dtype=complex)
    amp[0] = amp[-1] = 1 / np.sqrt(2)
    return born_model(PureState(amp), rng.choice([0, np.pi / 2, np.pi / 4], size=(n, 2)))


def random_model(parties: int, rng, components: int = 3) -> EmpiricalModel:
    """Random no-signalling model on the (parties,2,2) scenario.

    A Dirichlet mixture of deterministic models, Born models of random
    states (and of GHZ states at Pauli angles) and, for two parties,
    relabelled PR boxes.  Float valued.
    """
    scn = bell_scenario(parties)
    parts = []
    for _ in range(components):
        kind = rng.integers(4)
        if kind == 0:
            parts.append(random_deterministic(scn, rng))
        elif kind == 1:
            parts.append(random_born(parties, rng))
        elif kind == 2 and parties == 2:
            parts.append(random_pr_box(rng))
        else:
            parts.append(_ghz_like(parties, rng))
    weights = rng.dirichlet(np.ones(len(parts)))
    vec = sum(w * np.asarray(to_vector(p), dtype=float) for w, p in zip(weights, parts))
    return from_vector(scn, vec, tol=1e-7)


def random_exact_model(parties: int, rng, components: int = 3) -> EmpiricalModel:
    """Rational mixture of deterministic models and (for two parties) PR boxes."""
    scn = bell_scenario(parties)
    parts = [random_pr_box(rng) if parties == 2 and rng.random() < 0.5
             else random_deterministic(scn, rng) for _ in range(components)]
    raw = rng.integers(1, 10, size=len(parts))
    weights = [Fraction(int(r), int(raw.sum())) for r in raw]
    vec = sum((w * to_vector(p) for w, p in zip(weights, parts)),
              np.array([Fraction(0)] * scn.n_local, dtype=object))
    return from_vector(scn, vec)


def embed_outcomes(e: EmpiricalModel, outcomes, rng) -> EmpiricalModel:
    """Push ``e`` forward along a random injection of its outcomes into ``outcomes``."""
    targets = rng.permutation(len(outcomes))[: e.scenario.n_outcomes]
    h = {o: outcomes[t] for o, t in zip(e.scenario.outcomes, targets)}
    return coarse_grain(e, h, outcomes)


def random_coarse_graining(source_outcomes, rng, size: int | None = None):
    """Random total map h from ``source_outcomes`` onto labels "0".."size-1"."""
    size = size or int(rng.integers(1, len(source_outcomes) + 1))
    labels = [str(k) for k in range(size)]
    return {o: labels[int(rng.integers(size))] for o in source_outcomes}, labels


def random_translation(target: MeasurementScenario, rng, size: int | None = None):
    """Random context-preserving map into ``target``.

    The source has ``size`` measurements with random images; its contexts
    are the distinct nonempty preimages of target contexts.
    """
    size = size or int(rng.integers(1, len(target.measurements) + 2))
    names = [f"x{k}" for k in range(size)]
    mapping = {x: target.measurements[int(rng.integers(len(target.measurements)))] for x in names}
    contexts = []
    for ctx in target.contexts:
        pre = tuple(x for x in names if mapping[x] in ctx)
        if pre and pre not in contexts:
            contexts.append(pre)
    source = MeasurementScenario(names, target.outcomes, contexts)
    return MeasurementTranslation(source, target, mapping)


def random_subdistribution(rng, size: int | None = None, weight=None, exact: bool = False,
                           prefix: str = "s") -> SubDistribution:
    size = size or int(rng.integers(1, 7))
    if exact:
        raw = [int(r) for r in rng.integers(0, 12, size=size)]
        if sum(raw) == 0:
            raw[0] = 1
        total = Fraction(int(rng.integers(0, 13)), 12) if weight is None else Fraction(weight)
        weights = [total * r / sum(raw) for r in raw]
    else:
        raw = rng.random(size) * (rng.random(size) > 0.2)
        if raw.sum() == 0:
            raw[0] = 1.0
        total = rng.random() if weight is None else float(weight)
        weights = list(total * raw / raw.sum())
    return SubDistribution({f"{prefix}{k}": w for k, w in enumerate(weights)})


def random_function(m: int, l: int, rng) -> BooleanFunctionTable:
    return BooleanFunctionTable(m, l, tuple(int(v) for v in rng.integers(2**l, size=2**m)))


def random_mbqc(rng, resource: EmpiricalModel | None = None, max_m: int = 3, max_l: int = 3,
                max_n: int = 4) -> L2MBQC:
    n = resource.scenario.measurements.__len__() // 2 if resource else int(rng.integers(2, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    l = int(rng.integers(1, max_l + 1))
    T = np.tril(rng.integers(2, size=(n, n)), k=-1)
    if resource is None:
        resource = random_model(n, rng) if n <= 3 else random_born(n, rng)
    return L2MBQC(m, l, n, rng.integers(2, size=(n, m)), T, rng.integers(2, size=(l, n)),
                  resource)


def random_game(parties: int, rng, xor: bool = True) -> ConstraintSystem:
    """One formula per context of the (parties,2,2) scenario, XOR or random truth table."""
    scn = bell_scenario(parties)
    formulae = []
    for ctx in scn.contexts:
        if xor:
            formulae.append(Formula.xor("+".join(ctx) + f"={int(rng.integers(2))}"))
        else:
            values = list(itertools.product("01", repeat=len(ctx)))
            keep = [v for v in values if rng.random() < 0.5] or [values[0]]
            formulae.append(Formula(ctx, frozenset(keep)))
    return ConstraintSystem(scn.measurements, ("0", "1"), tuple(formulae))
