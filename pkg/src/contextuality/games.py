"""Constraint-system games, k-consistency and the success bound.

A constraint system is a set of variables, a finite domain and a list of
formulae, each given by the variables it mentions and its satisfying
assignments.  The induced measurement scenario takes the variables as
measurements and the maximal variable sets as contexts, so a strategy is
just an empirical model on that scenario.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .bell import BellInequality, evaluate
from .empirical import EmpiricalModel, marginalize
from .errors import InvalidModel, InvalidScenario, InvalidStrategy, ScenarioMismatch
from .fraction import noncontextual_fraction
from .scenario import DEFAULT_SIZE_LIMIT, MeasurementScenario, check_size, global_codes

_XOR = re.compile(r"^\s*([^+=\s]+(?:\s*\+\s*[^+=\s]+)*)\s*=\s*([01])\s*$")


@dataclass(frozen=True)
class Formula:
    """Variables ``vars`` together with the set of satisfying value tuples."""

    vars: tuple
    satisfying: frozenset

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "satisfying", frozenset(tuple(s) for s in self.satisfying))
        if not self.vars:
            raise InvalidScenario("a formula must mention at least one variable")
        if len(set(self.vars)) != len(self.vars):
            raise InvalidScenario(f"formula repeats a variable: {self.vars}")
        if any(len(s) != len(self.vars) for s in self.satisfying):
            raise InvalidScenario("satisfying tuples must match the formula's variables")

    @classmethod
    def xor(cls, text: str) -> "Formula":
        """Parse ``"x1+x2=c"`` over the domain {"0", "1"}."""
        match = _XOR.match(text)
        if not match:
            raise InvalidScenario(f"cannot parse XOR formula {text!r}")
        names = tuple(v.strip() for v in match.group(1).split("+"))
        parity = int(match.group(2))
        sat = [tuple(str(b) for b in bits)
               for bits in itertools.product((0, 1), repeat=len(names)) if sum(bits) % 2 == parity]
        return cls(names, frozenset(sat))

    def holds(self, values: Mapping) -> bool:
        return tuple(values[v] for v in self.vars) in self.satisfying


@dataclass(frozen=True)
class ConstraintSystem:
    variables: tuple
    domain: tuple
    formulae: tuple

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "formulae", tuple(self.formulae))
        if not self.formulae:
            raise InvalidScenario("a constraint system needs at least one formula")
        known = set(self.variables)
        for phi in self.formulae:
            if not set(phi.vars) <= known:
                raise InvalidScenario(f"formula mentions unknown variables {phi.vars}")
            if any(x not in self.domain for s in phi.satisfying for x in s):
                raise InvalidScenario("satisfying tuples use values outside the domain")

    @property
    def n(self) -> int:
        return len(self.formulae)

    @classmethod
    def from_xor(cls, formulae: Sequence[str], variables: Sequence | None = None):
        parsed = [Formula.xor(t) for t in formulae]
        if variables is None:
            variables = sorted({v for phi in parsed for v in phi.vars})
        return cls(tuple(variables), ("0", "1"), tuple(parsed))


def chsh_game() -> ConstraintSystem:
    """Outcomes agree except on (a2, b2)."""
    return ConstraintSystem.from_xor(["a1+b1=0", "a1+b2=0", "a2+b1=0", "a2+b2=1"])


def tsirelson_game() -> ConstraintSystem:
    """CHSH variant won with probability (2+sqrt2)/4 by |Phi+> at angles pi/8, 5pi/8."""
    return ConstraintSystem.from_xor(["a1+b1=0", "a1+b2=1", "a2+b1=1", "a2+b2=1"])


def to_scenario(cs: ConstraintSystem, limit: int | None = None):
    """Induced scenario and, for each formula, the index of its covering context.

    Contexts are the distinct inclusion-maximal variable sets, in order of
    first appearance.
    """
    sets = []
    for phi in cs.formulae:
        s = frozenset(phi.vars)
        if s not in sets:
            sets.append(s)
    maximal = [s for s in sets if not any(s < t for t in sets)]
    used = {x for s in maximal for x in s}
    variables = [x for x in cs.variables if x in used]
    scn = MeasurementScenario(variables, cs.domain, [list(s) for s in maximal])
    check_size(scn.n_global, limit, "global assignments")
    cover = [scn.covering_context(phi.vars) for phi in cs.formulae]
    return scn, cover


def _satisfied_table(phi: Formula, ctx: Sequence, domain: Sequence) -> np.ndarray:
    # 0/1 over the local assignments of ctx (lexicographic): does t restricted to V(phi) satisfy phi
    pos = [list(ctx).index(v) for v in phi.vars]
    return np.array([int(tuple(t[p] for p in pos) in phi.satisfying)
                     for t in itertools.product(domain, repeat=len(ctx))], dtype=np.int64)


def k_consistency(cs: ConstraintSystem, limit: int | None = None) -> int:
    """Largest number of formulae satisfied by one assignment to all variables."""
    limit = DEFAULT_SIZE_LIMIT if limit is None else limit
    d = len(cs.domain)
    check_size(d ** len(cs.variables), limit, "variable assignments")
    scn = MeasurementScenario(cs.variables, cs.domain, [[x] for x in cs.variables])
    codes = global_codes(scn, limit)
    count = np.zeros(codes.shape[0], dtype=np.int64)
    for phi in cs.formulae:
        cols = [cs.variables.index(v) for v in phi.vars]
        flat = np.zeros(codes.shape[0], dtype=np.int64)
        for c in cols:
            flat = flat * d + codes[:, c]
        count += _satisfied_table(phi, phi.vars, cs.domain)[flat]
    return int(count.max())


def game_inequality(cs: ConstraintSystem) -> BellInequality:
    """sum over formulae of P(formula satisfied) <= k, on the induced scenario."""
    scn, cover = to_scenario(cs)
    blocks = [np.zeros(size, dtype=np.int64) for size in scn.context_sizes]
    for phi, ci in zip(cs.formulae, cover):
        blocks[ci] += _satisfied_table(phi, scn.contexts[ci], cs.domain)
    coeffs = np.array([Fraction(int(x)) for x in np.concatenate(blocks)], dtype=object)
    return BellInequality(scn, coeffs, Fraction(k_consistency(cs)))


def strategy_from_tables(cs: ConstraintSystem, tables: Sequence[Mapping | Sequence],
                         tol: float = 1e-9) -> EmpiricalModel:
    """Build the strategy model from one distribution per formula.

    Each entry is a dict from value tuples (or comma-joined strings) to
    probabilities, or a list in lexicographic order over the formula's
    variables.  Raises :class:`InvalidStrategy` when two formulae give
    different marginals to shared variables.
    """
    if len(tables) != cs.n:
        raise InvalidStrategy(f"expected {cs.n} distributions, got {len(tables)}", 0.0)
    scn, cover = to_scenario(cs)
    dense = []
    for phi, t in zip(cs.formulae, tables):
        if isinstance(t, Mapping):
            lookup = {tuple(k.split(",")) if isinstance(k, str) else tuple(k): p
                      for k, p in t.items()}
            t = [lookup.get(s, 0) for s in itertools.product(cs.domain, repeat=len(phi.vars))]
        dense.append(list(t))
    d = len(cs.domain)
    worst = 0.0
    for (p1, t1), (p2, t2) in itertools.combinations(zip(cs.formulae, dense), 2):
        shared = [v for v in p1.vars if v in p2.vars]
        if not shared:
            continue
        m1 = _reorder(marginalize(t1, p1.vars, shared, d), shared, p1.vars, d)
        m2 = _reorder(marginalize(t2, p2.vars, shared, d), shared, p2.vars, d)
        worst = max(worst, float(max(abs(a - b) for a, b in zip(m1, m2))))
    if worst > tol:
        raise InvalidStrategy(f"formulae disagree on shared variables by {worst:.3g}", worst)
    ctx_tables = []
    for ci, ctx in enumerate(scn.contexts):
        j = next(j for j, phi in enumerate(cs.formulae) if set(phi.vars) == set(ctx))
        phi = cs.formulae[j]
        ctx_tables.append(_reorder(np.asarray(dense[j], dtype=object), list(phi.vars),
                                   phi.vars, d, target=ctx))
    try:
        return EmpiricalModel(scn, ctx_tables, tol=tol)
    except InvalidModel as exc:
        raise InvalidStrategy(str(exc), worst) from None


def _reorder(table, subset, source_order, d, target=None):
    """Permute a table over ``subset`` (listed in ``source_order``) into ``target`` order."""
    current = [v for v in source_order if v in set(subset)]
    target = list(target) if target is not None else sorted(current, key=str)
    if current == target:
        return np.asarray(table).reshape(-1)
    tensor = np.asarray(table).reshape((d,) * len(current))
    return tensor.transpose([current.index(v) for v in target]).reshape(-1)


def success_probability(cs: ConstraintSystem, strategy: EmpiricalModel):
    """Average over formulae of the probability that the answers satisfy it."""
    scn, cover = to_scenario(cs)
    if strategy.scenario != scn:
        raise ScenarioMismatch("strategy does not live on the game's induced scenario")
    total = 0
    for phi, ci in zip(cs.formulae, cover):
        sat = _satisfied_table(phi, scn.contexts[ci], cs.domain)
        total = total + sum(p for p, ok in zip(strategy.tables[ci], sat) if ok)
    return total / cs.n if strategy.exact else float(total) / cs.n


@dataclass
class GameBoundReport:
    n: int
    k: int
    success: object
    ncf: object
    tol: float = 1e-6

    @property
    def failure(self):
        return 1 - self.success

    @property
    def hardness(self) -> Fraction:
        return Fraction(self.n - self.k, self.n)

    @property
    def bound(self):
        if isinstance(self.ncf, float):
            return self.ncf * float(self.hardness)
        return self.ncf * self.hardness

    @property
    def slack(self):
        return self.failure - self.bound

    @property
    def holds(self) -> bool:
        return float(self.slack) >= -self.tol

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "p_success": float(self.success),
                "p_failure": float(self.failure), "ncf": float(self.ncf),
                "hardness": float(self.hardness), "bound": float(self.bound),
                "slack": float(self.slack), "holds": self.holds}


def check_game_bound(cs: ConstraintSystem, strategy: EmpiricalModel,
                   backend: str | None = None) -> GameBoundReport:
    """Failure probability against NCF(strategy) * (n - k) / n."""
    success = success_probability(cs, strategy)
    ncf = noncontextual_fraction(strategy, backend).ncf
    if isinstance(success, float) or isinstance(ncf, float):
        success, ncf = float(success), float(ncf)
    return GameBoundReport(cs.n, k_consistency(cs), success, ncf)


def inequality_value(cs: ConstraintSystem, strategy: EmpiricalModel):
    """n * p_S, computed through the game inequality."""
    return evaluate(game_inequality(cs), strategy)
