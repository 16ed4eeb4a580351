"""Builtin models, addressable by id from the command line and tests."""
from __future__ import annotations

import itertools
from fractions import Fraction as F

from .empirical import EmpiricalModel, deterministic_model, uniform_model
from .scenario import bell_scenario

CORRELATED = [F(1, 2), F(0), F(0), F(1, 2)]
ANTICORRELATED = [F(0), F(1, 2), F(1, 2), F(0)]


def pr_box() -> EmpiricalModel:
    """Popescu-Rohrlich box: outcomes equal except at a2b2, where they differ."""
    return EmpiricalModel(bell_scenario(2), [CORRELATED, CORRELATED, CORRELATED, ANTICORRELATED])


def chsh_model() -> EmpiricalModel:
    """The Bell-CHSH model: |Phi+> measured at equatorial angles 0 and pi/3."""
    near = [F(3, 8), F(1, 8), F(1, 8), F(3, 8)]
    far = [F(1, 8), F(3, 8), F(3, 8), F(1, 8)]
    return EmpiricalModel(bell_scenario(2), [CORRELATED, near, near, far])


def ghz_mermin(n: int = 3) -> EmpiricalModel:
    """GHZ(n) with setting 1 = Pauli X and setting 2 = Pauli Y, in exact arithmetic.

    With k settings equal to Y, p(s) = (1 + (-1)^{|s|} cos(k pi/2)) / 2^n.
    """
    scn = bell_scenario(n)
    tables = []
    for q in itertools.product((0, 1), repeat=n):
        c = [1, 0, -1, 0][sum(q) % 4]
        tables.append([F(1 + (-1) ** sum(s) * c, 2**n)
                       for s in itertools.product((0, 1), repeat=n)])
    return EmpiricalModel(scn, tables)


def deterministic_zero(parties: int = 2) -> EmpiricalModel:
    scn = bell_scenario(parties)
    return deterministic_model(scn, ["0"] * len(scn.measurements))


BUILTINS = {
    "pr-box": pr_box,
    "chsh": chsh_model,
    "ghz3-mermin": lambda: ghz_mermin(3),
    "uniform-n2": lambda: uniform_model(bell_scenario(2)),
    "uniform-n3": lambda: uniform_model(bell_scenario(3)),
    "det-zero-n2": deterministic_zero,
}


def builtin(name: str) -> EmpiricalModel:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin model {name!r}; choose from {sorted(BUILTINS)}") from None
