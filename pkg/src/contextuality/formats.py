"""JSON formats for models, inequalities, MBQC specifications and games.

Probabilities are written as ``"p/q"`` strings when exact and as JSON
numbers otherwise, so a model survives a write/read cycle unchanged.
Assignment keys join outcome labels with ``","`` in the order the context
lists its measurements.
"""
from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path

from .catalog import BUILTINS, builtin
from .empirical import EmpiricalModel
from .errors import InvalidModel, InvalidScenario
from .games import ConstraintSystem, Formula, chsh_game, tsirelson_game
from .mbqc import L2MBQC, BooleanFunctionTable
from .scenario import MeasurementScenario

GAMES = {"chsh": chsh_game, "chsh-tsirelson": tsirelson_game}


def parse_number(value):
    """JSON number or ``"p/q"`` string; integers and strings become Fractions."""
    if isinstance(value, bool):
        raise InvalidModel(f"not a probability: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidModel(f"cannot parse probability {value!r}") from None
    raise InvalidModel(f"not a probability: {value!r}")


def format_number(value):
    if isinstance(value, Fraction):
        return str(value)
    return float(value)


def _require(data, *keys):
    if not isinstance(data, dict):
        raise InvalidModel("expected a JSON object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise InvalidModel(f"missing field(s) {missing}")


def model_from_dict(data: dict, tol: float | None = None) -> EmpiricalModel:
    _require(data, "measurements", "outcomes", "contexts", "tables")
    outcomes = [str(o) for o in data["outcomes"]]
    if any("," in o for o in outcomes):
        raise InvalidModel("outcome labels may not contain ','")
    try:
        scn = MeasurementScenario([str(x) for x in data["measurements"]], outcomes,
                                  [[str(x) for x in c] for c in data["contexts"]])
    except InvalidScenario as exc:
        raise InvalidModel(str(exc)) from None
    given = [[str(x) for x in c] for c in data["contexts"]]
    tables = [None] * len(scn.contexts)
    for entry in data["tables"]:
        _require(entry, "context", "probs")
        ci = entry["context"]
        if not isinstance(ci, int) or not 0 <= ci < len(scn.contexts):
            raise InvalidModel(f"bad context index {ci!r}")
        if tables[ci] is not None:
            raise InvalidModel(f"context {ci} has two tables")
        written = given[ci]
        stored = scn.contexts[ci]
        d = scn.n_outcomes
        lookup = {o: i for i, o in enumerate(outcomes)}
        values = [Fraction(0)] * d ** len(stored)
        for key, p in entry["probs"].items():
            labels = key.split(",")
            if len(labels) != len(written) or any(o not in lookup for o in labels):
                raise InvalidModel(f"bad assignment key {key!r} for context {written}")
            by_name = dict(zip(written, labels))
            flat = 0
            for x in stored:
                flat = flat * d + lookup[by_name[x]]
            values[flat] = parse_number(p)
        tables[ci] = values
    missing = [i for i, t in enumerate(tables) if t is None]
    if missing:
        raise InvalidModel(f"contexts {missing} have no table")
    if tol is None:
        exact = all(isinstance(v, Fraction) for t in tables for v in t)
        tol = 1e-9 if exact else 1e-7
    return EmpiricalModel(scn, tables, tol=tol)


def model_to_dict(e: EmpiricalModel, drop_zeros: bool = False) -> dict:
    scn = e.scenario
    tables = []
    for ci, table in enumerate(e.tables):
        probs = {}
        for s, p in zip(scn.local_assignments(ci), table):
            if drop_zeros and p == 0:
                continue
            probs[",".join(s)] = format_number(p)
        tables.append({"context": ci, "probs": probs})
    return {**scn.to_dict(), "tables": tables}


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidModel(f"{path}: invalid JSON ({exc})") from None


def load_model(source, tol: float | None = None, base: str | os.PathLike | None = None) -> EmpiricalModel:
    """A builtin id or a path to a model JSON file (relative paths resolved against ``base``)."""
    if isinstance(source, dict):
        return model_from_dict(source, tol)
    source = str(source)
    if source in BUILTINS:
        return builtin(source)
    path = Path(source)
    if base is not None and not path.is_absolute():
        path = Path(base) / path
    if not path.exists():
        raise InvalidModel(f"{source!r} is neither a builtin ({', '.join(sorted(BUILTINS))}) "
                           f"nor an existing file")
    return model_from_dict(load_json(path), tol)


def dump_model(e: EmpiricalModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(e), fh, indent=1)
        fh.write("\n")


def mbqc_from_dict(data: dict, base=None) -> tuple:
    """MBQC specification; returns the computation and the optional target function."""
    _require(data, "m", "l", "n", "Q", "T", "Z", "resource")
    resource = load_model(data["resource"], base=base)
    m, l, n = int(data["m"]), int(data["l"]), int(data["n"])
    K = L2MBQC(m, l, n, data["Q"], data["T"], data["Z"], resource)
    f = None
    if "function" in data:
        f = BooleanFunctionTable.from_hex(str(data["function"]), m, l)
    return K, f


def game_from_dict(data: dict) -> ConstraintSystem:
    _require(data, "formulae")
    formulae = []
    domain = tuple(str(x) for x in data.get("domain", ["0", "1"]))
    for entry in data["formulae"]:
        if isinstance(entry, str):
            formulae.append(Formula.xor(entry))
        elif "xor" in entry:
            formulae.append(Formula.xor(entry["xor"]))
        else:
            _require(entry, "vars", "satisfying")
            formulae.append(Formula(tuple(str(v) for v in entry["vars"]),
                                    frozenset(tuple(s.split(",")) if s else ()
                                              for s in entry["satisfying"])))
    variables = data.get("variables") or sorted({v for phi in formulae for v in phi.vars})
    return ConstraintSystem(tuple(str(v) for v in variables), domain, tuple(formulae))


def load_game(source) -> ConstraintSystem:
    if str(source) in GAMES:
        return GAMES[str(source)]()
    return game_from_dict(load_json(source))


def game_to_dict(cs: ConstraintSystem) -> dict:
    return {"variables": list(cs.variables), "domain": list(cs.domain),
            "formulae": [{"vars": list(phi.vars),
                          "satisfying": sorted(",".join(s) for s in phi.satisfying)}
                         for phi in cs.formulae]}
