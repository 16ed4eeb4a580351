"""Command-line front end.

Every command writes data only to stdout (JSON, or CSV for sweeps) and
reports problems as a JSON object on stderr.  Exit status is 0 on success,
1 for malformed input or a failed check, 2 when a size guard trips or a
program cannot be solved.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import formats, games, mbqc, morphisms, quantum, randomize
from .bell import evaluate, normalized_violation
from .empirical import check_no_signalling, is_strongly_contextual, mix
from .errors import (ContextualityError, NumericalBreakdown,
                     SizeLimitExceeded, StatusMismatch)
from .fraction import (decompose, dual_program, noncontextual_fraction, primal_program,
                       witnessing_inequality)
from .lp import verify_duality
from .scenario import DEFAULT_SIZE_LIMIT

log = logging.getLogger("contextuality")

BACKEND_ENV = "CONTEXTUALITY_BACKEND"
_ANGLE = re.compile(r"^\s*([-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


class UsageError(Exception):
    """Bad command-line input (exit status 1)."""


def parse_angle(text: str) -> float:
    """A float, or a multiple of pi such as ``pi/8``, ``5pi/8`` or ``-0.5*pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    match = _ANGLE.match(text.lower())
    if not match:
        raise UsageError(f"cannot parse angle {text!r}")
    coeff = match.group(1)
    coeff = 1.0 if coeff in ("", "+") else -1.0 if coeff == "-" else float(coeff)
    denom = float(match.group(2)) if match.group(2) else 1.0
    return coeff * math.pi / denom


def _clean(value, full: bool):
    if isinstance(value, dict):
        return {k: _clean(v, full) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v, full) for v in value]
    if isinstance(value, Fraction):
        return str(value) if full else round(float(value), 6)
    if isinstance(value, (np.floating, float)):
        return float(value) if full else round(float(value), 6)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def emit(args, data) -> None:
    json.dump(_clean(data, args.full_precision), sys.stdout, indent=1)
    sys.stdout.write("\n")


def _backend(args, model=None):
    if args.backend:
        return args.backend
    env = os.environ.get(BACKEND_ENV)
    if env:
        if env not in ("float", "rational"):
            raise UsageError(f"{BACKEND_ENV} must be 'float' or 'rational', not {env!r}")
        return env
    return None  # model decides: rational when exact


def _load(args, source):
    return formats.load_model(source, tol=args.tol)


def cmd_check(args):
    e = _load(args, args.model)
    report = check_no_signalling(e, e.tol)
    emit(args, {"valid": True, "exact": e.exact, "measurements": len(e.scenario.measurements),
                "contexts": len(e.scenario.contexts), "signalling_gap": report.worst})
    return 0


def cmd_fraction(args):
    e = _load(args, args.model)
    result = noncontextual_fraction(e, _backend(args, e), limit=args.size_limit)
    out = {"ncf": result.ncf, "cf": result.cf}
    if args.strong:
        out["strongly_contextual"] = is_strongly_contextual(e, limit=args.size_limit)
    emit(args, out)
    return 0


def cmd_bell(args):
    e = _load(args, args.model)
    ineq = witnessing_inequality(e, _backend(args, e), limit=args.size_limit)
    out = ineq.to_dict()
    out["value"] = evaluate(ineq, e)
    out["violation"] = None if ineq.is_trivial else normalized_violation(ineq, e)
    out["trivial_witness"] = ineq.trivial_witness
    out["dual_value"] = ineq.dual_value
    emit(args, out)
    return 0


def cmd_decompose(args):
    e = _load(args, args.model)
    result = noncontextual_fraction(e, _backend(args, e), limit=args.size_limit)
    dec = decompose(e, result)
    out = {"ncf": dec.ncf, "cf": dec.cf, "degenerate": dec.degenerate,
           "noncontextual": None, "strongly_contextual": None}
    if dec.noncontextual is not None:
        formats.dump_model(dec.noncontextual, args.nc_out)
        out["noncontextual"] = args.nc_out
    if dec.strongly_contextual is not None:
        formats.dump_model(dec.strongly_contextual, args.sc_out)
        out["strongly_contextual"] = args.sc_out
    emit(args, out)
    return 0


def cmd_compose(args):
    first = _load(args, args.first)
    if args.op == "coarse-grain":
        if not args.map:
            raise UsageError("coarse-grain needs --map")
        result = morphisms.coarse_grain(first, json.loads(args.map))
    elif args.op == "relabel":
        mapping = json.loads(args.map) if args.map else {}
        result = morphisms.relabel(first, mapping.get("measurements"), mapping.get("outcomes"))
    else:
        if args.second is None:
            raise UsageError(f"{args.op} needs two models")
        second = _load(args, args.second)
        if args.op == "mix":
            if args.lam is None:
                raise UsageError("mix needs --lambda")
            try:
                lam = Fraction(args.lam)
            except ValueError:
                raise UsageError(f"bad mixing weight {args.lam!r}") from None
            result = mix(first, second, lam)
        elif args.op == "choice":
            result = morphisms.choice(first, second)
        else:
            result = morphisms.product(first, second, limit=args.size_limit)
    data = formats.model_to_dict(result)
    if args.output:
        formats.dump_model(result, args.output)
        emit(args, {"output": args.output, "contexts": len(result.scenario.contexts)})
    else:
        # model files keep full precision so they validate when read back
        json.dump(data, sys.stdout, indent=1)
        sys.stdout.write("\n")
    return 0


def cmd_quantum(args):
    state = quantum.state_from_selector(args.state)
    if args.grid:
        grid = quantum.sweep(state, args.grid, jobs=args.jobs)
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["phi1", "phi2", "cf"])
        fmt = repr if args.full_precision else (lambda x: f"{x:.6f}")
        for p1, p2, cf in quantum.sweep_rows(grid):
            writer.writerow([fmt(float(p1)), fmt(float(p2)), fmt(float(cf))])
        return 0
    if not args.angles:
        raise UsageError("give --angles or --grid")
    angles = [parse_angle(a) for a in args.angles.split(",")]
    n = state.n_qubits
    if len(angles) == 2:
        settings = angles
    elif len(angles) == 2 * n:
        settings = np.array(angles).reshape(n, 2)
    else:
        raise UsageError(f"expected 2 or {2 * n} angles")
    e = quantum.born_model(state, settings)
    json.dump(formats.model_to_dict(e), sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 0


def cmd_mbqc(args):
    data = formats.load_json(args.spec)
    K, f = formats.mbqc_from_dict(data, base=os.path.dirname(os.path.abspath(args.spec)))
    if args.function:
        f = mbqc.BooleanFunctionTable.from_hex(args.function, K.m, K.l)
    if f is None:
        raise UsageError("no target function: pass --function or a 'function' field")
    report = mbqc.check_mbqc_bound(K, f, homogeneous=args.homogeneous, backend=_backend(args))
    out = report.to_dict()
    out["function"] = f.to_hex()
    emit(args, out)
    return 0 if report.holds else 1


def _load_strategy(cs, source):
    if isinstance(source, str) and source in formats.BUILTINS:
        return formats.load_model(source)
    data = formats.load_json(source)
    if "strategy" in data:
        return games.strategy_from_tables(cs, data["strategy"])
    return formats.model_from_dict(data)


def cmd_game(args):
    cs = formats.load_game(args.game)
    strategy = _load_strategy(cs, args.strategy)
    report = games.check_game_bound(cs, strategy, backend=_backend(args))
    emit(args, report.to_dict())
    return 0 if report.holds else 1


def _corpus_case(task):
    name, seed = task
    rng = np.random.default_rng(seed)
    if name == "duality":
        e = randomize.random_model(2 + seed % 2, rng)
        rep = verify_duality(primal_program(e, "float"), dual_program(e, "float"), "float")
        return rep.gap <= 1e-7, rep.gap
    if name == "monotonicity":
        e = randomize.random_model(2, rng)
        f = randomize.random_translation(e.scenario, rng)
        before = noncontextual_fraction(e).cf
        after = noncontextual_fraction(morphisms.translate(f, e)).cf
        return after <= before + 1e-6, float(before - after)
    if name == "mbqc":
        K = randomize.random_mbqc(rng)
        f = randomize.random_function(K.m, K.l, rng)
        rep = mbqc.check_mbqc_bound(K, f)
        return rep.holds, float(rep.slack)
    e = randomize.random_model(2, rng)
    cs = randomize.random_game(2, rng, xor=bool(seed % 2))
    rep = games.check_game_bound(cs, e)
    return rep.holds, float(rep.slack)


def cmd_corpus(args):
    tasks = [(args.name, args.seed + i) for i in range(args.count)]
    start = time.perf_counter()
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_corpus_case, tasks))
    else:
        results = [_corpus_case(t) for t in tasks]
    failures = [seed for (_, seed), (ok, _) in zip(tasks, results) if not ok]
    emit(args, {"corpus": args.name, "seed": args.seed, "cases": args.count,
                "failures": failures, "worst": min(r[1] for r in results),
                "seconds": time.perf_counter() - start})
    return 0 if not failures else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", choices=["float", "rational"],
                        help=f"LP arithmetic (default: ${BACKEND_ENV}, else rational for exact models)")
    common.add_argument("--full-precision", action="store_true",
                        help="print floats in full and exact values as p/q")
    common.add_argument("--tol", type=float, default=None,
                        help="model validation tolerance")
    common.add_argument("--size-limit", type=int, default=DEFAULT_SIZE_LIMIT,
                        help="cap on the number of global assignments")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="contextuality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fraction", parents=[common], help="non-contextual and contextual fraction")
    p.add_argument("model")
    p.add_argument("--strong", action="store_true", help="also run the strong-contextuality search")
    p.set_defaults(func=cmd_fraction)

    p = sub.add_parser("bell", parents=[common], help="witnessing Bell inequality")
    p.add_argument("model")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("decompose", parents=[common], help="split into NC and SC parts")
    p.add_argument("model")
    p.add_argument("--nc-out", default="nc.json")
    p.add_argument("--sc-out", default="sc.json")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("compose", parents=[common], help="combine or transform models")
    p.add_argument("op", choices=["mix", "choice", "product", "coarse-grain", "relabel"])
    p.add_argument("first")
    p.add_argument("second", nargs="?")
    p.add_argument("--lambda", dest="lam", help="mixing weight of the first model (e.g. 1/2)")
    p.add_argument("--map", help="JSON outcome map (coarse-grain) or relabelling spec")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("quantum", parents=[common], help="Born-rule models and CF sweeps")
    p.add_argument("--state", default="bell", help="bell or ghz<n>")
    p.add_argument("--angles", help="phi1,phi2 shared by all qubits, or 2n values")
    p.add_argument("--grid", type=int, help="sweep a G x G grid of multiples of pi/G (CSV)")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("mbqc", parents=[common], help="MBQC success against the hardness bound")
    p.add_argument("spec")
    p.add_argument("--function", help="hex truth table, entry i at bits i*l..i*l+l-1")
    p.add_argument("--homogeneous", action="store_true",
                   help="measure distance to linear maps without constant term")
    p.set_defaults(func=cmd_mbqc)

    p = sub.add_parser("game", parents=[common], help="constraint game success against its bound")
    p.add_argument("game", help="game JSON or builtin (chsh, chsh-tsirelson)")
    p.add_argument("strategy", help="model JSON, per-formula strategy JSON, or builtin model")
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("corpus", parents=[common], help="run a seeded property corpus")
    p.add_argument("name", choices=["duality", "monotonicity", "mbqc", "games"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=cmd_corpus)
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    json.dump({"error": kind, "message": message}, sys.stderr)
    sys.stderr.write("\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SizeLimitExceeded, NumericalBreakdown, StatusMismatch) as exc:
        return _fail(type(exc).__name__, str(exc), 2)
    except (ContextualityError, UsageError, ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        return _fail(type(exc).__name__, str(message), 1)


if __name__ == "__main__":
    sys.exit(main())
