"""Command-line front end.  Results go to stdout as JSON, diagnostics to stderr.

Exit status: 0 success, 1 a query answered false under ``--assert``,
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import numring
from .construction import (
    ConstructionState,
    PredicateSpec,
    build,
    build_pid,
    parse_enumeration,
    self_check,
)
from .expr import ExprSyntaxError, eval_expr
from .model import PrimeId, TowerError
from .tower import Tower

log = logging.getLogger("ctower")


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=1)
    sys.stdout.write("\n")


def _load_predicate(ref: str) -> PredicateSpec:
    path = Path(ref)
    if path.is_file():
        obj = json.loads(path.read_text())
    else:
        try:
            obj = json.loads(ref)
        except json.JSONDecodeError:
            obj = ref
    return PredicateSpec.from_json(obj)


def _read_tower(ref: str) -> Tower:
    text = sys.stdin.read() if ref == "-" else Path(ref).read_text()
    return Tower.loads(text)


def _write(path: Optional[str], text: str) -> None:
    if path:
        Path(path).write_text(text + "\n")
        log.info("wrote %s", path)


def cmd_tower_build(args) -> int:
    pred = _load_predicate(args.predicate)
    state, report = build(pred, args.stages)
    _write(args.out, state.tower.dumps())
    _emit(report.to_json())
    return 1 if args.assert_ and report.violations else 0


def cmd_tower_query(args) -> int:
    tower = _read_tower(args.tower)
    elem = eval_expr(tower, args.expr, args.level)
    out = {"level": elem.level, "element": tower.element_to_json(elem), "text": str(elem)}
    if args.op == "is_unit":
        value = tower.is_unit(elem)
    elif args.op == "deg_x":
        value = tower.deg_x(elem)
    elif args.op == "deg_y":
        value = tower.deg_y(elem)
    else:
        if not args.by:
            raise UsageError("--op divides needs --by P (e.g. p:0 or x:0:1)")
        p = PrimeId.parse(args.by)
        value = tower.divides(p, elem)
        out["by"] = str(p)
        if value:
            out["quotient"] = tower.element_to_json(tower.exact_div(p, elem))
    out[args.op] = value
    _emit(out)
    return 1 if args.assert_ and value is False else 0


def cmd_tower_check(args) -> int:
    tower = _read_tower(args.tower)
    violations = self_check(ConstructionState.from_tower(tower))
    _emit({"levels": len(tower.levels), "violations": violations})
    return 1 if args.assert_ and violations else 0


def cmd_pid_build(args) -> int:
    tower, report = build_pid(parse_enumeration(args.enum), args.stages)
    _write(args.out, tower.dumps())
    _emit(report.to_json())
    return 0


def _parse_alg(ring: numring.NumberRingPresentation, text: str) -> numring.AlgInt:
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"element {text!r} is neither an integer nor a JSON array") from None
    if isinstance(value, bool) or not isinstance(value, (int, list)):
        raise UsageError(f"element {text!r} is neither an integer nor a JSON array")
    return ring.elem(value)


def cmd_numring(args) -> int:
    ring = numring.open_presentation(args.table)
    alpha = _parse_alg(ring, args.elem)
    if args.op == "norm":
        _emit({"norm": numring.norm(ring, alpha)})
        return 0
    if args.op == "is_unit":
        value = numring.nr_is_unit(ring, alpha)
        _emit({"is_unit": value})
    elif args.op == "is_prime":
        value = numring.nr_is_prime(ring, alpha)
        _emit({"is_prime": value})
    else:
        if args.rhs is None:
            raise UsageError("--op divides needs --rhs E")
        value, quotient = numring.nr_divides(ring, alpha, _parse_alg(ring, args.rhs))
        _emit({"divides": value, "quotient": quotient.to_json() if quotient else None})
    return 1 if args.assert_ and not value else 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctower", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    tower = sub.add_parser("tower", help="build and query stage-machine towers")
    tsub = tower.add_subparsers(dest="action", required=True)

    p = tsub.add_parser("build", help="run the stage machine for a predicate")
    p.add_argument("--predicate", required=True, help="JSON file, inline JSON, or builtin name")
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--out", help="write the tower JSON here")
    p.add_argument("--assert", dest="assert_", action="store_true", help="exit 1 on violations")
    p.set_defaults(func=cmd_tower_build)

    p = tsub.add_parser("query", help="evaluate an expression and query it")
    p.add_argument("--tower", required=True, help="tower JSON file ('-' for stdin)")
    p.add_argument("--expr", required=True)
    p.add_argument("--op", required=True, choices=["is_unit", "deg_x", "deg_y", "divides"])
    p.add_argument("--by", help="tracked prime id for --op divides")
    p.add_argument("--level", type=int, help="evaluate at this level (default: top)")
    p.add_argument("--assert", dest="assert_", action="store_true")
    p.set_defaults(func=cmd_tower_query)

    p = tsub.add_parser("check", help="run the stage invariants on a saved tower")
    p.add_argument("--tower", required=True)
    p.add_argument("--assert", dest="assert_", action="store_true")
    p.set_defaults(func=cmd_tower_check)

    pid = sub.add_parser("pid", help="localize integer primes on a schedule")
    psub = pid.add_subparsers(dest="action", required=True)
    p = psub.add_parser("build")
    p.add_argument("--enum", required=True, help='schedule "i@stage,i@stage"')
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pid_build)

    p = sub.add_parser("numring", help="decide questions in a ring of integers")
    p.add_argument("--table", required=True, help="presentation JSON file or bundled name")
    p.add_argument("--op", required=True, choices=["norm", "is_unit", "is_prime", "divides"])
    p.add_argument("--elem", required=True, help="integer or JSON coordinate array")
    p.add_argument("--rhs", help="dividend for --op divides")
    p.add_argument("--assert", dest="assert_", action="store_true")
    p.set_defaults(func=cmd_numring)
    return parser


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, TowerError, ExprSyntaxError, ValueError, OSError, ZeroDivisionError) as exc:
        print(f"ctower: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))
    sys.exit(run_command())


if __name__ == "__main__":
    main()
