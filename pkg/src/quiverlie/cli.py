"""Command-line interface.

Commands mirror the library surface: `quiver double`, expression-level
operations (`bracket`, `cycder`, `d`, `ham`), `darboux`, representation
commands (`trace-eval`, `moment`), the Calogero-Moser helpers under `cm`,
and the `verify` harness that emits one JSON record per check.

Unless --quiver is given, commands run over the doubled one-loop quiver
(vertex v, loops x and x*).  Structured output goes to stdout; progress
and timing go to stderr so that report files stay byte-deterministic.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .calogero import CMPoint, cm_membership, cm_point, coadjoint_eval
from .darboux import darboux_normalize, pullback
from .dsl import coerce, parse_expression
from .errors import QuiverLieError
from .forms import RawForm
from .necklace import SymplecticData, cyclic_derivative, hamiltonian_derivation, necklace_bracket
from .quiver import DoubledQuiver, Quiver, double_quiver, one_loop_quiver
from .reps import RepPoint, moment_map, trace_evaluate
from .verify import VerifyConfig, report_lines, run_verification_suite
from . import linalg


def _load_quiver(path: str | None) -> DoubledQuiver:
    if path is None:
        return one_loop_quiver()
    with open(path, "r", encoding="utf-8") as handle:
        return double_quiver(Quiver.from_json(json.load(handle)))


def _load_rep(quiver: DoubledQuiver, path: str) -> RepPoint:
    with open(path, "r", encoding="utf-8") as handle:
        return RepPoint.from_json(quiver, json.load(handle))


def _parse_rationals(text: str) -> list[Fraction]:
    return [Fraction(part) for part in text.replace(",", " ").split()]


def cmd_quiver_double(args) -> int:
    with open(args.quiver, "r", encoding="utf-8") as handle:
        base = Quiver.from_json(json.load(handle))
    doubled = double_quiver(base)
    payload = {
        "vertices": list(doubled.vertices),
        "arrows": [
            {"name": a.name, "tail": a.tail, "head": a.head, "star": doubled.arrows[a.star_index].name}
            for a in doubled.arrows
        ],
    }
    print(json.dumps(payload, indent=2))
    return 0


def cmd_bracket(args) -> int:
    quiver = _load_quiver(args.quiver)
    sym = SymplecticData(quiver)
    f = coerce(parse_expression(args.f, quiver), "necklace", quiver)
    g = coerce(parse_expression(args.g, quiver), "necklace", quiver)
    print(necklace_bracket(f, g, sym))
    return 0


def cmd_cycder(args) -> int:
    quiver = _load_quiver(args.quiver)
    f = coerce(parse_expression(args.expr, quiver), "necklace", quiver)
    print(cyclic_derivative(f, args.arrow))
    return 0


def cmd_d(args) -> int:
    quiver = _load_quiver(args.quiver)
    value = parse_expression(f"d({args.expr})", quiver)
    if isinstance(value, RawForm):
        value = value.project()
    print(value)
    return 0


def cmd_ham(args) -> int:
    quiver = _load_quiver(args.quiver)
    sym = SymplecticData(quiver)
    f = coerce(parse_expression(args.expr, quiver), "necklace", quiver)
    print(hamiltonian_derivation(f, sym))
    return 0


def cmd_darboux(args) -> int:
    quiver = _load_quiver(args.quiver)
    omega = coerce(parse_expression(args.form, quiver), "twoform", quiver)
    phi = darboux_normalize(omega, args.degree)
    for idx in range(len(quiver.arrows)):
        print(f"{quiver.arrows[idx].name} -> {phi.images[idx]}")
    if args.emit_certificate:
        omega0 = omega.weight_part(2)
        residual = pullback(phi, omega, args.degree) - omega0
        print(f"constant part: {omega0}")
        print(f"residual: {residual}")
    return 0


def cmd_trace_eval(args) -> int:
    quiver = _load_quiver(args.quiver)
    rho = _load_rep(quiver, args.rep)
    f = coerce(parse_expression(args.expr, quiver), "necklace", quiver)
    print(trace_evaluate(f, rho))
    return 0


def cmd_moment(args) -> int:
    quiver = _load_quiver(args.quiver)
    rho = _load_rep(quiver, args.rep)
    print(json.dumps(moment_map(rho).to_json(), indent=2, sort_keys=True))
    return 0


def cmd_cm_point(args) -> int:
    pt = cm_point(_parse_rationals(args.x), _parse_rationals(args.p))
    print(json.dumps(pt.to_json(), indent=2))
    return 0


def cmd_cm_check(args) -> int:
    with open(args.matrices, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    ok = cm_membership(linalg.as_matrix(data["X"]), linalg.as_matrix(data["Y"]))
    print("true" if ok else "false")
    return 0 if ok else 1


def cmd_cm_eval(args) -> int:
    quiver = _load_quiver(args.quiver)
    with open(args.point, "r", encoding="utf-8") as handle:
        pt = CMPoint.from_json(json.load(handle))
    f = coerce(parse_expression(args.necklace, quiver), "necklace", quiver)
    print(coadjoint_eval(f, pt))
    return 0


def cmd_verify(args) -> int:
    dims = tuple(int(x) for x in args.dims.split(",")) if args.dims else None
    cfg = VerifyConfig(
        seed=args.seed,
        trials=args.trials,
        degree=args.degree,
        dims=dims,
        darboux_degree=args.darboux_degree,
        checks=tuple(args.checks),
    )
    started = time.monotonic()
    results = run_verification_suite(cfg)
    elapsed = time.monotonic() - started
    text = report_lines(results)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    failed = [r.name for r in results if not r.passed]
    print(
        f"{len(results)} checks, {len(results) - len(failed)} passed, "
        f"{len(failed)} failed in {elapsed:.2f}s",
        file=sys.stderr,
    )
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quiverlie",
        description="Exact necklace Lie algebra and noncommutative form calculus on doubled quivers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quiver", help="quiver utilities")
    qsub = p.add_subparsers(dest="subcommand", required=True)
    pd = qsub.add_parser("double", help="print the double of a quiver")
    pd.add_argument("--quiver", required=True, help="path to a quiver JSON file")
    pd.set_defaults(func=cmd_quiver_double)

    def with_quiver(cmd, **kwargs):
        q = sub.add_parser(cmd, **kwargs)
        q.add_argument("--quiver", help="path to a quiver JSON file (default: one loop)")
        return q

    p = with_quiver("bracket", help="necklace bracket of two expressions")
    p.add_argument("f")
    p.add_argument("g")
    p.set_defaults(func=cmd_bracket)

    p = with_quiver("cycder", help="cyclic derivative of a necklace")
    p.add_argument("--arrow", required=True)
    p.add_argument("expr")
    p.set_defaults(func=cmd_cycder)

    p = with_quiver("d", help="differential of an expression")
    p.add_argument("expr")
    p.set_defaults(func=cmd_d)

    p = with_quiver("ham", help="Hamiltonian derivation of a necklace")
    p.add_argument("expr")
    p.set_defaults(func=cmd_ham)

    p = with_quiver("darboux", help="formal Darboux normalization of a closed 2-form")
    p.add_argument("--form", required=True, help="2-form expression, e.g. 'd(x) d(x*) + d(x x d(x*))'")
    p.add_argument("--degree", type=int, default=5, help="truncation degree N")
    p.add_argument("--emit-certificate", action="store_true")
    p.set_defaults(func=cmd_darboux)

    p = with_quiver("trace-eval", help="evaluate tr f at a representation point")
    p.add_argument("--rep", required=True, help="path to a RepPoint JSON file")
    p.add_argument("expr")
    p.set_defaults(func=cmd_trace_eval)

    p = with_quiver("moment", help="moment map value at a representation point")
    p.add_argument("--rep", required=True)
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("cm", help="Calogero-Moser helpers")
    cmsub = p.add_subparsers(dest="subcommand", required=True)
    pp = cmsub.add_parser("point", help="build the classical CM pair from positions/momenta")
    pp.add_argument("--x", required=True, help="comma-separated distinct rationals")
    pp.add_argument("--p", required=True, help="comma-separated rationals")
    pp.set_defaults(func=cmd_cm_point)
    pc = cmsub.add_parser("check", help="rank-one membership test for a matrix pair")
    pc.add_argument("--matrices", required=True, help='JSON file {"X": [[..]], "Y": [[..]]}')
    pc.set_defaults(func=cmd_cm_check)
    pe = cmsub.add_parser("eval", help="coadjoint evaluation of a necklace at a CM point")
    pe.add_argument("--necklace", required=True)
    pe.add_argument("--point", required=True, help="CM point JSON file")
    pe.add_argument("--quiver")
    pe.set_defaults(func=cmd_cm_eval)

    p = sub.add_parser("verify", help="run the verification suite (JSONL report)")
    p.add_argument("checks", nargs="*", help="check names (default: all)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--dims", default=None, help="comma-separated dimensions, e.g. 2 or 2,2")
    p.add_argument("--darboux-degree", type=int, default=5)
    p.add_argument("--out", default=None, help="write the JSONL report to this path")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QuiverLieError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
