"""Command-line interface: simplify, check, classic, dot.

Exit codes: 0 success, 1 parse/config error, 2 analysis inconsistency,
3 check could not prove equality, 4 classic stopped without a fixpoint.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from .analysis import AnalysisInconsistencyError
from .classic import rewrite_fixpoint
from .egraph import EGraph
from .extract import AstDepth, AstSize, extract_best, load_weights
from .rules import TheoryParseError, parse_theory_file
from .saturate import SaturationParams, prove_equal, run_saturation
from .term import TermSyntaxError, parse_term, print_term


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 by default; that code is reserved here
    def error(self, message):
        raise _CliError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="eqsat", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def saturation_flags(sp):
        sp.add_argument("--iters", type=int, default=30)
        sp.add_argument("--nodes", type=int, default=10000)
        sp.add_argument("--time-ms", type=int, default=5000, dest="time_ms")
        sp.add_argument("--scheduler", choices=["simple", "backoff"], default="simple")

    sp = sub.add_parser("simplify", help="saturate and extract the best term")
    sp.add_argument("--theory", required=True)
    sp.add_argument("--expr", required=True)
    sp.add_argument("--cost", default="ast-size",
                    help="ast-size | ast-depth | path to a weights file")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--dot", metavar="DIR",
                    help="write snap-NNN.dot per iteration boundary")
    saturation_flags(sp)

    sp = sub.add_parser("check", help="prove two expressions equal")
    sp.add_argument("--theory", required=True)
    sp.add_argument("--expr", required=True)
    sp.add_argument("--expr2", required=True)
    sp.add_argument("--json", action="store_true")
    saturation_flags(sp)

    sp = sub.add_parser("classic", help="fixpoint rewriting on concrete terms")
    sp.add_argument("--theory", required=True)
    sp.add_argument("--expr", required=True)
    sp.add_argument("--iters", type=int, default=30, help="step limit")
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("dot", help="print the e-graph of an expression as DOT")
    sp.add_argument("--expr", required=True)
    sp.add_argument("--theory", help="saturate under this theory first")
    saturation_flags(sp)
    return p


def _params(args) -> SaturationParams:
    return SaturationParams(
        iter_limit=args.iters,
        node_limit=args.nodes,
        time_limit_ms=args.time_ms,
        scheduler=args.scheduler,
    )


def _params_json(args) -> dict:
    return {
        "iters": args.iters,
        "nodes": args.nodes,
        "time_ms": args.time_ms,
        "scheduler": args.scheduler,
    }


def _cost_fn(spec: str):
    if spec == "ast-size":
        return AstSize()
    if spec == "ast-depth":
        return AstDepth()
    return load_weights(spec)


def _cost_json(cost):
    if isinstance(cost, Fraction):
        return int(cost) if cost.denominator == 1 else str(cost)
    return cost


def _emit_json(doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _cmd_simplify(args) -> int:
    theory = parse_theory_file(args.theory)
    term = parse_term(args.expr)
    cost_fn = _cost_fn(args.cost)
    g = EGraph()
    root = g.add_term(term)
    hook = None
    if args.dot:
        os.makedirs(args.dot, exist_ok=True)

        def hook(graph, iteration):
            path = os.path.join(args.dot, f"snap-{iteration:03d}.dot")
            with open(path, "w", encoding="utf-8") as f:
                f.write(graph.dump_dot())

    report = run_saturation(g, theory, _params(args), iter_hook=hook)
    best, cost = extract_best(g, root, cost_fn)
    if args.json:
        _emit_json({
            "result": print_term(best),
            "cost": _cost_json(cost),
            "report": report.to_json_dict(),
            "params": _params_json(args),
        })
    else:
        print(print_term(best))
        if report.stop_reason != "Saturated":
            print(f"stop_reason: {report.stop_reason}", file=sys.stderr)
    return 0


def _cmd_check(args) -> int:
    theory = parse_theory_file(args.theory)
    t1 = parse_term(args.expr)
    t2 = parse_term(args.expr2)
    outcome = prove_equal(EGraph(), theory, t1, t2, _params(args))
    if outcome.equal:
        if args.json:
            _emit_json({"result": "equal", "params": _params_json(args)})
        else:
            print("equal")
        return 0
    reason = outcome.report.stop_reason
    if args.json:
        _emit_json({
            "result": "unknown",
            "stop_reason": reason,
            "report": outcome.report.to_json_dict(),
            "params": _params_json(args),
        })
    else:
        print(f"unknown ({reason})")
    return 3


def _cmd_classic(args) -> int:
    theory = parse_theory_file(args.theory)
    term = parse_term(args.expr)
    outcome = rewrite_fixpoint(term, theory, args.iters)
    if args.json:
        doc = {
            "result": print_term(outcome.result),
            "status": outcome.status,
            "steps": outcome.steps,
        }
        if args.trace:
            doc["trace"] = [
                {
                    "rule": s.rule,
                    "path": list(s.path),
                    "before": print_term(s.before),
                    "after": print_term(s.after),
                }
                for s in outcome.trace
            ]
        _emit_json(doc)
    else:
        print(print_term(outcome.result))
        print(f"{outcome.status} after {outcome.steps} step(s)")
        if args.trace:
            for i, s in enumerate(outcome.trace, start=1):
                path = ".".join(map(str, s.path)) or "root"
                print(f"  {i}. {s.rule} at {path}: "
                      f"{print_term(s.before)} -> {print_term(s.after)}")
    return 0 if outcome.status == "Fixpoint" else 4


def _cmd_dot(args) -> int:
    g = EGraph()
    g.add_term(parse_term(args.expr))
    if args.theory:
        theory = parse_theory_file(args.theory)
        run_saturation(g, theory, _params(args))
    sys.stdout.write(g.dump_dot())
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "simplify": _cmd_simplify,
            "check": _cmd_check,
            "classic": _cmd_classic,
            "dot": _cmd_dot,
        }[args.command]
        return handler(args)
    except _CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (TermSyntaxError, TheoryParseError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except AnalysisInconsistencyError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
