"""Rules and theories: the textual rule format and its execution helpers.

Theory file grammar (UTF-8, line oriented, ``#`` comments)::

    theory <name>
    rule <name>: <lhs-pattern> => <rhs-pattern-or-fold> [if <guard> {&& <guard>}]
    rule <name>: <lhs-pattern> == <rhs-pattern> [if <guard> {&& <guard>}]

The fold form of a right-hand side is ``fold(<op>, ?a[, ?b])`` with op in
the closed vocabulary of ``analysis.FOLD_ARITY``.  Bidirectional rules
(``==``) are stored once and expand to two directed rules at execution
time, each inheriting the guards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .analysis import FOLD_ARITY, fold_atoms
from .egraph import EGraph
from .ematch import EMatchSubst
from .pattern import (
    Guard,
    Pattern,
    PatternVar,
    TermSyntaxError,
    UnboundVariableError,
    parse_guards,
    parse_pattern,
    pattern_vars,
    print_guard,
    print_pattern,
)
from .term import Atom, BoolLit, IntLit, Leaf, Symbol, Term


class TheoryParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class DynamicRhs:
    op: str
    args: tuple[PatternVar, ...]


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Pattern
    rhs: Union[Pattern, DynamicRhs]
    bidirectional: bool = False
    guards: tuple[Guard, ...] = ()

    @property
    def kind(self) -> str:
        if isinstance(self.rhs, DynamicRhs):
            return "dynamic"
        return "bidirectional" if self.bidirectional else "directed"


@dataclass(frozen=True)
class Theory:
    name: str
    rules: tuple[Rule, ...]


@dataclass(frozen=True)
class DirectedRule:
    """One executable direction of a rule; bidirectionals yield two."""

    name: str
    lhs: Pattern
    rhs: Union[Pattern, DynamicRhs]
    guards: tuple[Guard, ...]
    is_reverse: bool = False


def expand_rules(theory: Theory) -> list[DirectedRule]:
    out = []
    for r in theory.rules:
        out.append(DirectedRule(r.name, r.lhs, r.rhs, r.guards))
        if r.bidirectional:
            assert not isinstance(r.rhs, DynamicRhs)
            out.append(DirectedRule(r.name, r.rhs, r.lhs, r.guards, is_reverse=True))
    return out


def parse_theory(text: str) -> Theory:
    name: Optional[str] = None
    rules: list[Rule] = []
    names: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if name is None:
            if not line.startswith("theory"):
                raise TheoryParseError("expected 'theory <name>'", lineno)
            parts = line.split()
            if len(parts) != 2:
                raise TheoryParseError("expected 'theory <name>'", lineno)
            name = parts[1]
            continue
        if not line.startswith("rule"):
            raise TheoryParseError(f"expected 'rule ...', got {line!r}", lineno)
        rule = _parse_rule_line(line, lineno)
        if rule.name in names:
            raise TheoryParseError(f"duplicate rule name {rule.name!r}", lineno)
        names.add(rule.name)
        rules.append(rule)
    if name is None:
        raise TheoryParseError("missing 'theory <name>' header", 1)
    return Theory(name, tuple(rules))


def parse_theory_file(path: str) -> Theory:
    with open(path, encoding="utf-8") as f:
        return parse_theory(f.read())


def _parse_rule_line(line: str, lineno: int) -> Rule:
    body = line[len("rule"):].strip()
    if ":" not in body:
        raise TheoryParseError("expected 'rule <name>: ...'", lineno)
    rulename, rest = body.split(":", 1)
    rulename = rulename.strip()
    if not rulename or any(c.isspace() for c in rulename):
        raise TheoryParseError(f"bad rule name {rulename!r}", lineno)
    sep, lhs_src, rhs_src = _split_toplevel(rest, lineno)
    rhs_src, guard_src = _split_if(rhs_src)
    try:
        lhs = parse_pattern(lhs_src)
    except TermSyntaxError as e:
        raise TheoryParseError(f"bad left-hand side: {e}", lineno) from None
    guards: tuple[Guard, ...] = ()
    if guard_src is not None:
        try:
            guards = tuple(parse_guards(guard_src))
        except ValueError as e:
            raise TheoryParseError(str(e), lineno) from None
    lhs_vars = pattern_vars(lhs)
    for g in guards:
        for a in g.args:
            if a.name not in lhs_vars:
                raise TheoryParseError(
                    f"guard variable ?{a.name} not bound by the left-hand side", lineno
                )
    rhs_src = rhs_src.strip()
    if rhs_src.startswith("fold(") or rhs_src.startswith("fold ("):
        if sep == "==":
            raise TheoryParseError("fold right-hand sides require '=>'", lineno)
        rhs: Union[Pattern, DynamicRhs] = _parse_fold(rhs_src, lineno)
        for a in rhs.args:
            if a.name not in lhs_vars:
                raise TheoryParseError(
                    f"fold variable ?{a.name} not bound by the left-hand side", lineno
                )
        return Rule(rulename, lhs, rhs, guards=guards)
    try:
        rhs = parse_pattern(rhs_src)
    except TermSyntaxError as e:
        raise TheoryParseError(f"bad right-hand side: {e}", lineno) from None
    rhs_vars = pattern_vars(rhs)
    if sep == "=>":
        extra = rhs_vars - lhs_vars
        if extra:
            raise TheoryParseError(
                f"right-hand side variable ?{sorted(extra)[0]} not bound by the left-hand side",
                lineno,
            )
        return Rule(rulename, lhs, rhs, guards=guards)
    if lhs_vars != rhs_vars:
        diff = sorted(lhs_vars ^ rhs_vars)[0]
        raise TheoryParseError(
            f"bidirectional rule must bind the same variables on both sides (?{diff})",
            lineno,
        )
    return Rule(rulename, lhs, rhs, bidirectional=True, guards=guards)


def _split_toplevel(src: str, lineno: int) -> tuple[str, str, str]:
    """Find the first whitespace-delimited '=>' or '==' at paren depth 0."""
    depth = 0
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif depth == 0 and c in "=<>" and (i == 0 or src[i - 1].isspace()):
            tok = src[i:i + 2]
            if tok in ("=>", "==") and (i + 2 == n or src[i + 2].isspace()):
                return tok, src[:i].strip(), src[i + 2:].strip()
        i += 1
    raise TheoryParseError("missing '=>' or '==' between rule sides", lineno)


def _split_if(src: str) -> tuple[str, Optional[str]]:
    """Split off a depth-0 ' if ' guard clause, if present."""
    depth = 0
    for i, c in enumerate(src):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif (
            depth == 0
            and src[i:i + 2] == "if"
            and (i == 0 or src[i - 1].isspace())
            and (i + 2 < len(src) and src[i + 2].isspace())
        ):
            return src[:i].strip(), src[i + 2:].strip()
    return src.strip(), None


def _parse_fold(src: str, lineno: int) -> DynamicRhs:
    inner = src[src.index("(") + 1:]
    if not inner.endswith(")"):
        raise TheoryParseError("malformed fold right-hand side", lineno)
    parts = [p.strip() for p in inner[:-1].split(",")]
    if len(parts) < 2:
        raise TheoryParseError("fold needs an op and at least one variable", lineno)
    op, argsrcs = parts[0], parts[1:]
    if op not in FOLD_ARITY:
        raise TheoryParseError(f"unknown fold op {op!r}", lineno)
    if len(argsrcs) != FOLD_ARITY[op]:
        raise TheoryParseError(
            f"fold op {op!r} takes {FOLD_ARITY[op]} argument(s), got {len(argsrcs)}",
            lineno,
        )
    args = []
    for a in argsrcs:
        if not a.startswith("?") or len(a) < 2:
            raise TheoryParseError(f"fold argument must be a ?variable, got {a!r}", lineno)
        args.append(PatternVar(a[1:]))
    return DynamicRhs(op, tuple(args))


def print_rule(r: Rule) -> str:
    sep = "==" if r.bidirectional else "=>"
    if isinstance(r.rhs, DynamicRhs):
        rhs = f"fold({r.rhs.op}, {', '.join('?' + a.name for a in r.rhs.args)})"
    else:
        rhs = print_pattern(r.rhs)
    out = f"rule {r.name}: {print_pattern(r.lhs)} {sep} {rhs}"
    if r.guards:
        out += " if " + " && ".join(print_guard(g) for g in r.guards)
    return out


def print_theory(th: Theory) -> str:
    return "\n".join([f"theory {th.name}"] + [print_rule(r) for r in th.rules]) + "\n"


def eval_dynamic(d: DynamicRhs, bindings: dict[str, Atom]) -> Optional[Term]:
    """Fold to a literal term, or None when undefined on these inputs."""
    atoms = []
    for a in d.args:
        if a.name not in bindings:
            raise UnboundVariableError(a.name)
        atoms.append(bindings[a.name])
    result = fold_atoms(d.op, atoms)
    return Leaf(result) if result is not None else None


def check_guard_eclass(g: Guard, subst: EMatchSubst, graph: EGraph) -> bool:
    """Evaluate a guard against the analysis data of the bound classes.

    Unknown analysis means the guard fails (conservative).  ``eq`` is class
    equivalence; ``is_sym`` checks for a symbol leaf among the class nodes.
    """
    ids = []
    for a in g.args:
        if a.name not in subst.bindings:
            raise UnboundVariableError(a.name)
        ids.append(graph.find(subst.bindings[a.name]))
    if g.pred == "eq":
        return ids[0] == ids[1]
    cid = ids[0]
    if g.pred == "is_sym":
        return any(
            isinstance(graph.leaf_atom(n), Symbol) for n in graph.classes[cid].nodes
        )
    value = graph.classes[cid].analysis
    if g.pred == "is_lit":
        return value is not None
    if g.pred == "is_int":
        return isinstance(value, IntLit)
    if g.pred == "is_bool":
        return isinstance(value, BoolLit)
    if g.pred == "nonzero":
        return isinstance(value, IntLit) and value.value != 0
    if g.pred == "is_zero":
        return isinstance(value, IntLit) and value.value == 0
    raise ValueError(f"unknown guard predicate {g.pred!r}")
