"""Rewrite-rule templates: pattern variables, matching, and guards.

Pattern syntax is term syntax where any atom position may be a variable
written ``?name``.  Variables cannot appear in operator position.  Guards
follow ``if`` in rule source as ``pred(?x)`` terms joined by ``&&``.

Substitutions are keyed by variable name (a plain str).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .term import (
    Apply,
    Atom,
    BoolLit,
    FloatLit,
    IntLit,
    Leaf,
    Symbol,
    Term,
    TermSyntaxError,
    _Cursor,
    atom_from_token,
    print_atom,
)


class UnboundVariableError(KeyError):
    def __init__(self, name: str):
        super().__init__(f"unbound pattern variable ?{name}")
        self.name = name


@dataclass(frozen=True)
class PatternVar:
    name: str


@dataclass(frozen=True)
class PVar:
    var: PatternVar


@dataclass(frozen=True)
class PLit:
    atom: Atom


@dataclass(frozen=True)
class PApply:
    op: str
    args: tuple["Pattern", ...]


Pattern = Union[PVar, PLit, PApply]

# guard predicate name -> arity
GUARD_ARITY = {
    "is_int": 1,
    "is_bool": 1,
    "is_sym": 1,
    "is_lit": 1,
    "nonzero": 1,
    "is_zero": 1,
    "eq": 2,
}


@dataclass(frozen=True)
class Guard:
    pred: str
    args: tuple[PatternVar, ...]


TermSubst = dict[str, Term]


def pattern_vars(p: Pattern) -> set[str]:
    if isinstance(p, PVar):
        return {p.var.name}
    if isinstance(p, PLit):
        return set()
    out: set[str] = set()
    for a in p.args:
        out |= pattern_vars(a)
    return out


def parse_pattern(text: str) -> Pattern:
    """Parse pattern source; ``?name`` atoms become variables."""
    cur = _Cursor(text)
    pat = _parse_pattern_one(cur)
    kind, _, pos = cur.peek()
    if kind != "eof":
        cur.error("trailing input after pattern", pos)
    return pat


_VAR_RE = re.compile(r"\?([^\s()#?][^\s()#]*)\Z")


def _var_from_token(tok: str, cur: _Cursor, pos: int) -> PatternVar:
    m = _VAR_RE.match(tok)
    if not m:
        cur.error(f"malformed pattern variable {tok!r}", pos)
    return PatternVar(m.group(1))


def _parse_pattern_one(cur: _Cursor) -> Pattern:
    kind, tok, pos = cur.next()
    if kind == "eof":
        cur.error("unexpected end of input", pos)
    if kind == ")":
        cur.error("unexpected ')'", pos)
    if kind == "atom":
        if tok.startswith("?"):
            return PVar(_var_from_token(tok, cur, pos))
        return PLit(atom_from_token(tok, cur.text, pos))
    okind, otok, opos = cur.next()
    if okind == ")":
        cur.error("empty application '()'", opos)
    if okind != "atom":
        cur.error("operator must be a symbol", opos)
    if otok.startswith("?"):
        cur.error("pattern variables cannot appear in operator position", opos)
    op = atom_from_token(otok, cur.text, opos)
    if not isinstance(op, Symbol):
        cur.error(f"operator must be a symbol, got literal {otok!r}", opos)
    args: list[Pattern] = []
    while True:
        kind, _, pos = cur.peek()
        if kind == ")":
            cur.next()
            if not args:
                cur.error(f"zero-argument application ({otok})", pos)
            return PApply(op.name, tuple(args))
        if kind == "eof":
            cur.error("unbalanced '(': missing ')'", pos)
        args.append(_parse_pattern_one(cur))


def print_pattern(p: Pattern) -> str:
    if isinstance(p, PVar):
        return f"?{p.var.name}"
    if isinstance(p, PLit):
        return print_atom(p.atom)
    return "(" + " ".join([p.op] + [print_pattern(a) for a in p.args]) + ")"


def pattern_of_term(t: Term) -> Pattern:
    """Embed a concrete term as a variable-free pattern."""
    if isinstance(t, Leaf):
        return PLit(t.atom)
    return PApply(t.op, tuple(pattern_of_term(a) for a in t.args))


def match_term(p: Pattern, t: Term) -> Optional[TermSubst]:
    """The unique substitution with instantiate(p, s) == t, or None.

    Repeated variables must bind structurally equal subterms.  Guards are
    not evaluated here.
    """
    subst: TermSubst = {}
    return subst if _match_into(p, t, subst) else None


def _match_into(p: Pattern, t: Term, subst: TermSubst) -> bool:
    if isinstance(p, PVar):
        name = p.var.name
        if name in subst:
            return subst[name] == t
        subst[name] = t
        return True
    if isinstance(p, PLit):
        return isinstance(t, Leaf) and t.atom == p.atom
    if not isinstance(t, Apply) or t.op != p.op or len(t.args) != len(p.args):
        return False
    return all(_match_into(pa, ta, subst) for pa, ta in zip(p.args, t.args))


def instantiate(p: Pattern, subst: TermSubst) -> Term:
    """Replace each variable by its binding; raises UnboundVariableError."""
    if isinstance(p, PVar):
        try:
            return subst[p.var.name]
        except KeyError:
            raise UnboundVariableError(p.var.name) from None
    if isinstance(p, PLit):
        return Leaf(p.atom)
    return Apply(p.op, tuple(instantiate(a, subst) for a in p.args))


def parse_guards(text: str) -> list[Guard]:
    """Parse a guard conjunction: ``pred(?x) && pred(?y,?z) && ...``."""
    guards = []
    for part in text.split("&&"):
        guards.append(_parse_guard(part.strip()))
    return guards


_GUARD_RE = re.compile(r"(\w+)\s*\(([^)]*)\)\Z")


def _parse_guard(src: str) -> Guard:
    m = _GUARD_RE.match(src)
    if not m:
        raise ValueError(f"malformed guard {src!r}")
    pred, argsrc = m.group(1), m.group(2)
    if pred not in GUARD_ARITY:
        raise ValueError(f"unknown guard predicate {pred!r}")
    args = []
    for piece in argsrc.split(","):
        piece = piece.strip()
        if not piece.startswith("?") or len(piece) < 2:
            raise ValueError(f"guard argument must be a ?variable, got {piece!r}")
        args.append(PatternVar(piece[1:]))
    if len(args) != GUARD_ARITY[pred]:
        raise ValueError(
            f"guard {pred} takes {GUARD_ARITY[pred]} argument(s), got {len(args)}"
        )
    return Guard(pred, tuple(args))


def print_guard(g: Guard) -> str:
    return f"{g.pred}({','.join('?' + a.name for a in g.args)})"


def check_guard_term(g: Guard, subst: TermSubst) -> bool:
    """Evaluate a guard against concrete bound subterms.

    Kind predicates are false for applications; nonzero/is_zero only
    trust literal leaves (a bare symbol is never known nonzero).
    """
    bound = []
    for a in g.args:
        if a.name not in subst:
            raise UnboundVariableError(a.name)
        bound.append(subst[a.name])
    if g.pred == "eq":
        return bound[0] == bound[1]
    t = bound[0]
    if not isinstance(t, Leaf):
        return False
    atom = t.atom
    if g.pred == "is_int":
        return isinstance(atom, IntLit)
    if g.pred == "is_bool":
        return isinstance(atom, BoolLit)
    if g.pred == "is_sym":
        return isinstance(atom, Symbol)
    if g.pred == "is_lit":
        return isinstance(atom, (IntLit, BoolLit, FloatLit))
    if g.pred == "nonzero":
        if isinstance(atom, IntLit):
            return atom.value != 0
        if isinstance(atom, FloatLit):
            return atom.value != 0.0
        return False
    if g.pred == "is_zero":
        if isinstance(atom, IntLit):
            return atom.value == 0
        if isinstance(atom, FloatLit):
            return atom.value == 0.0
        return False
    raise ValueError(f"unknown guard predicate {g.pred!r}")
