"""Concrete expression trees and their s-expression syntax.

A term is either a leaf atom or an operator application::

    atom                  a  42  true  2.5
    application           (op arg1 ... argN)     N >= 1

Atoms are symbols, 64-bit signed integers, booleans (``true``/``false``),
or floats (tokens containing ``.`` or an exponent).  Symbols may not begin
with ``?`` or a digit and may not contain whitespace or parentheses.
``#`` starts a comment that runs to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class TermSyntaxError(ValueError):
    """Malformed term text; ``offset`` is the byte offset into the input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Symbol:
    name: str


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


class FloatLit:
    """Float literal compared by its canonical text, not IEEE ``==``.

    Distinguishes 0.0 from -0.0 and treats nan as equal to nan, so atom
    equality stays a plain equivalence relation.
    """

    __slots__ = ("value",)

    def __init__(self, value: float):
        object.__setattr__(self, "value", float(value))

    def __setattr__(self, *_):
        raise AttributeError("FloatLit is immutable")

    def __eq__(self, other):
        return isinstance(other, FloatLit) and repr(self.value) == repr(other.value)

    def __hash__(self):
        return hash(("FloatLit", repr(self.value)))

    def __repr__(self):
        return f"FloatLit({self.value!r})"


Atom = Union[Symbol, IntLit, BoolLit, FloatLit]


@dataclass(frozen=True)
class Leaf:
    atom: Atom


@dataclass(frozen=True)
class Apply:
    op: str
    args: tuple["Term", ...]


Term = Union[Leaf, Apply]

_INT_RE = re.compile(r"-?[0-9]+\Z")
# tokens that must be numeric literals: leading digit, or sign/dot then digit
_NUMERIC_START_RE = re.compile(r"-?\.?[0-9]")


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    """Yield (kind, token, char_offset) with kind in {'(', ')', 'atom'}.

    Skips whitespace and ``#`` comments.
    """
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, c, i
            i += 1
        else:
            start = i
            while i < n and not text[i].isspace() and text[i] not in "()#":
                i += 1
            yield "atom", text[start:i], start
    yield "eof", "", n


def atom_from_token(token: str, text: str, pos: int) -> Atom:
    """Classify a bare token as an Atom; raise TermSyntaxError if malformed."""
    if token == "true":
        return BoolLit(True)
    if token == "false":
        return BoolLit(False)
    if _INT_RE.match(token):
        value = int(token)
        if not INT_MIN <= value <= INT_MAX:
            raise TermSyntaxError(
                f"integer literal out of 64-bit range: {token}", _byte_offset(text, pos)
            )
        return IntLit(value)
    if _NUMERIC_START_RE.match(token):
        # looks numeric, so it must be a float with '.' or exponent
        if "." in token or "e" in token or "E" in token:
            try:
                return FloatLit(float(token))
            except ValueError:
                pass
        raise TermSyntaxError(f"malformed literal: {token!r}", _byte_offset(text, pos))
    if token.startswith("?"):
        raise TermSyntaxError(
            f"symbols may not begin with '?': {token!r}", _byte_offset(text, pos)
        )
    return Symbol(token)


class _Cursor:
    """Token stream with one-token lookahead over a materialized list."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = list(tokenize(text))
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def error(self, message: str, pos: int):
        raise TermSyntaxError(message, _byte_offset(self.text, pos))


def parse_term(text: str) -> Term:
    """Parse a single s-expression into a Term.

    Raises TermSyntaxError (with byte offset) on unbalanced parentheses,
    empty ``()`` or zero-argument ``(f)`` applications, trailing input,
    or malformed literals.
    """
    cur = _Cursor(text)
    term = _parse_one(cur)
    kind, _, pos = cur.peek()
    if kind != "eof":
        cur.error("trailing input after term", pos)
    return term


def _parse_one(cur: _Cursor) -> Term:
    kind, tok, pos = cur.next()
    if kind == "eof":
        cur.error("unexpected end of input", pos)
    if kind == ")":
        cur.error("unexpected ')'", pos)
    if kind == "atom":
        return Leaf(atom_from_token(tok, cur.text, pos))
    # '(' op arg1 ... argN ')'
    okind, otok, opos = cur.next()
    if okind == ")":
        cur.error("empty application '()'", opos)
    if okind != "atom":
        cur.error("operator must be a symbol", opos)
    op = atom_from_token(otok, cur.text, opos)
    if not isinstance(op, Symbol):
        cur.error(f"operator must be a symbol, got literal {otok!r}", opos)
    args: list[Term] = []
    while True:
        kind, _, pos = cur.peek()
        if kind == ")":
            cur.next()
            if not args:
                cur.error(f"zero-argument application ({otok})", pos)
            return Apply(op.name, tuple(args))
        if kind == "eof":
            cur.error("unbalanced '(': missing ')'", pos)
        args.append(_parse_one(cur))


def print_atom(atom: Atom) -> str:
    if isinstance(atom, Symbol):
        return atom.name
    if isinstance(atom, IntLit):
        return str(atom.value)
    if isinstance(atom, BoolLit):
        return "true" if atom.value else "false"
    return repr(atom.value)


def print_term(t: Term) -> str:
    """Canonical text: single spaces, no extra whitespace; reparses equal."""
    if isinstance(t, Leaf):
        return print_atom(t.atom)
    return "(" + " ".join([t.op] + [print_term(a) for a in t.args]) + ")"


def term_size(t: Term) -> int:
    """Number of nodes in the tree (>= 1)."""
    if isinstance(t, Leaf):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def term_depth(t: Term) -> int:
    """Longest root-to-leaf path, counted in nodes (>= 1)."""
    if isinstance(t, Leaf):
        return 1
    return 1 + max(term_depth(a) for a in t.args)


def subterms(t: Term) -> Iterator[tuple[tuple[int, ...], Term]]:
    """Pre-order traversal yielding (path, subterm), root path = ()."""
    stack: list[tuple[tuple[int, ...], Term]] = [((), t)]
    while stack:
        path, cur = stack.pop()
        yield path, cur
        if isinstance(cur, Apply):
            for i in range(len(cur.args) - 1, -1, -1):
                stack.append((path + (i,), cur.args[i]))
