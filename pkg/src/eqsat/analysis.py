"""E-class analyses over a join-semilattice, plus the constant-fold domain.

An analysis value of the built-in domain is either ``None`` (unknown) or a
known IntLit/BoolLit atom.  ``join`` is the semilattice join: unknown is
bottom, and joining two distinct known constants is an inconsistency (the
theory proved two different constants equal), which aborts the run.

``fold_atoms`` is the single source of truth for 64-bit fold arithmetic;
dynamic right-hand sides in the rules module reuse it.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Optional

from .term import INT_MAX, INT_MIN, Atom, BoolLit, IntLit, print_atom

if TYPE_CHECKING:  # pragma: no cover
    from .egraph import EClassId, EGraph, ENode

ConstFoldValue = Optional[Atom]


class AnalysisInconsistencyError(RuntimeError):
    """Two distinct constants were proven equal; the theory is unsound."""

    def __init__(self, a: Atom, b: Atom, eclass: Optional[int] = None):
        self.a, self.b, self.eclass = a, b, eclass
        where = f" in e-class {eclass}" if eclass is not None else ""
        super().__init__(
            f"analysis inconsistency{where}: {print_atom(a)} joined with {print_atom(b)}"
        )


# fold op -> arity; the closed vocabulary for dynamic right-hand sides
FOLD_ARITY = {
    "+": 2,
    "-": 2,
    "*": 2,
    "/": 2,
    "<<": 2,
    ">>": 2,
    "neg": 1,
    "and": 2,
    "or": 2,
    "not": 1,
    "<": 2,
    "<=": 2,
    "==": 2,
}


def _fit(value: int) -> Optional[Atom]:
    return IntLit(value) if INT_MIN <= value <= INT_MAX else None


def fold_atoms(op: str, args: list[Atom]) -> Optional[Atom]:
    """Exact 64-bit fold; None when undefined on the inputs.

    Undefined covers: overflow, inexact or zero division, shifts outside
    [0, 63], and any non-integer operand to an arithmetic op (booleans go
    with and/or/not only; floats and symbols never fold).
    """
    if op not in FOLD_ARITY or len(args) != FOLD_ARITY[op]:
        return None
    if op in ("and", "or", "not"):
        if not all(isinstance(a, BoolLit) for a in args):
            return None
        vals = [a.value for a in args]
        if op == "and":
            return BoolLit(vals[0] and vals[1])
        if op == "or":
            return BoolLit(vals[0] or vals[1])
        return BoolLit(not vals[0])
    if op == "==" and all(isinstance(a, BoolLit) for a in args):
        return BoolLit(args[0].value == args[1].value)
    if not all(isinstance(a, IntLit) for a in args):
        return None
    ints = [a.value for a in args]
    if op == "+":
        return _fit(ints[0] + ints[1])
    if op == "-":
        return _fit(ints[0] - ints[1])
    if op == "*":
        return _fit(ints[0] * ints[1])
    if op == "neg":
        return _fit(-ints[0])
    if op == "/":
        if ints[1] == 0 or ints[0] % ints[1] != 0:
            return None
        return _fit(ints[0] // ints[1])
    if op == "<<":
        if not 0 <= ints[1] <= 63:
            return None
        return _fit(ints[0] << ints[1])
    if op == ">>":
        if not 0 <= ints[1] <= 63:
            return None
        return _fit(ints[0] >> ints[1])
    if op == "<":
        return BoolLit(ints[0] < ints[1])
    if op == "<=":
        return BoolLit(ints[0] <= ints[1])
    if op == "==":
        return BoolLit(ints[0] == ints[1])
    raise AssertionError(op)


class AnalysisDomain:
    """Interface: make a value for a node, join values, modify a class."""

    def make(self, graph: "EGraph", node: "ENode") -> object:
        raise NotImplementedError

    def join(self, a: object, b: object) -> object:
        raise NotImplementedError

    def modify(self, graph: "EGraph", eclass: "EClassId") -> None:
        pass


class NoAnalysis(AnalysisDomain):
    """Inert domain: every class stays unknown."""

    def make(self, graph, node):
        return None

    def join(self, a, b):
        return None


class ConstFoldAnalysis(AnalysisDomain):
    """Constant propagation: literal leaves seed values, folds carry them up."""

    def make(self, graph: "EGraph", node: "ENode") -> ConstFoldValue:
        if not node.children:
            atom = graph.leaf_atom(node)
            return atom if isinstance(atom, (IntLit, BoolLit)) else None
        child_vals = [graph.classes[graph.find(c)].analysis for c in node.children]
        if any(v is None for v in child_vals):
            return None
        return fold_atoms(node.op, child_vals)

    def join(self, a: ConstFoldValue, b: ConstFoldValue) -> ConstFoldValue:
        if a is None:
            return b
        if b is None:
            return a
        if a == b:
            return a
        raise AnalysisInconsistencyError(a, b)

    def modify(self, graph: "EGraph", eclass: "EClassId") -> None:
        """Materialize a known constant as a literal leaf in its class."""
        value = graph.classes[graph.find(eclass)].analysis
        if value is not None:
            graph.unify_leaf(eclass, value)
