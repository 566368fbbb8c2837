"""Cost-based extraction of the best term represented by an e-class.

Costs relax to a fixpoint over the class-node hypergraph (e-graphs are
cyclic, so a single bottom-up pass is not enough).  Classes reachable only
through cycles never get a finite cost and stay out of the table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .egraph import DirtyGraphError, EClassId, EGraph, ENode, display_op
from .term import Apply, Leaf, Term, print_atom

Cost = Union[int, Fraction]


class UnextractableError(RuntimeError):
    def __init__(self, eclass: EClassId):
        super().__init__(f"e-class {eclass} represents no finite term")
        self.eclass = eclass


class AstSize:
    """Every node costs 1; total cost is the term size."""

    def combine(self, op: str, child_costs: list[Cost]) -> Cost:
        return 1 + sum(child_costs)


class AstDepth:
    """Cost is the tree depth: children combine with max, not sum."""

    def combine(self, op: str, child_costs: list[Cost]) -> Cost:
        return 1 + max(child_costs, default=0)


class OpWeights:
    """weight(op) + sum of child costs; unlisted ops weigh ``default``."""

    def __init__(self, weights: Optional[dict[str, Cost]] = None, default: Cost = 1):
        self.weights = dict(weights or {})
        self.default = default

    def combine(self, op: str, child_costs: list[Cost]) -> Cost:
        return self.weights.get(op, self.default) + sum(child_costs)


CostFunction = Union[AstSize, AstDepth, OpWeights]


def parse_weights(text: str) -> OpWeights:
    """Parse ``<op> <weight>`` lines; weights are positive rationals."""
    weights: dict[str, Cost] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"weights line {lineno}: expected '<op> <weight>'")
        op, wsrc = parts
        try:
            w = Fraction(wsrc)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"weights line {lineno}: bad weight {wsrc!r}") from None
        if w <= 0:
            raise ValueError(f"weights line {lineno}: weight must be positive")
        weights[op] = w
    return OpWeights(weights)


def load_weights(path: str) -> OpWeights:
    with open(path, encoding="utf-8") as f:
        return parse_weights(f.read())


@dataclass
class Extraction:
    """Per-class best choices: canonical id -> (e-node, total cost)."""

    best: dict[EClassId, tuple[ENode, Cost]]

    def term(self, g: EGraph, root: EClassId) -> Term:
        cid = g.find(root)
        if cid not in self.best:
            raise UnextractableError(cid)
        node, _ = self.best[cid]
        atom = g.leaf_atom(node)
        if atom is not None:
            return Leaf(atom)
        return Apply(node.op, tuple(self.term(g, c) for c in node.children))


def extract_analysis(g: EGraph, cf: CostFunction) -> Extraction:
    """Relax per-class best costs to a fixpoint; ties break toward the
    e-node with the smaller insertion index."""
    if not g.is_clean:
        raise DirtyGraphError("extraction requires a clean graph")
    # cid -> (cost, insertion index, node)
    best: dict[EClassId, tuple[Cost, int, ENode]] = {}
    changed = True
    while changed:
        changed = False
        for cid in g.canonical_ids():
            for node in g.sorted_nodes(cid):
                child_costs = []
                for c in node.children:
                    entry = best.get(g.find(c))
                    if entry is None:
                        break
                    child_costs.append(entry[0])
                else:
                    cost = cf.combine(display_op(node.op), child_costs)
                    cand = (cost, g.node_order[node], node)
                    cur = best.get(cid)
                    if cur is None or cand[:2] < cur[:2]:
                        best[cid] = cand
                        changed = True
    return Extraction({cid: (node, cost) for cid, (cost, _, node) in best.items()})


def extract_best(g: EGraph, root: EClassId, cf: CostFunction) -> tuple[Term, Cost]:
    """The minimum-cost term represented by ``root`` and its cost."""
    extraction = extract_analysis(g, cf)
    cid = g.find(root)
    if cid not in extraction.best:
        raise UnextractableError(cid)
    term = extraction.term(g, cid)
    return term, extraction.best[cid][1]


def term_cost(cf: CostFunction, t: Term) -> Cost:
    """Direct cost of a concrete term under the same cost model."""
    if isinstance(t, Leaf):
        return cf.combine(print_atom(t.atom), [])
    return cf.combine(t.op, [term_cost(cf, a) for a in t.args])
