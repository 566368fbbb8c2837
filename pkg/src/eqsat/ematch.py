"""Pattern matching over e-graphs.

A backtracking matcher over per-class node sets: each pattern level
consumes one e-node level, so termination is structural and cyclic
e-graphs need no visited set.  Variables bind canonical e-class ids;
repeated variables must hit the same class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .egraph import DirtyGraphError, EClassId, EGraph, ENode, encode_atom
from .pattern import PApply, Pattern, PLit, PVar

Bindings = dict[str, EClassId]


@dataclass
class EMatchSubst:
    root: EClassId
    bindings: dict[str, EClassId] = field(default_factory=dict)

    def key(self) -> tuple:
        return (self.root, tuple(sorted(self.bindings.items())))


def ematch(g: EGraph, p: Pattern, root: EClassId) -> list[EMatchSubst]:
    """All substitutions under which some term of class ``root`` matches ``p``.

    Deterministic: ordered by e-node insertion index, then recursive child
    order; duplicate-free.
    """
    if not g.is_clean:
        raise DirtyGraphError("ematch requires a clean graph")
    root = g.find(root)
    out = []
    seen = set()
    for bindings in _match_class(g, p, root, {}):
        subst = EMatchSubst(root, bindings)
        k = subst.key()
        if k not in seen:
            seen.add(k)
            out.append(subst)
    return out


def ematch_all(g: EGraph, p: Pattern) -> list[EMatchSubst]:
    """Union of ematch over every canonical class, ordered by class id."""
    if not g.is_clean:
        raise DirtyGraphError("ematch requires a clean graph")
    out = []
    for cid in g.canonical_ids():
        out.extend(ematch(g, p, cid))
    return out


def _match_class(g: EGraph, p: Pattern, cid: EClassId, bindings: Bindings) -> Iterator[Bindings]:
    cid = g.find(cid)
    if isinstance(p, PVar):
        name = p.var.name
        bound = bindings.get(name)
        if bound is None:
            yield {**bindings, name: cid}
        elif bound == cid:
            yield bindings
        return
    if isinstance(p, PLit):
        if ENode(encode_atom(p.atom)) in g.classes[cid].nodes:
            yield bindings
        return
    for node in g.sorted_nodes(cid):
        if node.op == p.op and len(node.children) == len(p.args):
            yield from _match_children(g, p.args, node.children, 0, bindings)


def _match_children(g, pats, children, i, bindings) -> Iterator[Bindings]:
    if i == len(pats):
        yield bindings
        return
    for b in _match_class(g, pats[i], children[i], bindings):
        yield from _match_children(g, pats, children, i + 1, b)
