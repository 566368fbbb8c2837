"""The e-graph: union-find over e-class ids, hashconsed e-nodes, deferred repair.

Merges only record work; ``rebuild`` processes the worklist to a fixpoint,
restoring the hashcons and congruence invariants.  A graph with an empty
worklist is *clean*; pattern matching and DOT export require that state.

Literal leaves are encoded into the e-node op key with a ``?``-prefixed
kind tag (symbols cannot begin with ``?``), so the hashcons needs a single
key type.  ``leaf_atom`` decodes them back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .analysis import AnalysisDomain, AnalysisInconsistencyError, ConstFoldAnalysis
from .term import Apply, Atom, BoolLit, FloatLit, IntLit, Leaf, Symbol, Term

EClassId = int


class CapacityError(RuntimeError):
    """Adding a node would exceed the configured maximum."""


class DirtyGraphError(RuntimeError):
    """Operation requires a clean graph; call rebuild() first."""


class InvalidIdError(IndexError):
    def __init__(self, eclass):
        super().__init__(f"invalid e-class id {eclass!r}")


@dataclass(frozen=True)
class ENode:
    op: str
    children: tuple[EClassId, ...] = ()


@dataclass
class EClass:
    id: EClassId
    nodes: dict[ENode, None] = field(default_factory=dict)
    parents: list[tuple[ENode, EClassId]] = field(default_factory=list)
    analysis: object = None


def encode_atom(atom: Atom) -> str:
    if isinstance(atom, Symbol):
        return atom.name
    if isinstance(atom, IntLit):
        return f"?i:{atom.value}"
    if isinstance(atom, BoolLit):
        return "?b:true" if atom.value else "?b:false"
    return f"?f:{atom.value!r}"


def decode_leaf_op(op: str) -> Atom:
    if op.startswith("?i:"):
        return IntLit(int(op[3:]))
    if op.startswith("?b:"):
        return BoolLit(op[3:] == "true")
    if op.startswith("?f:"):
        return FloatLit(float(op[3:]))
    return Symbol(op)


def display_op(op: str) -> str:
    """Human-readable op text: literal encodings lose their kind tag."""
    if op.startswith(("?i:", "?b:", "?f:")):
        return op[3:]
    return op


class EGraph:
    """Mutable e-graph with a pluggable analysis domain (const-fold by default)."""

    def __init__(self, domain: Optional[AnalysisDomain] = None,
                 max_nodes: Optional[int] = None):
        self.domain = domain if domain is not None else ConstFoldAnalysis()
        self.max_nodes = max_nodes
        self.classes: dict[EClassId, EClass] = {}
        self.hashcons: dict[ENode, EClassId] = {}
        self.worklist: list[EClassId] = []
        self.node_order: dict[ENode, int] = {}
        self.version = 0  # bumped on every new node and every real union
        self._uf_parent: list[EClassId] = []
        self._uf_size: list[int] = []
        self._order_counter = 0

    # ------------------------------------------------------------- queries

    @property
    def is_clean(self) -> bool:
        return not self.worklist

    @property
    def node_count(self) -> int:
        return len(self.hashcons)

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def find(self, eclass: EClassId) -> EClassId:
        parent = self._uf_parent
        if not isinstance(eclass, int) or not 0 <= eclass < len(parent):
            raise InvalidIdError(eclass)
        root = eclass
        while parent[root] != root:
            root = parent[root]
        while parent[eclass] != root:  # path compression
            parent[eclass], eclass = root, parent[eclass]
        return root

    def canonicalize(self, node: ENode) -> ENode:
        return ENode(node.op, tuple(self.find(c) for c in node.children))

    def canonical_ids(self) -> list[EClassId]:
        return sorted(self.classes)

    def sorted_nodes(self, eclass: EClassId) -> list[ENode]:
        """Nodes of a class in insertion order (the deterministic order)."""
        cls = self.classes[self.find(eclass)]
        return sorted(cls.nodes, key=self.node_order.__getitem__)

    def leaf_atom(self, node: ENode) -> Optional[Atom]:
        return decode_leaf_op(node.op) if not node.children else None

    # ----------------------------------------------------------- insertion

    def add_term(self, term: Term) -> EClassId:
        """Hashcons a term bottom-up; re-adding allocates nothing new."""
        if isinstance(term, Leaf):
            return self.add_atom(term.atom)
        children = [self.add_term(a) for a in term.args]
        return self.add_node(term.op, children)

    def add_atom(self, atom: Atom) -> EClassId:
        return self._add_enode(ENode(encode_atom(atom)), checked=True)

    def add_node(self, op: str, children: Iterable[EClassId]) -> EClassId:
        node = ENode(op, tuple(self.find(c) for c in children))
        return self._add_enode(node, checked=True)

    def _add_enode(self, node: ENode, checked: bool) -> EClassId:
        existing = self.hashcons.get(node)
        if existing is not None:
            return self.find(existing)
        if checked and self.max_nodes is not None and len(self.hashcons) >= self.max_nodes:
            raise CapacityError(f"node count would exceed maximum {self.max_nodes}")
        cid = len(self._uf_parent)
        self._uf_parent.append(cid)
        self._uf_size.append(1)
        cls = EClass(cid)
        cls.nodes[node] = None
        self.classes[cid] = cls
        self.hashcons[node] = cid
        self.node_order.setdefault(node, self._next_order())
        for child in node.children:
            self.classes[child].parents.append((node, cid))
        cls.analysis = self.domain.make(self, node)
        self.version += 1
        return cid

    def _next_order(self) -> int:
        self._order_counter += 1
        return self._order_counter

    def unify_leaf(self, eclass: EClassId, atom: Atom) -> None:
        """Ensure the literal leaf for ``atom`` lives in (or merges with) a class.

        Used by analysis modify hooks; exempt from the capacity limit and
        idempotent.
        """
        node = ENode(encode_atom(atom))
        cid = self.find(eclass)
        existing = self.hashcons.get(node)
        if existing is not None:
            other = self.find(existing)
            if other != cid:
                self.merge(other, cid)
            return
        cls = self.classes[cid]
        cls.nodes[node] = None
        self.hashcons[node] = cid
        self.node_order.setdefault(node, self._next_order())
        self.version += 1

    # ------------------------------------------------------- union / repair

    def merge(self, x: EClassId, y: EClassId) -> EClassId:
        """Union two classes; defers invariant repair to rebuild()."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        # union by size, ties toward the smaller id as canonical
        if self._uf_size[rx] < self._uf_size[ry] or (
            self._uf_size[rx] == self._uf_size[ry] and ry < rx
        ):
            rx, ry = ry, rx
        self._uf_parent[ry] = rx
        self._uf_size[rx] += self._uf_size[ry]
        self.version += 1
        winner, loser = self.classes[rx], self.classes.pop(ry)
        winner.nodes.update(loser.nodes)
        winner.parents.extend(loser.parents)
        try:
            winner.analysis = self.domain.join(winner.analysis, loser.analysis)
        except AnalysisInconsistencyError as e:
            raise AnalysisInconsistencyError(e.a, e.b, rx) from None
        self.worklist.append(rx)
        return rx

    def rebuild(self) -> None:
        """Process the worklist to a fixpoint; the graph is clean on return.

        Two phases: repair merged classes until no work remains (hashcons
        re-keying, congruence unions, upward analysis propagation, modify
        hooks), then one sweep recanonicalizing every class's node set and
        regenerating the hashcons so stale node forms disappear.
        """
        repaired = False
        while self.worklist:
            repaired = True
            todo = sorted({self.find(c) for c in self.worklist})
            self.worklist = []
            for cid in todo:
                self._repair(self.find(cid))
        if repaired:
            self._rebuild_classes()

    def _repair(self, cid: EClassId) -> None:
        cls = self.classes[cid]
        old_parents = cls.parents
        cls.parents = []
        new_parents: dict[ENode, EClassId] = {}
        for pnode, pcid in old_parents:
            self.hashcons.pop(pnode, None)
            pnode2 = self.canonicalize(pnode)
            pcid2 = self.find(pcid)
            dup = new_parents.get(pnode2)
            if dup is not None:
                dup = self.find(dup)
                if dup != pcid2:  # two parents collapsed: congruence
                    pcid2 = self.merge(dup, pcid2)
            else:
                existing = self.hashcons.get(pnode2)
                if existing is not None:
                    existing = self.find(existing)
                    if existing != pcid2:
                        pcid2 = self.merge(existing, pcid2)
            self.hashcons[pnode2] = pcid2
            new_parents[pnode2] = pcid2
        # mid-loop merges may have moved this class or grown its parent
        # list, so extend the current canonical class rather than overwrite
        final = self.classes[self.find(cid)]
        final.parents.extend((n, self.find(c)) for n, c in new_parents.items())
        # children changed, so the parents' make values may improve
        for pnode2, pcid2 in new_parents.items():
            host = self.find(pcid2)
            hcls = self.classes[host]
            made = self.domain.make(self, self.canonicalize(pnode2))
            try:
                joined = self.domain.join(hcls.analysis, made)
            except AnalysisInconsistencyError as e:
                raise AnalysisInconsistencyError(e.a, e.b, host) from None
            if joined != hcls.analysis:
                hcls.analysis = joined
                self.worklist.append(host)
        self.domain.modify(self, self.find(cid))

    def _rebuild_classes(self) -> None:
        new_hashcons: dict[ENode, EClassId] = {}
        for cid in sorted(self.classes):
            cls = self.classes[cid]
            new_nodes: dict[ENode, None] = {}
            for node in cls.nodes:
                node2 = self.canonicalize(node)
                if node2 != node:
                    order = self.node_order[node]
                    prev = self.node_order.get(node2)
                    self.node_order[node2] = order if prev is None else min(prev, order)
                new_nodes[node2] = None
                owner = new_hashcons.setdefault(node2, cid)
                if owner != cid:
                    raise AssertionError(
                        f"congruence repair incomplete: {node2} in classes {owner} and {cid}"
                    )
            cls.nodes = new_nodes
        self.hashcons = new_hashcons

    # ------------------------------------------------------------- export

    def dump_dot(self) -> str:
        """Deterministic Graphviz text: one cluster per class, one record per node."""
        if not self.is_clean:
            raise DirtyGraphError("dump_dot requires a clean graph")
        lines = ["digraph egraph {", "  compound=true", "  node [shape=record]"]
        ids = self.canonical_ids()
        for cid in ids:
            lines.append(f"  subgraph cluster_{cid} {{")
            lines.append(f'    label="{cid}"')
            for i, node in enumerate(self.sorted_nodes(cid)):
                lines.append(f'    "{cid}.{i}" [label="{_record_label(node)}"]')
            lines.append("  }")
        for cid in ids:
            for i, node in enumerate(self.sorted_nodes(cid)):
                for k, child in enumerate(node.children):
                    lines.append(
                        f'  "{cid}.{i}":c{k} -> "{child}.0" [lhead=cluster_{child}]'
                    )
        lines.append("}")
        return "\n".join(lines) + "\n"


_ESCAPES = str.maketrans({c: "\\" + c for c in '\\"{}<>|'})


def _record_label(node: ENode) -> str:
    text = display_op(node.op).translate(_ESCAPES)
    if not node.children:
        return text
    ports = "|".join(f"<c{k}>" for k in range(len(node.children)))
    return f"{{{text}|{{{ports}}}}}"
