"""The equality saturation loop.

Each iteration is read-then-write: all rules are matched against the
iteration's starting state, then every surviving match instantiates its
right-hand side and merges it with the matched class, then one rebuild
restores the invariants.  Saturation means a full, unthrottled iteration
(including the analysis modify sweep) changed nothing.  Runs are
deterministic apart from measured wall times.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .egraph import CapacityError, DirtyGraphError, EClassId, EGraph
from .ematch import EMatchSubst, ematch_all
from .pattern import PApply, Pattern, PLit, PVar
from .rules import DirectedRule, DynamicRhs, Theory, check_guard_eclass, eval_dynamic, expand_rules
from .term import BoolLit, IntLit, Term

IterHook = Callable[[EGraph, int], None]


@dataclass
class SaturationParams:
    iter_limit: int = 30
    node_limit: int = 10000
    time_limit_ms: int = 5000
    scheduler: str = "simple"  # simple | backoff
    match_limit: int = 1000
    ban_length: int = 5


@dataclass
class IterationStats:
    applied: dict[str, int]
    filtered: dict[str, int]
    enodes: int
    eclasses: int
    time_ms: float


@dataclass
class SaturationReport:
    stop_reason: str  # Saturated | IterLimit | NodeLimit | TimeLimit
    iterations: int
    enodes: int
    eclasses: int
    time_ms: float
    applied: dict[str, int]
    filtered: dict[str, int]
    per_iteration: list[IterationStats] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "version": 1,
            "stop_reason": self.stop_reason,
            "iterations": self.iterations,
            "enodes": self.enodes,
            "eclasses": self.eclasses,
            "time_ms": round(self.time_ms, 3),
            "per_rule": {
                name: {"applied": self.applied[name], "filtered": self.filtered[name]}
                for name in sorted(self.applied)
            },
            "per_iteration": [
                {
                    "applied": {k: v for k, v in sorted(it.applied.items()) if v},
                    "filtered": {k: v for k, v in sorted(it.filtered.items()) if v},
                    "enodes": it.enodes,
                    "eclasses": it.eclasses,
                    "time_ms": round(it.time_ms, 3),
                }
                for it in self.per_iteration
            ],
        }


@dataclass
class ProveOutcome:
    equal: bool
    report: Optional[SaturationReport]  # present only for Unknown outcomes


class SimpleScheduler:
    def banned(self, idx: int, iteration: int) -> bool:
        return False

    def admit(self, idx: int, iteration: int, matches: list) -> list:
        return matches


class BackoffScheduler:
    """Rules whose match count exceeds the limit sit out ban_length iterations."""

    def __init__(self, match_limit: int, ban_length: int):
        self.match_limit = match_limit
        self.ban_length = ban_length
        self.banned_until: dict[int, int] = {}

    def banned(self, idx: int, iteration: int) -> bool:
        return self.banned_until.get(idx, 0) >= iteration

    def admit(self, idx: int, iteration: int, matches: list) -> list:
        if len(matches) > self.match_limit:
            self.banned_until[idx] = iteration + self.ban_length
            return matches[: self.match_limit]
        return matches


def _add_pattern(g: EGraph, p: Pattern, bindings: dict[str, EClassId]) -> EClassId:
    if isinstance(p, PVar):
        return g.find(bindings[p.var.name])
    if isinstance(p, PLit):
        return g.add_atom(p.atom)
    children = [_add_pattern(g, a, bindings) for a in p.args]
    return g.add_node(p.op, children)


def _instantiate_rhs(g: EGraph, dr: DirectedRule, m: EMatchSubst) -> Optional[EClassId]:
    """Class id of the instantiated right-hand side; None when a fold is undefined."""
    if isinstance(dr.rhs, DynamicRhs):
        bindings = {}
        for a in dr.rhs.args:
            value = g.classes[g.find(m.bindings[a.name])].analysis
            if not isinstance(value, (IntLit, BoolLit)):
                return None
            bindings[a.name] = value
        folded = eval_dynamic(dr.rhs, bindings)
        if folded is None:
            return None
        return g.add_term(folded)
    return _add_pattern(g, dr.rhs, m.bindings)


def _modify_sweep(g: EGraph) -> None:
    for cid in g.canonical_ids():
        g.domain.modify(g, cid)
    g.rebuild()


def run_saturation(
    g: EGraph,
    theory: Theory,
    params: Optional[SaturationParams] = None,
    iter_hook: Optional[IterHook] = None,
) -> SaturationReport:
    report, _ = _saturate(g, theory, params or SaturationParams(), iter_hook, None)
    assert report is not None
    return report


def prove_equal(
    g: EGraph,
    theory: Theory,
    t1: Term,
    t2: Term,
    params: Optional[SaturationParams] = None,
) -> ProveOutcome:
    """Add both terms and saturate until their classes meet, or a stop.

    Saturation without equivalence refutes only relative to the theory, so
    the negative outcome stays Unknown and carries the report.
    """
    c1, c2 = g.add_term(t1), g.add_term(t2)
    if g.find(c1) == g.find(c2):
        return ProveOutcome(True, None)
    report, reached = _saturate(g, theory, params or SaturationParams(), None, (c1, c2))
    if reached:
        return ProveOutcome(True, None)
    return ProveOutcome(False, report)


def _saturate(
    g: EGraph,
    theory: Theory,
    params: SaturationParams,
    iter_hook: Optional[IterHook],
    goal: Optional[tuple[EClassId, EClassId]],
) -> tuple[Optional[SaturationReport], bool]:
    if not g.is_clean:
        raise DirtyGraphError("run_saturation requires a clean graph")
    rules = expand_rules(theory)
    rule_names = sorted({r.name for r in rules})
    if params.scheduler == "backoff":
        sched = BackoffScheduler(params.match_limit, params.ban_length)
    elif params.scheduler == "simple":
        sched = SimpleScheduler()
    else:
        raise ValueError(f"unknown scheduler {params.scheduler!r}")

    start = time.perf_counter()
    applied_total = dict.fromkeys(rule_names, 0)
    filtered_total = dict.fromkeys(rule_names, 0)
    per_iteration: list[IterationStats] = []
    iterations = 0
    stop: Optional[str] = None

    old_max = g.max_nodes
    g.max_nodes = params.node_limit if old_max is None else min(old_max, params.node_limit)
    try:
        # materialize constants already known at entry, so guards and
        # literal patterns see them from iteration 1
        _modify_sweep(g)
        if iter_hook:
            iter_hook(g, 0)
        force_full = False
        while True:
            if iterations >= params.iter_limit:
                stop = "IterLimit"
                break
            if (time.perf_counter() - start) * 1000.0 >= params.time_limit_ms:
                stop = "TimeLimit"
                break
            iterations += 1
            it_start = time.perf_counter()
            v0 = g.version
            throttled = False
            applied = dict.fromkeys(rule_names, 0)
            filtered = dict.fromkeys(rule_names, 0)
            # READ: match every active rule against the iteration's start state
            batches: list[tuple[DirectedRule, list[EMatchSubst]]] = []
            for idx, dr in enumerate(rules):
                if not force_full and sched.banned(idx, iterations):
                    throttled = True
                    continue
                matches = ematch_all(g, dr.lhs)
                if not force_full:
                    admitted = sched.admit(idx, iterations, matches)
                    if len(admitted) < len(matches):
                        throttled = True
                    matches = admitted
                batches.append((dr, matches))
            # WRITE: guards filter, right-hand sides land, merges queue repair
            capacity = False
            try:
                for dr, matches in batches:
                    for m in matches:
                        if all(check_guard_eclass(gd, m, g) for gd in dr.guards):
                            cid = _instantiate_rhs(g, dr, m)
                            if cid is None:
                                filtered[dr.name] += 1
                            else:
                                g.merge(m.root, cid)
                                applied[dr.name] += 1
                        else:
                            filtered[dr.name] += 1
            except CapacityError:
                capacity = True
            g.rebuild()
            changed = g.version != v0
            if not changed and not capacity:
                # quiet iteration: flush pending analysis facts before
                # declaring saturation, so saturated graphs are true fixpoints
                _modify_sweep(g)
                changed = g.version != v0
            if iter_hook:
                iter_hook(g, iterations)
            per_iteration.append(
                IterationStats(
                    applied, filtered, g.node_count, g.class_count,
                    (time.perf_counter() - it_start) * 1000.0,
                )
            )
            for name in rule_names:
                applied_total[name] += applied[name]
                filtered_total[name] += filtered[name]
            if capacity:
                stop = "NodeLimit"
                break
            if goal is not None and g.find(goal[0]) == g.find(goal[1]):
                return None, True
            if not changed:
                if throttled and not force_full:
                    force_full = True  # verification pass with every rule active
                    continue
                stop = "Saturated"
                break
            force_full = False
    finally:
        g.max_nodes = old_max
    _modify_sweep(g)
    report = SaturationReport(
        stop_reason=stop,
        iterations=iterations,
        enodes=g.node_count,
        eclasses=g.class_count,
        time_ms=(time.perf_counter() - start) * 1000.0,
        applied=applied_total,
        filtered=filtered_total,
        per_iteration=per_iteration,
    )
    if goal is not None and g.find(goal[0]) == g.find(goal[1]):
        return report, True
    return report, False
