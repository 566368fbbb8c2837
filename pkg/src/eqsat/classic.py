"""Classical rewriting on concrete terms.

Strategy is fixed and deterministic: at the leftmost-outermost position
where any rule applies (pre-order traversal), apply the first applicable
rule in theory order.  Bidirectional rules try left-to-right before
right-to-left.  A history of printed terms turns non-termination into a
reportable CycleDetected outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .pattern import check_guard_term, instantiate, match_term
from .rules import DirectedRule, DynamicRhs, Theory, eval_dynamic, expand_rules
from .term import Apply, Leaf, Term, print_term, subterms


@dataclass(frozen=True)
class TraceStep:
    rule: str
    path: tuple[int, ...]
    before: Term
    after: Term


@dataclass
class RewriteOutcome:
    result: Term
    status: str  # Fixpoint | StepLimit | CycleDetected
    steps: int
    trace: list[TraceStep] = field(default_factory=list)


def replace_at(t: Term, path: tuple[int, ...], replacement: Term) -> Term:
    if not path:
        return replacement
    assert isinstance(t, Apply)
    i = path[0]
    args = list(t.args)
    args[i] = replace_at(args[i], path[1:], replacement)
    return Apply(t.op, tuple(args))


def _apply_at(dr: DirectedRule, sub: Term) -> Optional[Term]:
    """The rewritten subterm if this rule applies here, else None."""
    subst = match_term(dr.lhs, sub)
    if subst is None:
        return None
    if not all(check_guard_term(g, subst) for g in dr.guards):
        return None
    if isinstance(dr.rhs, DynamicRhs):
        bindings = {}
        for a in dr.rhs.args:
            bound = subst[a.name]
            if not isinstance(bound, Leaf):
                return None
            bindings[a.name] = bound.atom
        return eval_dynamic(dr.rhs, bindings)
    return instantiate(dr.rhs, subst)


def rewrite_once(t: Term, theory: Theory) -> Optional[tuple[Term, str, tuple[int, ...]]]:
    """One leftmost-outermost, first-rule application: (new term, rule, path)."""
    rules = expand_rules(theory)
    for path, sub in subterms(t):
        for dr in rules:
            new_sub = _apply_at(dr, sub)
            if new_sub is not None:
                return replace_at(t, path, new_sub), dr.name, path
    return None


def rewrite_fixpoint(t: Term, theory: Theory, step_limit: int) -> RewriteOutcome:
    """Iterate rewrite_once until no rule applies, the step limit, or a cycle."""
    seen = {print_term(t)}
    trace: list[TraceStep] = []
    steps = 0
    while steps < step_limit:
        hit = rewrite_once(t, theory)
        if hit is None:
            return RewriteOutcome(t, "Fixpoint", steps, trace)
        new_term, rule, path = hit
        steps += 1
        trace.append(TraceStep(rule, path, t, new_term))
        key = print_term(new_term)
        t = new_term
        if key in seen:
            return RewriteOutcome(t, "CycleDetected", steps, trace)
        seen.add(key)
    return RewriteOutcome(t, "StepLimit", steps, trace)
