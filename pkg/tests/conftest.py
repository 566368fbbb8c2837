from __future__ import annotations

import pytest
from hypothesis import strategies as st

from eqsat import Apply, BoolLit, IntLit, Leaf, Symbol, parse_theory

ARITH_THEORY_TEXT = """\
theory arith
rule div-canon: (/ (* ?x ?y) ?z) => (* ?x (/ ?y ?z))
rule div-same:  (/ ?x ?x) => 1 if nonzero(?x)
rule mul-one:   (* ?x 1) => ?x
rule mul2-shift:(* ?x 2) => (<< ?x 1)
rule fold-div:  (/ ?a ?b) => fold(/, ?a, ?b) if is_int(?a) && is_int(?b)
"""

COMM_THEORY_TEXT = """\
theory comm
rule comm: (+ ?a ?b) == (+ ?b ?a)
"""


@pytest.fixture
def arith():
    return parse_theory(ARITH_THEORY_TEXT)


@pytest.fixture
def comm():
    return parse_theory(COMM_THEORY_TEXT)


# hypothesis strategies for random terms

symbols = st.sampled_from("abcxyz").map(lambda s: Leaf(Symbol(s)))
int_leaves = st.integers(min_value=-3, max_value=3).map(lambda i: Leaf(IntLit(i)))
bool_leaves = st.booleans().map(lambda b: Leaf(BoolLit(b)))
leaves = st.one_of(symbols, int_leaves, bool_leaves)


def _apps(children):
    unary = st.tuples(st.sampled_from(["f", "neg"]), st.tuples(children))
    binary = st.tuples(st.sampled_from(["+", "*", "-", "/", "g"]),
                       st.tuples(children, children))
    return st.one_of(unary, binary).map(lambda t: Apply(t[0], t[1]))


terms = st.recursive(leaves, _apps, max_leaves=12)
sym_terms = st.recursive(symbols, _apps, max_leaves=12)
