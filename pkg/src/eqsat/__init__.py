"""Term rewriting with two backends: classic fixpoint rewriting and
e-graph equality saturation, plus analyses, extraction, and a CLI."""

from .analysis import (
    AnalysisDomain,
    AnalysisInconsistencyError,
    ConstFoldAnalysis,
    NoAnalysis,
    fold_atoms,
)
from .classic import RewriteOutcome, rewrite_fixpoint, rewrite_once
from .egraph import (
    CapacityError,
    DirtyGraphError,
    EClass,
    EClassId,
    EGraph,
    ENode,
    InvalidIdError,
)
from .ematch import EMatchSubst, ematch, ematch_all
from .extract import (
    AstDepth,
    AstSize,
    Extraction,
    OpWeights,
    UnextractableError,
    extract_analysis,
    extract_best,
    load_weights,
    parse_weights,
    term_cost,
)
from .pattern import (
    Guard,
    Pattern,
    PatternVar,
    PApply,
    PLit,
    PVar,
    UnboundVariableError,
    check_guard_term,
    instantiate,
    match_term,
    parse_pattern,
    pattern_vars,
    print_pattern,
)
from .rules import (
    DirectedRule,
    DynamicRhs,
    Rule,
    Theory,
    TheoryParseError,
    check_guard_eclass,
    eval_dynamic,
    expand_rules,
    parse_theory,
    parse_theory_file,
    print_theory,
)
from .saturate import (
    ProveOutcome,
    SaturationParams,
    SaturationReport,
    prove_equal,
    run_saturation,
)
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
    parse_term,
    print_term,
    term_depth,
    term_size,
)

__version__ = "0.1.0"
