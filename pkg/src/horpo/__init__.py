"""Termination ordering engine for constrained simply-typed rewriting.

The package decides the unconstrained ordering relations (equivalence, weak
and strict decrease, and the underlying path relation), their constrained
counterparts over rules guarded by integer/boolean constraints, and searches
for the precedence and argument-filter parameters that orient a rule set.
"""

__version__ = "0.1.0"

from .core import (
    ArgumentFilter,
    Cmp,
    Derivation,
    HorpoEngine,
    HorpoParams,
    Precedence,
    PrecedenceError,
)
from .constrained import (
    ConstrainedDerivation,
    ConstrainedEngine,
    ConstrainedJudgment,
    ExtendedPrecedence,
    check_coverage,
    evaluate_judgment,
)
from .entail import EntailmentChecker, Verdict
from .synth import (
    OrientationProblem,
    OrientationStatus,
    RuleSpec,
    make_rule,
    orient,
    validate,
)
from .terms import (
    App,
    Arrow,
    Base,
    FunctionSymbol,
    Signature,
    SimpleType,
    Sort,
    Substitution,
    Sym,
    SymbolKind,
    Term,
    TypeStructure,
    Var,
    app,
    arrow,
    collapse,
    enumerate_terms,
)
from .theory import Constraint, Value, ValueOrder, calc_normalize, respects

__all__ = [name for name in dir() if not name.startswith("_")]
