"""The built-in theory: integer and boolean values, calculation, and value orders.

The core theory is fixed to linear/nonlinear integer arithmetic with booleans:
+, -, * (binary), neg (unary minus), the comparisons > >= < <= = != on Int,
and /\\, \\/, not on Bool.  Division and modulo are excluded so that
calculation is total.

Calculation normalization evaluates every maximal ground theory subterm to a
value; non-ground theory structure is left untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Union

from .terms import (
    App,
    Arrow,
    Base,
    FunctionSymbol,
    Signature,
    Sort,
    Substitution,
    Sym,
    SymbolKind,
    Term,
    TermError,
    Var,
    app,
    arrow,
    is_theory_term,
)


class TheoryError(ValueError):
    """An ill-sorted value, constraint, or value-order configuration."""


class EvaluationError(RuntimeError):
    """A theory operation failed to evaluate (partial operation misuse)."""


# ---------- Sorts and values ----------

INT = Sort("Int")
BOOL = Sort("Bool")
THEORY_SORTS = frozenset({INT, BOOL})

_INT = Base(INT)
_BOOL = Base(BOOL)


@dataclass(frozen=True)
class Value:
    sort: Sort
    payload: Union[int, bool]

    def __post_init__(self) -> None:
        # bool must be checked first: bool is a subclass of int
        if self.sort == BOOL:
            if not isinstance(self.payload, bool):
                raise TheoryError(f"Bool value needs a boolean payload, got {self.payload!r}")
        elif self.sort == INT:
            if isinstance(self.payload, bool) or not isinstance(self.payload, int):
                raise TheoryError(f"Int value needs an integer payload, got {self.payload!r}")
        else:
            raise TheoryError(f"unknown theory sort {self.sort}")

    @property
    def symbol(self) -> FunctionSymbol:
        name = str(self.payload).lower() if self.sort == BOOL else str(self.payload)
        return FunctionSymbol(name, Base(self.sort), SymbolKind.VALUE)

    def term(self) -> Term:
        return Sym(self.symbol)

    def __str__(self) -> str:
        return str(self.payload).lower() if self.sort == BOOL else str(self.payload)


def int_value(n: int) -> Term:
    return Value(INT, n).term()


def bool_value(b: bool) -> Term:
    return Value(BOOL, b).term()


TRUE = bool_value(True)
FALSE = bool_value(False)


def value_of(term: Term) -> Optional[Value]:
    """The Value a term denotes, if the term is a single value symbol."""
    if isinstance(term, Sym) and term.symbol.is_value:
        name = term.symbol.name
        if term.symbol.type == _BOOL:
            return Value(BOOL, name == "true")
        return Value(INT, int(name))
    return None


def symbol_value(f: FunctionSymbol) -> Optional[Value]:
    return value_of(Sym(f))


# ---------- Theory signature ----------


def _theory(name: str, *types: Base) -> FunctionSymbol:
    return FunctionSymbol(name, arrow(*types), SymbolKind.THEORY)


PLUS = _theory("+", _INT, _INT, _INT)
MINUS = _theory("-", _INT, _INT, _INT)
TIMES = _theory("*", _INT, _INT, _INT)
NEG = _theory("neg", _INT, _INT)
GT = _theory(">", _INT, _INT, _BOOL)
GE = _theory(">=", _INT, _INT, _BOOL)
LT = _theory("<", _INT, _INT, _BOOL)
LE = _theory("<=", _INT, _INT, _BOOL)
EQ = _theory("=", _INT, _INT, _BOOL)
NE = _theory("!=", _INT, _INT, _BOOL)
AND = _theory("/\\", _BOOL, _BOOL, _BOOL)
OR = _theory("\\/", _BOOL, _BOOL, _BOOL)
NOT = _theory("not", _BOOL, _BOOL)

THEORY_SYMBOLS: tuple[FunctionSymbol, ...] = (
    PLUS, MINUS, TIMES, NEG, GT, GE, LT, LE, EQ, NE, AND, OR, NOT,
)


def theory_signature() -> Signature:
    return Signature(THEORY_SYMBOLS)


class TheoryInterpretation:
    """Total evaluation functions for the theory symbols.

    Evaluation is deterministic and, applied innermost-first, confluent: any
    order of evaluating ground subterms yields the same normal form.
    """

    def __init__(self, table: Mapping[str, Callable[..., Value]]):
        self._table = dict(table)

    def knows(self, f: FunctionSymbol) -> bool:
        return f.name in self._table

    def evaluate(self, f: FunctionSymbol, args: Iterable[Value]) -> Value:
        fn = self._table.get(f.name)
        if fn is None:
            raise EvaluationError(f"no interpretation for theory symbol {f.name}")
        return fn(*args)


def _iv(n: int) -> Value:
    return Value(INT, n)


def _bv(b: bool) -> Value:
    return Value(BOOL, b)


DEFAULT_INTERPRETATION = TheoryInterpretation({
    "+": lambda a, b: _iv(a.payload + b.payload),
    "-": lambda a, b: _iv(a.payload - b.payload),
    "*": lambda a, b: _iv(a.payload * b.payload),
    "neg": lambda a: _iv(-a.payload),
    ">": lambda a, b: _bv(a.payload > b.payload),
    ">=": lambda a, b: _bv(a.payload >= b.payload),
    "<": lambda a, b: _bv(a.payload < b.payload),
    "<=": lambda a, b: _bv(a.payload <= b.payload),
    "=": lambda a, b: _bv(a.payload == b.payload),
    "!=": lambda a, b: _bv(a.payload != b.payload),
    "/\\": lambda a, b: _bv(a.payload and b.payload),
    "\\/": lambda a, b: _bv(a.payload or b.payload),
    "not": lambda a: _bv(not a.payload),
})


# ---------- Calculation normalization ----------


def calc_normalize(term: Term, interp: TheoryInterpretation = DEFAULT_INTERPRETATION) -> Term:
    """Evaluate every maximal ground theory subterm to its value.

    Works innermost-first; a theory symbol applied to its full arity with all
    arguments reduced to values is replaced by the interpreted value.
    Partially applied theory symbols and non-ground theory terms are left
    as they are.  Idempotent.
    """
    head, args = term.spine
    norm_args = [calc_normalize(a, interp) for a in args]
    if (
        isinstance(head, Sym)
        and head.symbol.kind is SymbolKind.THEORY
        and len(norm_args) == head.symbol.max_arity
    ):
        values = [value_of(a) for a in norm_args]
        if all(v is not None for v in values):
            return interp.evaluate(head.symbol, values).term()  # type: ignore[arg-type]
    return app(head, *norm_args)


def is_ground_theory_term(term: Term) -> bool:
    return is_theory_term(term) and not term.variables()


# ---------- Constraints ----------


@dataclass(frozen=True)
class Constraint:
    """A Bool-sorted theory term used to guard a rewrite rule."""

    term: Term

    def __post_init__(self) -> None:
        if self.term.type != _BOOL:
            raise TheoryError(f"constraint must have sort Bool, got {self.term.type}")
        if not is_theory_term(self.term):
            raise TheoryError(f"constraint must be a theory term: {self.term}")

    @property
    def variables(self) -> frozenset[Var]:
        return self.term.variables()

    def __str__(self) -> str:
        return str(self.term)


TRUE_CONSTRAINT = Constraint(TRUE)


def conj(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = app(Sym(AND), out, t)
    return out


def disj(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = app(Sym(OR), out, t)
    return out


# ---------- Logical variables ----------


def check_lvar_set(lvars: Iterable[Var]) -> frozenset[Var]:
    """Validate that every logical variable has a (base) theory sort."""
    out = frozenset(lvars)
    for v in out:
        if not (v.type.is_base and v.type.result_sort in THEORY_SORTS):
            raise TheoryError(
                f"logical variable {v.name} must have a theory sort, has {v.type}")
    return out


def respects(gamma: Substitution, phi: Constraint, lvars: Iterable[Var]) -> bool:
    """Whether gamma maps every logical variable to a ground theory term and
    makes the constraint evaluate to true."""
    lv = check_lvar_set(lvars)
    needed = phi.variables | lv
    missing = [v for v in needed if v not in gamma.domain]
    if missing:
        raise TheoryError(
            "substitution is undefined on " + ", ".join(sorted(v.name for v in missing)))
    for v in lv:
        if not is_ground_theory_term(gamma.get(v)):
            return False
    return calc_normalize(gamma.apply(phi.term)) == TRUE


# ---------- Value orders ----------


@dataclass(frozen=True)
class SortOrder:
    """A well-founded strict order plus a compatible quasi-order on the
    values of one sort, with constraint schemas lifting both to theory terms."""

    sort: Sort
    strict: Callable[[Value, Value], bool]
    quasi: Callable[[Value, Value], bool]
    is_minimal: Callable[[Value], bool]
    lift_strict: Callable[[Term, Term], Term]
    lift_quasi: Callable[[Term, Term], Term]
    name: str = "custom"


def _int_nonneg() -> SortOrder:
    # v1 > v2 with v1 >= 0; minimal values are the negatives.
    return SortOrder(
        sort=INT,
        strict=lambda a, b: a.payload > b.payload and a.payload >= 0,
        quasi=lambda a, b: (a.payload >= b.payload >= 0)
        or a.payload == b.payload
        or (a.payload < 0 and b.payload < 0),
        is_minimal=lambda a: a.payload < 0,
        lift_strict=lambda s, t: conj(app(Sym(GT), s, t), app(Sym(GE), s, int_value(0))),
        lift_quasi=lambda s, t: disj(
            conj(app(Sym(GE), s, t), app(Sym(GE), t, int_value(0))),
            app(Sym(EQ), s, t),
            conj(app(Sym(LT), s, int_value(0)), app(Sym(LT), t, int_value(0))),
        ),
        name="nonneg",
    )


def _int_nonpos() -> SortOrder:
    # Mirror image: v1 < v2 with v1 <= 0; minimal values are the positives.
    return SortOrder(
        sort=INT,
        strict=lambda a, b: a.payload < b.payload and a.payload <= 0,
        quasi=lambda a, b: (a.payload <= b.payload <= 0)
        or a.payload == b.payload
        or (a.payload > 0 and b.payload > 0),
        is_minimal=lambda a: a.payload > 0,
        lift_strict=lambda s, t: conj(app(Sym(LT), s, t), app(Sym(LE), s, int_value(0))),
        lift_quasi=lambda s, t: disj(
            conj(app(Sym(LE), s, t), app(Sym(LE), t, int_value(0))),
            app(Sym(EQ), s, t),
            conj(app(Sym(GT), s, int_value(0)), app(Sym(GT), t, int_value(0))),
        ),
        name="nonpos",
    )


def _bool_order() -> SortOrder:
    # Strict part empty, so every boolean is minimal and the quasi-order is total.
    return SortOrder(
        sort=BOOL,
        strict=lambda a, b: False,
        quasi=lambda a, b: True,
        is_minimal=lambda a: True,
        lift_strict=lambda s, t: FALSE,
        lift_quasi=lambda s, t: TRUE,
        name="bool",
    )


INT_ORDERS: dict[str, Callable[[], SortOrder]] = {
    "nonneg": _int_nonneg,
    "nonpos": _int_nonpos,
}


class ValueOrder:
    """Per-sort value orders, as used by the Theory clauses of the ordering."""

    def __init__(self, orders: Mapping[Sort, SortOrder]):
        self._orders = dict(orders)

    @classmethod
    def default(cls) -> "ValueOrder":
        return cls({INT: _int_nonneg(), BOOL: _bool_order()})

    @classmethod
    def with_overrides(cls, overrides: Mapping[str, str]) -> "ValueOrder":
        """Build the default order, replacing per-sort entries by named
        alternatives (e.g. {"Int": "nonpos"})."""
        vo = cls.default()
        for sort_name, order_name in overrides.items():
            if sort_name != INT.name:
                raise TheoryError(f"no configurable value order for sort {sort_name}")
            factory = INT_ORDERS.get(order_name)
            if factory is None:
                raise TheoryError(
                    f"unknown value order {order_name!r}; available: "
                    + ", ".join(sorted(INT_ORDERS)))
            vo._orders[INT] = factory()
        return vo

    def for_sort(self, sort: Sort) -> SortOrder:
        order = self._orders.get(sort)
        if order is None:
            raise TheoryError(f"no value order configured for sort {sort}")
        return order

    def strict(self, v1: Value, v2: Value) -> bool:
        return v1.sort == v2.sort and self.for_sort(v1.sort).strict(v1, v2)

    def quasi(self, v1: Value, v2: Value) -> bool:
        return v1.sort == v2.sort and self.for_sort(v1.sort).quasi(v1, v2)

    def is_minimal(self, v: Value) -> bool:
        return self.for_sort(v.sort).is_minimal(v)

    def _lift(self, s: Term, t: Term, strict: bool) -> Constraint:
        if s.type != t.type or not s.type.is_base:
            raise TheoryError(
                f"value-order lifting needs two terms of one base sort, "
                f"got {s.type} and {t.type}")
        if not (is_theory_term(s) and is_theory_term(t)):
            raise TheoryError("value-order lifting applies to theory terms only")
        order = self.for_sort(s.type.result_sort)
        schema = order.lift_strict if strict else order.lift_quasi
        return Constraint(schema(s, t))

    def lift_strict(self, s: Term, t: Term) -> Constraint:
        """The constraint stating that s is strictly above t in this order."""
        return self._lift(s, t, strict=True)

    def lift_quasi(self, s: Term, t: Term) -> Constraint:
        """The constraint stating that s is weakly above t in this order."""
        return self._lift(s, t, strict=False)
