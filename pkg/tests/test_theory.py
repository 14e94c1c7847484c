from __future__ import annotations

import itertools

import pytest

from horpo.terms import (
    Base,
    FunctionSymbol,
    Signature,
    Sort,
    Substitution,
    Sym,
    Var,
    app,
    arrow,
)
from horpo.theory import (
    AND,
    BOOL,
    Constraint,
    FALSE,
    GE,
    GT,
    INT,
    LE,
    MINUS,
    NEG,
    PLUS,
    TIMES,
    TRUE,
    TRUE_CONSTRAINT,
    TheoryError,
    Value,
    ValueOrder,
    bool_value,
    calc_normalize,
    check_lvar_set,
    int_value,
    is_ground_theory_term,
    respects,
    theory_signature,
    value_of,
)

I = Base(INT)
X = Var("x", I)


# ------------- values -------------


def test_value_payload_must_match_sort() -> None:
    with pytest.raises(TheoryError):
        Value(INT, True)
    with pytest.raises(TheoryError):
        Value(BOOL, 3)


def test_value_symbol_round_trip() -> None:
    assert value_of(int_value(-7)) == Value(INT, -7)
    assert value_of(bool_value(True)) == Value(BOOL, True)
    assert value_of(X) is None


# ------------- calculation -------------


def test_ground_arithmetic_evaluates() -> None:
    assert calc_normalize(app(Sym(PLUS), int_value(3), int_value(4))) == int_value(7)


def test_inner_ground_subterm_evaluates_under_plain_head() -> None:
    f = FunctionSymbol("f", arrow(I, I, I))
    t = app(Sym(f), app(Sym(MINUS), int_value(2), int_value(1)), X)
    assert calc_normalize(t) == app(Sym(f), int_value(1), X)


def test_non_ground_theory_term_untouched() -> None:
    t = app(Sym(PLUS), X, int_value(0))
    assert calc_normalize(t) == t


def test_partial_application_not_evaluated() -> None:
    # (+) applied to one evaluated argument stays a partial application
    t = app(Sym(PLUS), app(Sym(PLUS), int_value(1), int_value(1)))
    assert calc_normalize(t) == app(Sym(PLUS), int_value(2))


def test_calc_normalize_idempotent_and_confluent() -> None:
    values = [int_value(n) for n in (-2, -1, 0, 1, 2)]
    sig = Signature([PLUS, MINUS, TIMES, NEG])
    pool = []  # ground terms only
    from horpo.terms import enumerate_terms

    universe = []
    for v in values:
        universe.append(v)
    for op in (PLUS, MINUS, TIMES):
        for a, b in itertools.product(values, repeat=2):
            universe.append(app(Sym(op), a, b))
    for a in values:
        universe.append(app(Sym(NEG), a))
    # nest once more for a second evaluation layer
    nested = [app(Sym(PLUS), t, int_value(1)) for t in universe[:40]]
    for t in universe + nested:
        once = calc_normalize(t)
        assert calc_normalize(once) == once
        assert value_of(once) is not None  # ground theory terms reach a value


def test_boolean_evaluation() -> None:
    t = app(Sym(GT), int_value(2), int_value(5))
    assert calc_normalize(t) == FALSE


def _step_at_random_position(term, rng):
    """One calculation step at a randomly chosen evaluable position."""
    from horpo.terms import App, SymbolKind, app as mk_app
    from horpo.theory import DEFAULT_INTERPRETATION

    positions = []

    def collect(t, path):
        head, args = t.spine
        if (isinstance(head, Sym) and head.symbol.kind is SymbolKind.THEORY
                and len(args) == head.symbol.max_arity
                and all(value_of(a) is not None for a in args)):
            positions.append(path)
        for i, a in enumerate(args):
            collect(a, path + (i,))

    def rewrite(t, path):
        head, args = t.spine
        if not path:
            values = [value_of(a) for a in args]
            return DEFAULT_INTERPRETATION.evaluate(head.symbol, values).term()
        i, *rest = path
        new_args = list(args)
        new_args[i] = rewrite(args[i], tuple(rest))
        return mk_app(head, *new_args)

    collect(term, ())
    if not positions:
        return None
    return rewrite(term, rng.choice(positions))


def test_calc_confluent_under_random_evaluation_orders() -> None:
    # reducing one redex at a time, in any order, reaches the same value
    import random

    rng = random.Random(11)
    deep = app(
        Sym(PLUS),
        app(Sym(TIMES), app(Sym(MINUS), int_value(7), int_value(3)), int_value(2)),
        app(Sym(NEG), app(Sym(PLUS), int_value(1), int_value(4))),
    )
    expected = calc_normalize(deep)
    for _ in range(25):
        t = deep
        while True:
            stepped = _step_at_random_position(t, rng)
            if stepped is None:
                break
            t = stepped
        assert t == expected


# ------------- constraints and respects -------------


def test_constraint_must_be_bool_theory_term() -> None:
    with pytest.raises(TheoryError):
        Constraint(int_value(3))
    f = FunctionSymbol("b", Base(BOOL))
    with pytest.raises(TheoryError):
        Constraint(Sym(f))


def test_respects_positive_witness() -> None:
    phi = Constraint(app(Sym(GT), X, int_value(0)))
    assert respects(Substitution({X: int_value(3)}), phi, {X})
    assert not respects(Substitution({X: int_value(0)}), phi, {X})


def test_respects_requires_ground_theory_image() -> None:
    y = Var("y", I)
    gamma = Substitution({X: app(Sym(PLUS), y, int_value(1))})
    assert not respects(gamma, TRUE_CONSTRAINT, {X})


def test_respects_rejects_missing_bindings() -> None:
    phi = Constraint(app(Sym(GT), X, int_value(0)))
    with pytest.raises(TheoryError):
        respects(Substitution({}), phi, {X})


def test_lvar_set_members_need_theory_sorts() -> None:
    check_lvar_set({Var("s", I)})
    plain = Var("p", Base(Sort("state")))
    with pytest.raises(TheoryError):
        check_lvar_set({plain})
    higher = Var("h", arrow(I, I))
    with pytest.raises(TheoryError):
        check_lvar_set({higher})


# ------------- value orders -------------


def test_int_strict_order_examples() -> None:
    vo = ValueOrder.default()
    five, three = Value(INT, 5), Value(INT, 3)
    assert vo.strict(five, three)
    assert not vo.strict(Value(INT, -1), Value(INT, -2))  # negative left is minimal
    assert not vo.strict(three, five)


def test_lift_strict_schema() -> None:
    vo = ValueOrder.default()
    lifted = vo.lift_strict(X, app(Sym(MINUS), X, int_value(1)))
    expected = app(
        Sym(AND),
        app(Sym(GT), X, app(Sym(MINUS), X, int_value(1))),
        app(Sym(GE), X, int_value(0)),
    )
    assert lifted.term == expected


def test_lift_on_values_normalizes_to_ground_truth() -> None:
    vo = ValueOrder.default()
    assert calc_normalize(vo.lift_strict(int_value(5), int_value(3)).term) == TRUE
    assert calc_normalize(vo.lift_strict(int_value(-1), int_value(-2)).term) == FALSE


def test_lift_requires_theory_terms_of_one_sort() -> None:
    vo = ValueOrder.default()
    with pytest.raises(TheoryError):
        vo.lift_strict(X, bool_value(True))


def test_value_order_override_registry() -> None:
    vo = ValueOrder.with_overrides({"Int": "nonpos"})
    assert vo.strict(Value(INT, -5), Value(INT, -3))
    assert not vo.strict(Value(INT, 5), Value(INT, 3))
    with pytest.raises(TheoryError):
        ValueOrder.with_overrides({"Int": "no-such-order"})
    with pytest.raises(TheoryError):
        ValueOrder.with_overrides({"Bool": "nonneg"})


def _chain_lengths(strict, values):
    # longest strict chain (node count) starting from each value
    import functools

    @functools.lru_cache(maxsize=None)
    def longest(v):
        nexts = [w for w in values if strict(Value(INT, v), Value(INT, w))]
        return 1 + max((longest(w) for w in nexts), default=0)

    return {v: longest(v) for v in values}


@pytest.mark.parametrize("bound", [16])
def test_int_order_well_founded_on_bounded_range(bound) -> None:
    vo = ValueOrder.default()
    values = tuple(range(-bound, bound + 1))

    # no strict cycle: strict implies a drop in a well-founded measure
    for v in values:
        assert not vo.strict(Value(INT, v), Value(INT, v))
    lengths = _chain_lengths(lambda a, b: vo.strict(a, b), values)
    for v in values:
        if v >= 0:
            assert lengths[v] <= v + 2
        else:
            assert lengths[v] == 1


@pytest.mark.parametrize("bound", [16])
def test_int_quasi_order_compatibility(bound) -> None:
    vo = ValueOrder.default()
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            va, vb = Value(INT, a), Value(INT, b)
            if vo.quasi(va, vb):
                assert (vo.strict(va, vb) or a == b
                        or (vo.is_minimal(va) and vo.is_minimal(vb)))
    # reflexive and transitive on a sample
    sample = range(-6, 7)
    for a in sample:
        assert vo.quasi(Value(INT, a), Value(INT, a))
    for a in sample:
        for b in sample:
            for c in sample:
                if vo.quasi(Value(INT, a), Value(INT, b)) and vo.quasi(
                        Value(INT, b), Value(INT, c)):
                    assert vo.quasi(Value(INT, a), Value(INT, c))


def test_bool_order_trivial() -> None:
    vo = ValueOrder.default()
    t, f = Value(BOOL, True), Value(BOOL, False)
    for a in (t, f):
        assert vo.is_minimal(a)
        for b in (t, f):
            assert not vo.strict(a, b)
            assert vo.quasi(a, b)
