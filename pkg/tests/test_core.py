from __future__ import annotations

import pytest

from horpo.core import (
    ArgumentFilter,
    Cmp,
    HorpoEngine,
    HorpoParams,
    Precedence,
    PrecedenceError,
    verify_derivation,
)
from horpo.terms import (
    Base,
    FunctionSymbol,
    Signature,
    Sort,
    Sym,
    Var,
    app,
    arrow,
    enumerate_terms,
)

O = Base(Sort("o"))
F = FunctionSymbol("f", arrow(O, O, O))
G = FunctionSymbol("g", arrow(O, O))
A = FunctionSymbol("a", O)
B = FunctionSymbol("b", O)
SIG = Signature([F, G, A, B])

X = Var("x", O)
FV = Var("F1", arrow(O, O))


@pytest.fixture(scope="module")
def params() -> HorpoParams:
    # f above g above {a ~ b}, all argument positions regarded
    prec = Precedence.from_classes([[F], [G], [A, B]])
    p = HorpoParams(prec, ArgumentFilter({F: {1, 2}, G: {1}}))
    p.validate(list(SIG))
    return p


@pytest.fixture(scope="module")
def engine(params) -> HorpoEngine:
    return HorpoEngine(params)


# ------------- precedence -------------


def test_precedence_compare_directions(params) -> None:
    prec = params.precedence
    assert prec.compare(F, G) is Cmp.GREATER
    assert prec.compare(G, F) is Cmp.SMALLER
    assert prec.compare(A, B) is Cmp.EQUIVALENT
    assert prec.compare(F, F) is Cmp.EQUIVALENT


def test_unrelated_symbols_incomparable(params) -> None:
    other = FunctionSymbol("zzz", O)
    assert params.precedence.compare(F, other) is Cmp.INCOMPARABLE
    assert params.precedence.compare(other, other) is Cmp.EQUIVALENT


def test_from_pairs_closure() -> None:
    prec = Precedence.from_pairs(greater=[(F, G), (G, A)], equivalent=[(A, B)])
    assert prec.gt(F, A)  # transitively
    assert prec.gt(F, B)
    assert prec.equiv(B, A)


def test_from_pairs_rejects_strict_cycle() -> None:
    with pytest.raises(PrecedenceError):
        Precedence.from_pairs(greater=[(F, G), (G, F)])


def test_validate_rejects_hand_built_cycle() -> None:
    class Broken(Precedence):
        def compare(self, f, g):
            if f == g:
                return Cmp.EQUIVALENT
            return Cmp.GREATER  # everything above everything else

    with pytest.raises(PrecedenceError):
        Broken((), {}).validate([F, G])


def test_validate_records_class_arity_bounds(params) -> None:
    bounds = params.precedence.validate(list(SIG))
    by_max = sorted(bounds.values())
    assert by_max == [0, 1, 2]  # classes {a,b}, {g}, {f}


def test_filter_positions_checked() -> None:
    with pytest.raises(PrecedenceError):
        ArgumentFilter({G: {2}})  # g is unary


def test_theory_filter_restriction_only_constrained(params) -> None:
    from horpo.theory import PLUS

    filt = ArgumentFilter({PLUS: {1}})
    p = HorpoParams(params.precedence, filt)
    p.validate([PLUS])  # unconstrained layer does not restrict
    with pytest.raises(PrecedenceError):
        p.validate([PLUS], constrained=True)


# ------------- approx -------------


def test_approx_reflexive_constant(engine) -> None:
    assert engine.approx(Sym(A), Sym(A)).rule == "Eq-args"


def test_approx_equivalent_constants(engine) -> None:
    assert engine.approx(Sym(A), Sym(B)).rule == "Eq-args"


def test_approx_ignores_filtered_argument(params) -> None:
    filtered = HorpoParams(params.precedence, ArgumentFilter({G: frozenset()}))
    eng = HorpoEngine(filtered)
    d = eng.approx(app(Sym(G), Sym(A)), app(Sym(G), Sym(B)))
    assert d.rule == "Eq-args" and d.premises == ()


def test_approx_needs_matching_structure(engine) -> None:
    assert engine.approx(Sym(A), Sym(G)) is None


def test_approx_variable_heads(engine) -> None:
    assert engine.approx(app(FV, Sym(A)), app(FV, Sym(B))).rule == "Eq-mono"
    other = Var("F2", arrow(O, O))
    assert engine.approx(app(FV, Sym(A)), app(other, Sym(A))) is None


# ------------- geq / gt -------------


def test_geq_via_equivalence(engine) -> None:
    assert engine.geq(Sym(A), Sym(A)).rule == "Eq-args"


def test_geq_via_strict_subterm(engine) -> None:
    d = engine.geq(app(Sym(G), Sym(A)), Sym(A))
    assert d.rule == "Gr-rpo"
    assert d.premises[0].rule == "Rpo-select"


def test_geq_absent_on_increase(engine) -> None:
    assert engine.geq(Sym(A), app(Sym(G), Sym(A))) is None


def test_gt_variable_head_monotone(engine) -> None:
    ga = app(Sym(G), Sym(A))
    d = engine.gt(app(FV, ga), app(FV, Sym(A)))
    assert d.rule == "Gr-mono" and d.index == 1


def test_gt_args_strict_position(engine) -> None:
    ga = app(Sym(G), Sym(A))
    d = engine.gt(app(Sym(F), ga, Sym(B)), app(Sym(F), Sym(A), Sym(B)))
    assert d.rule == "Gr-args" and d.index == 1


def test_gt_irreflexive_on_variables(engine) -> None:
    assert engine.gt(X, X) is None


# ------------- rpo -------------


def test_rpo_copy_to_smaller_head(engine) -> None:
    d = engine.rpo_gt(app(Sym(F), Sym(A), Sym(B)), app(Sym(G), Sym(A)))
    assert d.rule == "Rpo-copy"
    assert d.premises[0].rule == "Rpo-select"


def test_rpo_lex_smallest_witness(engine) -> None:
    ga = app(Sym(G), Sym(A))
    d = engine.rpo_gt(app(Sym(F), ga, Sym(B)), app(Sym(F), Sym(A), Sym(B)))
    assert d.rule == "Rpo-lex" and d.index == 1


def test_rpo_absent_without_precedence(engine) -> None:
    assert engine.rpo_gt(app(Sym(G), Sym(A)), app(Sym(F), Sym(A), Sym(A))) is None


def test_rpo_guard_missing_positions(params) -> None:
    # a partially applied head is admissible only when the unapplied
    # positions are all regarded
    partial = app(Sym(F), Sym(A))  # f applied to one of two arguments
    keep_all = HorpoEngine(params)
    assert keep_all.rpo_gt(partial, Sym(A)).rule == "Rpo-select"
    dropped = HorpoEngine(
        HorpoParams(params.precedence, ArgumentFilter({F: {1}})))
    assert dropped.rpo_gt(partial, Sym(A)) is None


def test_rpo_select_fires_before_appl(params) -> None:
    s = app(Sym(F), app(FV, Sym(A)), Sym(B))
    t = app(FV, Sym(A))
    for mode in ("sound", "paper"):
        d = HorpoEngine(params, mode=mode).rpo_gt(s, t)
        assert d.rule == "Rpo-select"


def test_rpo_appl_head_requirement_differs(params) -> None:
    # craft a case where the head cannot be dominated: t = F2 (g a) with F2
    # unrelated to anything on the left
    f2 = Var("F2", arrow(O, O))
    s = app(Sym(G), Sym(A))
    t = app(f2, Sym(A))
    sound = HorpoEngine(params, mode="sound").rpo_gt(s, t)
    paper = HorpoEngine(params, mode="paper").rpo_gt(s, t)
    assert sound is None  # cannot dominate the head F2
    assert paper is not None and paper.rule == "Rpo-appl"  # head exempt
    assert paper.premises[0].rule == "Rpo-select"  # s >> a via a <= g a? no: select on s's arg


# ------------- filter semantics -------------


def test_unregarded_position_never_matters(params) -> None:
    filtered = HorpoParams(params.precedence, ArgumentFilter({F: {2}, G: {1}}))
    eng = HorpoEngine(filtered)
    universe = enumerate_terms(SIG, 3, O)
    lhs_variants = [app(Sym(F), u, Sym(A)) for u in universe[:6]]
    rhs = app(Sym(F), Sym(B), Sym(A))
    answers = {(eng.approx(s, rhs) is None,
                eng.geq(s, rhs) is None,
                eng.gt(s, rhs) is None)
               for s in lhs_variants}
    assert len(answers) == 1  # the first argument is invisible


# ------------- determinism and replay -------------


def test_repeated_evaluation_identical(params) -> None:
    s = app(Sym(F), app(Sym(G), Sym(A)), Sym(B))
    t = app(Sym(F), Sym(A), Sym(B))
    first = HorpoEngine(params).gt(s, t)
    second = HorpoEngine(params).gt(s, t)
    assert first == second


def test_verify_derivation_accepts_engine_output(params) -> None:
    eng = HorpoEngine(params)
    universe = enumerate_terms(SIG, 5, O)
    checked = 0
    for s in universe[:40]:
        for t in universe[:40]:
            d = eng.geq(s, t)
            if d is not None:
                assert verify_derivation(d, params)
                checked += 1
    assert checked > 20


def test_verify_derivation_rejects_tampering(params) -> None:
    from dataclasses import replace

    eng = HorpoEngine(params)
    d = eng.gt(app(Sym(G), Sym(A)), Sym(A))
    assert d is not None
    wrong_rule = replace(d, rule="Gr-args")
    assert not verify_derivation(wrong_rule, params)
    wrong_subject = replace(d, right=Sym(B))
    assert not verify_derivation(wrong_subject, params)
