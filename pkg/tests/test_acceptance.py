"""The acceptance gate: one test and one printed pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

from __future__ import annotations

import time

import pytest

from horpo.constrained import (
    ConstrainedJudgment,
    ExtendedPrecedence,
    check_coverage,
    evaluate_judgment,
    verify_constrained_derivation,
)
from horpo.core import HorpoEngine, HorpoParams, Precedence
from horpo.entail import EntailmentChecker
from horpo.fixtures import FIXTURE_NAMES, fixture_text
from horpo.oracle import (
    benchmark_param_sets,
    benchmark_signature,
    build_graph,
    check_lemmas,
    engine_agreement,
)
from horpo.problems import parse_problem
from horpo.synth import OrientationStatus, orient, validate
from horpo.terms import Signature, Sym, enumerate_terms
from horpo.theory import (
    BOOL,
    INT,
    MINUS,
    NEG,
    PLUS,
    TIMES,
    Value,
    ValueOrder,
    calc_normalize,
    int_value,
    value_of,
)

UNIVERSE_SIZE = 5  # node count bound of the enumerated universe
SUBSTITUTION_SAMPLES = 50
COVERAGE_SAMPLES = 100


def report(criterion: int, name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    extra = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {criterion} {name}: {status}{extra}")


@pytest.fixture(scope="module")
def lemma_run():
    """Criterion-1 data, shared with criterion 4: graphs and lemma reports
    for every benchmark parameter set, plus the wall-clock cost."""
    signature, pool = benchmark_signature()
    start = time.monotonic()
    runs = []
    for name, params in benchmark_param_sets(signature):
        graph = build_graph(signature, UNIVERSE_SIZE, params, variables=pool)
        rep = check_lemmas(graph, substitutions=SUBSTITUTION_SAMPLES, seed=0)
        runs.append((name, params, graph, rep))
    elapsed = time.monotonic() - start
    return signature, pool, runs, elapsed


@pytest.fixture(scope="module")
def oriented_fixtures(checker):
    """Every bundled fixture, oriented (the filter-required one with filter
    search), with its problem and solution."""
    out = {}
    for name in FIXTURE_NAMES:
        pf = parse_problem(fixture_text(f"{name}.lcstrs"))
        problem = pf.orientation_problem()
        outcome = orient(problem, entailment=checker)
        assert outcome.oriented, f"fixture {name} must orient"
        out[name] = (problem, outcome)
    return out


def test_criterion_1_lemma_suite(lemma_run) -> None:
    signature, pool, runs, elapsed = lemma_run
    failures = []
    universe = len(runs[0][2].universe)
    for name, _, _, rep in runs:
        for result in rep.results:
            if not result.passed:
                failures.append(f"{name}/{result.name}: {result.counterexample}")
    ok = not failures and elapsed < 300
    report(1, "lemma-suite", ok,
           f"{universe} terms, {len(runs)} parameter sets, {elapsed:.1f}s")
    assert not failures, failures
    assert elapsed < 300


def test_criterion_2_engine_oracle_equivalence(lemma_run) -> None:
    signature, pool, runs, _ = lemma_run
    total = 0
    mismatches: list[str] = []
    for name, params, graph, _ in runs:
        for mode in ("sound", "paper"):
            if mode == graph.mode:
                current = graph
            else:
                current = build_graph(signature, UNIVERSE_SIZE, params,
                                      mode=mode, variables=pool)
            checked, bad = engine_agreement(current)
            total += checked
            mismatches.extend(f"{name}/{mode}: {m}" for m in bad)
    ok = not mismatches
    report(2, "engine-oracle-equivalence", ok, f"{total} pairs, both modes")
    assert not mismatches, mismatches[:5]


def test_criterion_3_coverage(checker, oriented_fixtures) -> None:
    checked = 0
    failures = []
    for name, (problem, outcome) in oriented_fixtures.items():
        params = outcome.solution.params
        for rule in problem.rules:
            judgment = rule.judgment()
            rep = check_coverage(
                judgment, params, problem.value_order,
                samples=COVERAGE_SAMPLES, seed=0, bound=128,
                entailment=checker)
            if rep.vacuous:
                failures.append(f"{name}: vacuous coverage for {rule}")
            elif not rep.passed:
                failures.append(f"{name}: {rep.counterexamples[0]}")
            checked += rep.checked
    ok = not failures
    report(3, "coverage-lemma", ok,
           f"{checked} respecting substitutions across {len(oriented_fixtures)} fixtures")
    assert not failures, failures


def test_criterion_4_reduction_pair_conditions(checker, lemma_run,
                                               oriented_fixtures) -> None:
    # calculation containment: s weakly above its normal form, at the
    # normal-form level (s equals the value or sits above it via the path
    # relation under the value-extended precedence)
    value_atoms = [int_value(n) for n in (0, 1, 2)]
    theory_sig = Signature(
        [PLUS, MINUS, TIMES, NEG] + [v.spine[0].symbol for v in value_atoms])
    ground = enumerate_terms(theory_sig, 9, value_atoms[0].type,
                             variables=())[:200]
    extended = HorpoParams(
        ExtendedPrecedence(
            Precedence.from_classes([[PLUS, MINUS, TIMES, NEG]]),
            ValueOrder.default()))
    engine = HorpoEngine(extended)
    containment_failures = []
    for s in ground:
        v = calc_normalize(s)
        assert value_of(v) is not None
        if s != v and engine.rpo_gt(s, v) is None:
            containment_failures.append(str(s))

    # the weak relation contains the strict one on every evaluated judgment
    contains_failures = []
    evaluated = 0
    for name, (problem, outcome) in oriented_fixtures.items():
        params = outcome.solution.params
        for rule in problem.rules:
            strict_j = ConstrainedJudgment(
                rule.lhs, rule.rhs, rule.constraint, rule.lvars, "gt")
            strict = evaluate_judgment(strict_j, params, problem.value_order,
                                       checker)
            if strict.derivation is not None:
                evaluated += 1
                weak_j = ConstrainedJudgment(
                    rule.lhs, rule.rhs, rule.constraint, rule.lvars, "geq")
                weak = evaluate_judgment(weak_j, params, problem.value_order,
                                         checker)
                if weak.derivation is None:
                    contains_failures.append(f"{name}: {rule}")

    # monotonicity of the weak relation is discharged by the criterion-1 run
    mono = [r for _, _, _, rep in lemma_run[2]
            for r in rep.results if r.name == "geq-monotonic"]
    mono_ok = mono and all(r.passed for r in mono)

    ok = not containment_failures and not contains_failures and mono_ok
    report(4, "reduction-pair-conditions", ok,
           f"{len(ground)} ground terms, {evaluated} strict judgments")
    assert len(ground) == 200
    assert not containment_failures, containment_failures[:3]
    assert not contains_failures, contains_failures
    assert mono_ok


def test_criterion_5_end_to_end_orientation(checker) -> None:
    timings = {}
    failures = []
    for name in ("sum", "factorial"):
        pf = parse_problem(fixture_text(f"{name}.lcstrs"))
        problem = pf.orientation_problem()
        fresh = EntailmentChecker(mode="auto")  # no cross-run cache
        start = time.monotonic()
        outcome = orient(problem, entailment=fresh)  # default budget
        timings[name] = time.monotonic() - start
        if not outcome.oriented:
            failures.append(f"{name}: {outcome.status.value}")
            continue
        if timings[name] >= 10:
            failures.append(f"{name}: took {timings[name]:.1f}s")
        # the strict second rule goes through the path relation with an
        # entailment-backed lexicographic step
        strict = outcome.solution.derivations[1]
        labels = _labels(strict)
        for needed in ("≻≻Copy", "≻≻Lex", "≻Theory"):
            if needed not in labels:
                failures.append(f"{name}: missing {needed} in derivation")
        # the found derivations re-validate
        rep = validate(problem, outcome.solution.params, entailment=checker)
        if not rep.ok:
            failures.append(f"{name}: re-validation failed")
        for check, rule in zip(rep.checks, problem.rules):
            if not verify_constrained_derivation(
                    check.derivation, rule.judgment(), outcome.solution.params,
                    problem.value_order, checker):
                failures.append(f"{name}: replay failed for {rule}")
    ok = not failures
    detail = ", ".join(f"{k} {v * 1000:.0f}ms" for k, v in timings.items())
    report(5, "end-to-end-orientation", ok, detail)
    assert not failures, failures


def _labels(derivation) -> set[str]:
    out = {derivation.rule}
    for p in derivation.premises:
        out |= _labels(p)
    return out


def test_criterion_6_value_order_axioms() -> None:
    start = time.monotonic()
    vo = ValueOrder.default()
    failures = []
    values = [Value(INT, n) for n in range(-16, 17)]
    # well-foundedness: chains are finite because every strict step lowers a
    # bounded nonnegative measure; checked as no cycles plus chain bounds
    for a in values:
        if vo.strict(a, a):
            failures.append(f"irreflexivity: {a}")
    import functools

    @functools.lru_cache(maxsize=None)
    def longest(n: int) -> int:
        nexts = [m for m in range(-16, 17)
                 if vo.strict(Value(INT, n), Value(INT, m))]
        return 1 + max((longest(m) for m in nexts), default=0)

    for a in values:
        bound = a.payload + 2 if a.payload >= 0 else 1
        if longest(a.payload) > bound:
            failures.append(f"chain from {a} too long")
    # compatibility clause, exhaustively
    for a in values:
        for b in values:
            if vo.quasi(a, b) and not (
                    vo.strict(a, b) or a == b
                    or (vo.is_minimal(a) and vo.is_minimal(b))):
                failures.append(f"compatibility: {a} vs {b}")
    bools = [Value(BOOL, False), Value(BOOL, True)]
    for a in bools:
        for b in bools:
            if vo.strict(a, b):
                failures.append("bool strict must be empty")
            if not vo.quasi(a, b):
                failures.append("bool quasi must be total")
    elapsed = time.monotonic() - start
    ok = not failures and elapsed < 1.0
    report(6, "value-order-axioms", ok, f"[-16,16] exhaustive, {elapsed * 1000:.0f}ms")
    assert not failures, failures[:5]
    assert elapsed < 1.0


def test_criterion_7_negative_controls(checker) -> None:
    failures = []
    # the strict self-rule is definitively unorientable
    self_pf = parse_problem("sort u\na : u\na -> a {strict}\n")
    outcome = orient(self_pf.orientation_problem(), entailment=checker)
    if outcome.status is not OrientationStatus.SPACE_EXHAUSTED:
        failures.append(f"a -> a gave {outcome.status.value}")

    # the filter-required fixture splits on whether filters are searched
    pf = parse_problem(fixture_text("filtered.lcstrs"))
    problem = pf.orientation_problem()
    forced = orient(problem, entailment=checker, filters="full")
    if forced.status is not OrientationStatus.SPACE_EXHAUSTED:
        failures.append(f"forced full filters gave {forced.status.value}")
    searched = orient(problem, entailment=checker, filters="search")
    if not searched.oriented:
        failures.append(f"filter search gave {searched.status.value}")
    else:
        wrap = pf.signature.get("wrap")
        if searched.solution.params.filter.regarded(wrap) != frozenset():
            failures.append("expected wrap's argument to be unregarded")
    ok = not failures
    report(7, "negative-controls", ok)
    assert not failures, failures
