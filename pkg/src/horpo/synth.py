"""Search for ordering parameters that orient a constrained rule set.

Strict rules must decrease strictly, weak rules weakly.  The search walks a
deterministic stream of candidate parameters: argument filters ordered by
how many positions they drop (all-regarded first, positions dropped only
after the smaller filter space is exhausted), crossed with precedences
enumerated as total preorders of the symbols occurring in the problem.  The
first candidates place every theory symbol below all plain symbols, which is
how orientable systems are usually shaped; the stream then falls back to the
complete weak-order space, so a negative answer after exhausting the stream
is definitive.

Weak orders suffice for completeness: the clauses use only positive
precedence facts, so any quasi-order that orients a rule set keeps doing so
after completing it into a total preorder.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterator, Optional, Sequence

from .constrained import (
    ConstrainedEngine,
    ConstrainedDerivation,
    ConstrainedJudgment,
    evaluate_judgment,
)
from .core import ArgumentFilter, HorpoParams, Precedence, PrecedenceError
from .entail import EntailmentChecker
from .terms import FunctionSymbol, Signature, Sym, Term, Var
from .theory import Constraint, TheoryError, TRUE_CONSTRAINT, ValueOrder, check_lvar_set


@dataclass(frozen=True)
class RuleSpec:
    """One rule lhs -> rhs [constraint], demanded strict or weak."""

    lhs: Term
    rhs: Term
    constraint: Constraint
    lvars: frozenset[Var]
    demand: str  # "strict" | "weak"

    def __post_init__(self) -> None:
        if self.demand not in ("strict", "weak"):
            raise ValueError(f"demand must be strict or weak, got {self.demand!r}")
        if self.lhs.structure != self.rhs.structure:
            raise TheoryError(
                f"rule sides must share a type structure: "
                f"{self.lhs.type} vs {self.rhs.type}")
        check_lvar_set(self.lvars)

    @property
    def relation(self) -> str:
        return "gt" if self.demand == "strict" else "geq"

    def judgment(self) -> ConstrainedJudgment:
        return ConstrainedJudgment(
            self.lhs, self.rhs, self.constraint, self.lvars, self.relation)

    def __str__(self) -> str:
        con = f" [{self.constraint}]" if self.constraint != TRUE_CONSTRAINT else ""
        return f"{self.lhs} -> {self.rhs}{con} {{{self.demand}}}"


def make_rule(
    lhs: Term,
    rhs: Term,
    constraint: Optional[Constraint] = None,
    lvars: Optional[Sequence[Var]] = None,
    demand: str = "strict",
) -> RuleSpec:
    """Build a rule; when no logical-variable set is given, the default is
    Var(constraint) plus the fresh variables of the right side."""
    phi = constraint or TRUE_CONSTRAINT
    if lvars is None:
        fresh = rhs.variables() - lhs.variables()
        computed = frozenset(phi.variables | fresh)
    else:
        computed = frozenset(lvars)
    return RuleSpec(lhs, rhs, phi, computed, demand)


@dataclass
class OrientationProblem:
    rules: list[RuleSpec]
    signature: Signature
    value_order: ValueOrder = field(default_factory=ValueOrder.default)

    def occurring_symbols(self) -> list[FunctionSymbol]:
        """Non-value symbols occurring in the rules: plain symbols first,
        then theory symbols, each in first-occurrence order."""
        plain: list[FunctionSymbol] = []
        theory: list[FunctionSymbol] = []
        for rule in self.rules:
            for term in (rule.lhs, rule.rhs):
                for f in term.symbols():
                    if f.is_value:
                        continue
                    bucket = theory if f.is_theory else plain
                    if f not in bucket:
                        bucket.append(f)
        return plain + theory


class OrientationStatus(Enum):
    ORIENTED = "oriented"
    SPACE_EXHAUSTED = "space-exhausted"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass
class OrientationStats:
    candidates: int = 0
    nodes: int = 0
    entailment_calls: int = 0
    entailment_cache_hits: int = 0
    elapsed_ms: int = 0


@dataclass
class OrientationSolution:
    params: HorpoParams
    derivations: list[ConstrainedDerivation]
    stats: OrientationStats


@dataclass
class OrientationOutcome:
    status: OrientationStatus
    solution: Optional[OrientationSolution]
    stats: OrientationStats

    @property
    def oriented(self) -> bool:
        return self.status is OrientationStatus.ORIENTED


@dataclass
class RuleCheck:
    index: int
    rule: RuleSpec
    ok: bool
    derivation: Optional[ConstrainedDerivation] = None
    reason: str = ""


@dataclass
class ValidationReport:
    checks: list[RuleCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


# ---------- candidate enumeration ----------


def all_weak_orders(items: Sequence) -> Iterator[list[list]]:
    """Every ordered partition of the items (first class = highest), in a
    fixed deterministic order."""
    items = list(items)
    if not items:
        yield []
        return
    last = items[-1]
    for partial in all_weak_orders(items[:-1]):
        for k in range(len(partial)):
            yield partial[:k] + [partial[k] + [last]] + partial[k + 1:]
        for g in range(len(partial) + 1):
            yield partial[:g] + [[last]] + partial[g:]


def _canonical(classes: list[list[FunctionSymbol]]) -> tuple:
    return tuple(tuple(sorted(f.name for f in cl)) for cl in classes)


def precedence_stream(symbols: Sequence[FunctionSymbol]) -> Iterator[Precedence]:
    """Candidate precedences over the symbols, heuristic placements first.

    Phase one stacks the plain symbols (every weak order of them) above a
    single class holding all theory symbols; phase two walks the complete
    weak-order space, skipping phase-one duplicates.
    """
    symbols = list(symbols)
    plain = [f for f in symbols if not f.is_theory]
    theory = [f for f in symbols if f.is_theory]
    seen: set[tuple] = set()
    for plain_classes in all_weak_orders(plain):
        classes = plain_classes + ([theory] if theory else [])
        key = _canonical(classes)
        if key not in seen:
            seen.add(key)
            yield Precedence.from_classes(classes)
    for classes in all_weak_orders(symbols):
        key = _canonical(classes)
        if key not in seen:
            seen.add(key)
            yield Precedence.from_classes(classes)


def filter_stream(
    symbols: Sequence[FunctionSymbol], search: bool,
) -> Iterator[ArgumentFilter]:
    """Argument filters ordered by the number of dropped positions; theory
    symbols always regard everything.  With search disabled, only the
    all-regarded filter is produced."""
    yield ArgumentFilter()
    if not search:
        return
    positions = [(f, i) for f in symbols if not f.is_theory
                 for i in range(1, f.max_arity + 1)]
    for k in range(1, len(positions) + 1):
        for dropped in combinations(positions, k):
            overrides: dict[FunctionSymbol, set[int]] = {}
            for f, i in dropped:
                overrides.setdefault(
                    f, set(ArgumentFilter.full(f))).discard(i)
            yield ArgumentFilter({f: frozenset(p) for f, p in overrides.items()})


# ---------- orient and validate ----------


class _Budget:
    def __init__(self, nodes: int, ms: int):
        self.max_nodes = nodes
        self.deadline = time.monotonic() + ms / 1000.0
        self.nodes = 0

    def spend(self) -> bool:
        """Account one unit; False once the budget is gone."""
        self.nodes += 1
        return self.nodes <= self.max_nodes and time.monotonic() <= self.deadline

    @property
    def exhausted(self) -> bool:
        return self.nodes > self.max_nodes or time.monotonic() > self.deadline


def orient(
    problem: OrientationProblem,
    budget_nodes: int = 100_000,
    budget_ms: int = 10_000,
    seed: int = 0,
    mode: str = "sound",
    entailment: Optional[EntailmentChecker] = None,
    filters: str = "search",
) -> OrientationOutcome:
    """Search for parameters orienting every rule at its demanded strength.

    Deterministic for a fixed seed and node budget.  An absent result is a
    statement about the search (space or budget exhausted), never a
    soundness claim about the system.
    """
    if filters not in ("search", "full"):
        raise ValueError(f"filters must be search or full, got {filters!r}")
    checker = entailment or EntailmentChecker()
    budget = _Budget(budget_nodes, budget_ms)
    stats = OrientationStats()
    symbols = problem.occurring_symbols()
    if seed:
        import random

        rng = random.Random(seed)
        rng.shuffle(symbols)

    if not problem.rules:
        params = HorpoParams(Precedence.empty())
        return OrientationOutcome(
            OrientationStatus.ORIENTED,
            OrientationSolution(params, [], stats), stats)

    start = time.monotonic()
    for filt in filter_stream(symbols, search=filters == "search"):
        for prec in precedence_stream(symbols):
            stats.candidates += 1
            params = HorpoParams(prec, filt)
            derivations: list[ConstrainedDerivation] = []
            ok = True
            for rule in problem.rules:
                if not budget.spend():
                    stats.nodes = budget.nodes
                    stats.elapsed_ms = int((time.monotonic() - start) * 1000)
                    _fill_entailment_stats(stats, checker)
                    return OrientationOutcome(
                        OrientationStatus.BUDGET_EXHAUSTED, None, stats)
                outcome = evaluate_judgment(
                    rule.judgment(), params, problem.value_order, checker, mode)
                if outcome.derivation is None:
                    ok = False
                    break
                derivations.append(outcome.derivation)
            if ok:
                stats.nodes = budget.nodes
                stats.elapsed_ms = int((time.monotonic() - start) * 1000)
                _fill_entailment_stats(stats, checker)
                report = validate(problem, params, mode=mode, entailment=checker)
                if not report.ok:  # pragma: no cover - replay must succeed
                    raise AssertionError(
                        "internal error: found parameters failed re-validation")
                return OrientationOutcome(
                    OrientationStatus.ORIENTED,
                    OrientationSolution(params, derivations, stats), stats)
    stats.nodes = budget.nodes
    stats.elapsed_ms = int((time.monotonic() - start) * 1000)
    _fill_entailment_stats(stats, checker)
    return OrientationOutcome(OrientationStatus.SPACE_EXHAUSTED, None, stats)


def _fill_entailment_stats(stats: OrientationStats, checker: EntailmentChecker) -> None:
    stats.entailment_calls = checker.stats.calls
    stats.entailment_cache_hits = checker.stats.cache_hits


def validate(
    problem: OrientationProblem,
    params: HorpoParams,
    mode: str = "sound",
    entailment: Optional[EntailmentChecker] = None,
) -> ValidationReport:
    """Check every rule under the given parameters, reporting the clause tree
    or a failure reason per rule.  Parameters violating the theory-symbol
    filter restriction are rejected before any evaluation."""
    all_symbols = list(problem.signature) + problem.occurring_symbols()
    params.validate(all_symbols, constrained=True)
    checker = entailment or EntailmentChecker()
    checks: list[RuleCheck] = []
    for index, rule in enumerate(problem.rules, start=1):
        outcome = evaluate_judgment(
            rule.judgment(), params, problem.value_order, checker, mode)
        if outcome.derivation is not None:
            checks.append(RuleCheck(index, rule, True, outcome.derivation))
        else:
            reason = "; ".join(outcome.notes) if outcome.notes else (
                "no ≻≻ clause applies" if rule.demand == "strict"
                else "no ⪰ clause applies")
            checks.append(RuleCheck(index, rule, False, None, reason))
    return ValidationReport(checks)
