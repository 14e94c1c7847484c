"""The constrained ordering relations over terms guarded by a constraint.

Judgments have the shape (s, t, phi, L): s relates to t whenever phi holds,
where the variables in L range over ground theory terms.  Three mutually
recursive relations mirror the unconstrained layer:

* weak decrease, clauses ⪰Eq / ⪰Theory / ⪰Mono / ⪰Args / ⪰Greater;
* strict decrease, clauses ≻Theory / ≻Args / ≻Rpo;
* the path relation, clauses ≻≻Select / ≻≻Lex / ≻≻Copy / ≻≻Appl / ≻≻Th.

Theory clauses discharge their side conditions through the entailment
checker; an unknown verdict conservatively blocks the clause (recorded as a
note, never silently treated as valid).

Fidelity modes: mode ``sound`` imposes the unconstrained guard (missing
argument positions regarded) on the path relation and evaluates ≻≻Appl with
the path relation on all pieces including the head; mode ``paper`` drops the
guard and uses the strict relation on the argument pieces only.

The precedence extension appends values below every non-value symbol, with
values ordered by the per-sort value order; ``check_coverage`` samples
respecting substitutions and confirms that accepted judgments instantiate
into the corresponding unconstrained relation under that extension.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

from .core import ArgumentFilter, Cmp, HorpoEngine, HorpoParams, Precedence
from .entail import EntailmentChecker, EntailmentResult, Verdict
from .terms import App, FunctionSymbol, Sym, Term, Var, collapse, is_theory_term
from .theory import (
    BOOL,
    Constraint,
    INT,
    Substitution,
    TheoryError,
    Value,
    ValueOrder,
    calc_normalize,
    check_lvar_set,
    respects,
    symbol_value,
)

GEQ_EQ = "⪰Eq"
GEQ_THEORY = "⪰Theory"
GEQ_MONO = "⪰Mono"
GEQ_ARGS = "⪰Args"
GEQ_GREATER = "⪰Greater"
GT_THEORY = "≻Theory"
GT_ARGS = "≻Args"
GT_RPO = "≻Rpo"
CRPO_SELECT = "≻≻Select"
CRPO_APPL = "≻≻Appl"
CRPO_COPY = "≻≻Copy"
CRPO_LEX = "≻≻Lex"
CRPO_TH = "≻≻Th"

RULE_SLUGS = {
    GEQ_EQ: "geq-eq", GEQ_THEORY: "geq-theory", GEQ_MONO: "geq-mono",
    GEQ_ARGS: "geq-args", GEQ_GREATER: "geq-greater",
    GT_THEORY: "gt-theory", GT_ARGS: "gt-args", GT_RPO: "gt-rpo",
    CRPO_SELECT: "rpo-select", CRPO_APPL: "rpo-appl", CRPO_COPY: "rpo-copy",
    CRPO_LEX: "rpo-lex", CRPO_TH: "rpo-th",
}

RELATIONS = ("geq", "gt", "rpo")

_REL_SYMBOL = {"geq": ">=", "gt": ">", "rpo": ">>"}


@dataclass(frozen=True)
class EntailmentCertificate:
    """Which entailment call justified a Theory step, with its verdict."""

    phi: Constraint
    psi: Constraint
    result: EntailmentResult

    def __str__(self) -> str:
        return f"{self.phi} entails {self.psi}: {self.result}"


@dataclass(frozen=True)
class ConstrainedDerivation:
    rule: str
    left: Term
    right: Term
    index: Optional[int] = None
    premises: tuple["ConstrainedDerivation", ...] = ()
    certificate: Optional[EntailmentCertificate] = None

    @property
    def slug(self) -> str:
        return RULE_SLUGS[self.rule]

    def pretty(self, indent: int = 0) -> str:
        pos = f" at {self.index}" if self.index is not None else ""
        cert = f"  -- {self.certificate}" if self.certificate else ""
        line = (f"{'  ' * indent}{self.left} vs {self.right}   "
                f"[{self.rule}{pos}]{cert}")
        return "\n".join([line] + [p.pretty(indent + 1) for p in self.premises])


@dataclass(frozen=True)
class ConstrainedJudgment:
    """One tuple (s, t, phi, L) together with the relation being asked."""

    left: Term
    right: Term
    constraint: Constraint
    lvars: frozenset[Var]
    relation: str = "geq"

    def __post_init__(self) -> None:
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        check_lvar_set(self.lvars)
        if self.relation in ("geq", "gt"):
            if self.left.structure != self.right.structure:
                raise TheoryError(
                    f"judgment sides must share a type structure: "
                    f"{self.left.type} vs {self.right.type}")
        else:
            head, _ = self.left.spine
            if is_theory_term(self.left) or not isinstance(head, Sym):
                raise TheoryError(
                    "path judgments need a symbol-headed non-theory left side")

    def __str__(self) -> str:
        lv = "{" + ", ".join(sorted(v.name for v in self.lvars)) + "}"
        return (f"{self.left} {_REL_SYMBOL[self.relation]} {self.right} "
                f"[{self.constraint}] L={lv}")


class ExtendedPrecedence(Precedence):
    """The base precedence extended with value symbols.

    Every non-value symbol sits strictly above every value; values compare
    through the value order (strictly by the well-founded order, equivalent
    when equal or both minimal).  The strict part stays acyclic on any finite
    symbol set.
    """

    def __init__(self, base: Precedence, value_order: ValueOrder):
        super().__init__(base.symbols, {})
        self._base = base
        self._vo = value_order

    def compare(self, f: FunctionSymbol, g: FunctionSymbol) -> Cmp:
        v1, v2 = symbol_value(f), symbol_value(g)
        if v1 is None and v2 is None:
            return self._base.compare(f, g)
        if v1 is None:
            return Cmp.GREATER
        if v2 is None:
            return Cmp.SMALLER
        if self._vo.strict(v1, v2):
            return Cmp.GREATER
        if self._vo.strict(v2, v1):
            return Cmp.SMALLER
        if v1 == v2 or (self._vo.is_minimal(v1) and self._vo.is_minimal(v2)):
            return Cmp.EQUIVALENT
        return Cmp.INCOMPARABLE


class ConstrainedEngine:
    """Memoized evaluator for one judgment context (phi, L) under fixed
    parameters.  Collects notes whenever an unknown entailment blocked a
    Theory clause."""

    def __init__(
        self,
        params: HorpoParams,
        value_order: ValueOrder,
        constraint: Constraint,
        lvars: frozenset[Var],
        entailment: Optional[EntailmentChecker] = None,
        mode: str = "sound",
    ):
        if mode not in ("sound", "paper"):
            raise ValueError(f"unknown fidelity mode {mode!r}")
        self.params = params
        self.vo = value_order
        self.phi = constraint
        self.lvars = check_lvar_set(lvars)
        self.entailment = entailment or EntailmentChecker()
        self.mode = mode
        self.notes: list[str] = []
        self._memo: dict[tuple[str, Term, Term], Optional[ConstrainedDerivation]] = {}

    # -- public relations ---------------------------------------------------

    def geq(self, s: Term, t: Term) -> Optional[ConstrainedDerivation]:
        return self._memoized("geq", s, t, self._geq)

    def gt(self, s: Term, t: Term) -> Optional[ConstrainedDerivation]:
        return self._memoized("gt", s, t, self._gt)

    def rpo(self, s: Term, t: Term) -> Optional[ConstrainedDerivation]:
        return self._memoized("rpo", s, t, self._rpo)

    def run(self, relation: str, s: Term, t: Term) -> Optional[ConstrainedDerivation]:
        return {"geq": self.geq, "gt": self.gt, "rpo": self.rpo}[relation](s, t)

    # -- machinery ----------------------------------------------------------

    def _memoized(self, op, s, t, fn):
        key = (op, s, t)
        if key in self._memo:
            return self._memo[key]
        result = fn(s, t)
        self._memo[key] = result
        return result

    def _regarded_applied(self, f: FunctionSymbol, n: int) -> list[int]:
        return sorted(i for i in self.params.filter.regarded(f) if i <= n)

    def _theory_clause(self, s: Term, t: Term, strict: bool, rule: str):
        """Common body of the two Theory clauses."""
        if not (is_theory_term(s) and is_theory_term(t)):
            return None
        if s.type != t.type or not s.type.is_base:
            return None
        if not (s.variables() | t.variables()) <= self.lvars:
            return None
        try:
            lifted = (self.vo.lift_strict(s, t) if strict
                      else self.vo.lift_quasi(s, t))
        except TheoryError as exc:
            self.notes.append(f"{rule} inapplicable on {s} vs {t}: {exc}")
            return None
        result = self.entailment.entails(self.phi, lifted)
        certificate = EntailmentCertificate(self.phi, lifted, result)
        if result.verdict is Verdict.VALID:
            return ConstrainedDerivation(rule, s, t, certificate=certificate)
        if result.verdict is Verdict.UNKNOWN:
            self.notes.append(
                f"{rule} blocked on unknown entailment: {certificate}")
        return None

    def _geq(self, s: Term, t: Term) -> Optional[ConstrainedDerivation]:
        if s.structure != t.structure:
            return None
        if calc_normalize(s) == calc_normalize(t):
            return ConstrainedDerivation(GEQ_EQ, s, t)
        d = self._theory_clause(s, t, strict=False, rule=GEQ_THEORY)
        if d is not None:
            return d
        if not is_theory_term(s):
            s_head, s_args = s.spine
            t_head, t_args = t.spine
            if (isinstance(s_head, Var) and s_head == t_head
                    and len(s_args) == len(t_args)):
                premises = []
                for si, ti in zip(s_args, t_args):
                    p = self.geq(si, ti)
                    if p is None:
                        premises = None
                        break
                    premises.append(p)
                if premises is not None:
                    return ConstrainedDerivation(
                        GEQ_MONO, s, t, premises=tuple(premises))
            if (isinstance(s_head, Sym) and isinstance(t_head, Sym)
                    and len(s_args) == len(t_args)):
                f, g = s_head.symbol, t_head.symbol
                if (collapse(f.type) == collapse(g.type)
                        and self.params.precedence.equiv(f, g)
                        and self.params.filter.regarded(f)
                        == self.params.filter.regarded(g)):
                    premises = []
                    for i in self._regarded_applied(f, len(s_args)):
                        p = self.geq(s_args[i - 1], t_args[i - 1])
                        if p is None:
                            premises = None
                            break
                        premises.append(p)
                    if premises is not None:
                        return ConstrainedDerivation(
                            GEQ_ARGS, s, t, premises=tuple(premises))
        strict = self.gt(s, t)
        if strict is not None:
            return ConstrainedDerivation(GEQ_GREATER, s, t, premises=(strict,))
        return None

    def _gt(self, s: Term, t: Term) -> Optional[ConstrainedDerivation]:
        if s.structure != t.structure:
            return None
        d = self._theory_clause(s, t, strict=True, rule=GT_THEORY)
        if d is not None:
            return d
        if not is_theory_term(s):
            s_head, s_args = s.spine
            t_head, t_args = t.spine
            if (isinstance(s_head, Sym) and isinstance(t_head, Sym)
                    and len(s_args) == len(t_args)):
                f, g = s_head.symbol, t_head.symbol
                if (collapse(f.type) == collapse(g.type)
                        and self.params.precedence.equiv(f, g)
                        and self.params.filter.regarded(f)
                        == self.params.filter.regarded(g)):
                    idx = self._regarded_applied(f, len(s_args))
                    premises = []
                    for i in idx:
                        p = self.geq(s_args[i - 1], t_args[i - 1])
                        if p is None:
                            premises = None
                            break
                        premises.append(p)
                    if premises is not None:
                        witness = None
                        for k, i in enumerate(idx):
                            strict = self.gt(s_args[i - 1], t_args[i - 1])
                            if strict is not None:
                                witness = i
                                premises[k] = strict
                                break
                        if witness is not None:
                            return ConstrainedDerivation(
                                GT_ARGS, s, t, index=witness,
                                premises=tuple(premises))
        rpo = self.rpo(s, t)
        if rpo is not None:
            return ConstrainedDerivation(GT_RPO, s, t, premises=(rpo,))
        return None

    def _rpo(self, s: Term, t: Term) -> Optional[ConstrainedDerivation]:
        if is_theory_term(s):
            return None
        s_head, s_args = s.spine
        if not isinstance(s_head, Sym):
            return None
        f = s_head.symbol
        n = len(s_args)
        if self.mode == "sound":
            # guard imported from the unconstrained layer; without it the
            # coverage mapping onto the path clauses fails
            regarded = self.params.filter.regarded(f)
            if any(i not in regarded for i in range(n + 1, f.max_arity + 1)):
                return None

        for i in self._regarded_applied(f, n):
            p = self.gt(s_args[i - 1], t)
            if p is not None:
                return ConstrainedDerivation(
                    CRPO_SELECT, s, t, index=i, premises=(p,))

        t_head, t_args = t.spine
        m = len(t_args)
        if isinstance(t_head, Sym):
            g = t_head.symbol
            if self.params.precedence.equiv(f, g):
                d = self._lex(s, t, f, g, s_args, t_args)
                if d is not None:
                    return d
            if self.params.precedence.gt(f, g):
                premises = []
                for j in self._regarded_applied(g, m):
                    p = self.rpo(s, t_args[j - 1])
                    if p is None:
                        premises = None
                        break
                    premises.append(p)
                if premises is not None:
                    return ConstrainedDerivation(
                        CRPO_COPY, s, t, premises=tuple(premises))

        if isinstance(t, App):
            if self.mode == "paper":
                pieces = list(t_args)
                recurse = self.gt
            else:
                pieces = [t_head] + list(t_args)
                recurse = self.rpo
            premises = []
            for piece in pieces:
                p = recurse(s, piece)
                if p is None:
                    premises = None
                    break
                premises.append(p)
            if premises is not None:
                return ConstrainedDerivation(
                    CRPO_APPL, s, t, premises=tuple(premises))

        if (is_theory_term(t) and t.type.is_base
                and t.variables() <= self.lvars):
            return ConstrainedDerivation(CRPO_TH, s, t)
        return None

    def _lex(self, s, t, f, g, s_args, t_args):
        pi_f = self.params.filter.regarded(f)
        pi_g = self.params.filter.regarded(g)
        n, m = len(s_args), len(t_args)
        for i in sorted(pi_f & pi_g):
            if i > min(n, m):
                break
            upto = set(range(1, i + 1))
            if pi_f & upto != pi_g & upto:
                continue
            premises = []
            ok = True
            for j in range(1, i):
                if j in pi_f:
                    p = self.geq(s_args[j - 1], t_args[j - 1])
                    if p is None:
                        ok = False
                        break
                    premises.append(p)
            if not ok:
                continue
            strict = self.gt(s_args[i - 1], t_args[i - 1])
            if strict is None:
                continue
            premises.append(strict)
            for j in range(i + 1, m + 1):
                if j in pi_g:
                    p = self.rpo(s, t_args[j - 1])
                    if p is None:
                        ok = False
                        break
                    premises.append(p)
            if ok:
                return ConstrainedDerivation(
                    CRPO_LEX, s, t, index=i, premises=tuple(premises))
        return None


# -- judgment-level API --------------------------------------------------------


@dataclass
class JudgmentOutcome:
    derivation: Optional[ConstrainedDerivation]
    notes: tuple[str, ...] = ()

    @property
    def present(self) -> bool:
        return self.derivation is not None


def evaluate_judgment(
    judgment: ConstrainedJudgment,
    params: HorpoParams,
    value_order: Optional[ValueOrder] = None,
    entailment: Optional[EntailmentChecker] = None,
    mode: str = "sound",
) -> JudgmentOutcome:
    engine = ConstrainedEngine(
        params, value_order or ValueOrder.default(), judgment.constraint,
        judgment.lvars, entailment, mode)
    derivation = engine.run(judgment.relation, judgment.left, judgment.right)
    return JudgmentOutcome(derivation, tuple(dict.fromkeys(engine.notes)))


def c_geq(judgment: ConstrainedJudgment, params: HorpoParams,
          value_order: Optional[ValueOrder] = None, **kw):
    assert judgment.relation == "geq"
    return evaluate_judgment(judgment, params, value_order, **kw).derivation


def c_gt(judgment: ConstrainedJudgment, params: HorpoParams,
         value_order: Optional[ValueOrder] = None, **kw):
    assert judgment.relation == "gt"
    return evaluate_judgment(judgment, params, value_order, **kw).derivation


def c_rpo(judgment: ConstrainedJudgment, params: HorpoParams,
          value_order: Optional[ValueOrder] = None, **kw):
    assert judgment.relation == "rpo"
    return evaluate_judgment(judgment, params, value_order, **kw).derivation


# -- derivation replay ---------------------------------------------------------


def verify_constrained_derivation(
    d: ConstrainedDerivation,
    judgment: ConstrainedJudgment,
    params: HorpoParams,
    value_order: Optional[ValueOrder] = None,
    entailment: Optional[EntailmentChecker] = None,
    mode: str = "sound",
) -> bool:
    """Re-validate a derivation: every step's side conditions hold and every
    Theory step's entailment re-checks as valid."""
    vo = value_order or ValueOrder.default()
    checker = entailment or EntailmentChecker()
    engine = ConstrainedEngine(params, vo, judgment.constraint, judgment.lvars,
                               checker, mode)

    def check(node: ConstrainedDerivation) -> bool:
        s, t = node.left, node.right
        replay = engine.run(
            "geq" if node.rule.startswith("⪰")
            else ("rpo" if node.rule.startswith("≻≻") else "gt"),
            s, t)
        if replay is None:
            return False
        if node.rule in (GEQ_THEORY, GT_THEORY):
            if node.certificate is None:
                return False
            again = checker.entails(node.certificate.phi, node.certificate.psi)
            if again.verdict is not Verdict.VALID:
                return False
        return all(check(p) for p in node.premises)

    if d.left != judgment.left or d.right != judgment.right:
        return False
    return check(d)


# -- coverage sampling -----------------------------------------------------------


@dataclass
class CoverageReport:
    judgment: ConstrainedJudgment
    samples_requested: int
    checked: int
    vacuous: bool
    counterexamples: list[str]
    distinct_available: int

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def line(self) -> str:
        if self.vacuous:
            return f"VACUOUS (unsatisfiable within bounds)  {self.judgment}"
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.judgment}: {self.checked} respecting "
                f"substitutions, {len(self.counterexamples)} violations")


_COVERAGE_RELATION = {"geq": "geq", "gt": "gt", "rpo": "rpo_gt"}
_ENUM_CAP = 250_000


def respecting_assignments(
    constraint: Constraint,
    lvars: frozenset[Var],
    bound: int,
) -> tuple[list[Substitution], int]:
    """All substitutions over Var(phi) union L into values of the bounded
    domain that respect the constraint.  Returns (list, domain size)."""
    variables = sorted(constraint.variables | lvars, key=lambda v: v.name)
    domains: list[list[Term]] = []
    for v in variables:
        sort = v.type.result_sort
        if sort == BOOL:
            domains.append([Value(BOOL, False).term(), Value(BOOL, True).term()])
        elif sort == INT:
            domains.append([Value(INT, n).term() for n in range(-bound, bound + 1)])
        else:
            raise TheoryError(f"cannot sample values of sort {sort}")
    total = 1
    for d in domains:
        total *= len(d)
    if total > _ENUM_CAP:
        raise TheoryError(
            f"respecting-substitution space {total} exceeds cap {_ENUM_CAP}")
    found: list[Substitution] = []
    for point in product(*domains) if variables else [()]:
        gamma = Substitution(dict(zip(variables, point)))
        if respects(gamma, constraint, lvars):
            found.append(gamma)
    return found, total


def check_coverage(
    judgment: ConstrainedJudgment,
    params: HorpoParams,
    value_order: Optional[ValueOrder] = None,
    samples: int = 100,
    seed: int = 0,
    bound: int = 16,
    entailment: Optional[EntailmentChecker] = None,
    mode: str = "sound",
) -> CoverageReport:
    """Sample respecting substitutions and confirm each instance of an
    accepted judgment lands in the corresponding unconstrained relation
    under the value-extended precedence."""
    vo = value_order or ValueOrder.default()
    outcome = evaluate_judgment(judgment, params, vo, entailment, mode)
    if outcome.derivation is None:
        raise ValueError(f"judgment not established, cannot check coverage: {judgment}")

    candidates, _ = respecting_assignments(judgment.constraint, judgment.lvars, bound)
    if not candidates:
        return CoverageReport(judgment, samples, 0, True, [], 0)
    rng = random.Random(seed)
    chosen = (candidates if len(candidates) <= samples
              else rng.sample(candidates, samples))

    extended = HorpoParams(ExtendedPrecedence(params.precedence, vo), params.filter)
    engine = HorpoEngine(extended, mode)
    relate = getattr(engine, _COVERAGE_RELATION[judgment.relation])
    failures: list[str] = []
    for gamma in chosen:
        s_inst = calc_normalize(gamma.apply(judgment.left))
        t_inst = calc_normalize(gamma.apply(judgment.right))
        if relate(s_inst, t_inst) is None:
            failures.append(f"{gamma}: {s_inst} not related to {t_inst}")
    return CoverageReport(
        judgment, samples, len(chosen), False, failures, len(candidates))
