"""Constraint entailment with two backends.

``entails(phi, psi)`` asks whether every assignment of theory values that
satisfies phi also satisfies psi.  Two backends cooperate:

* a bounded backend enumerating assignments over a finite range, which can
  refute (producing a witness) and is complete only when explicit finite
  domains are configured;
* an external backend speaking SMT-LIB2 over a child process's stdin/stdout,
  which checks validity by asserting ``phi /\\ not psi`` and reading unsat.

The solver command comes from HORPO_SMT_CMD (and HORPO_SMT_TIMEOUT_MS); when
unset, a z3 or cvc5 binary on PATH is used, falling back to the bundled
``horpo-smt`` shim, an incomplete linear-arithmetic checker.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from .terms import App, Sym, Term, Var
from .theory import (
    BOOL,
    INT,
    Constraint,
    Sort,
    Substitution,
    TheoryError,
    Value,
    calc_normalize,
    TRUE,
    is_ground_theory_term,
)

DEFAULT_BOUND = 16
DEFAULT_TIMEOUT_MS = 5000
_MAX_ASSIGNMENTS = 400_000


class Verdict(Enum):
    VALID = "valid"
    INVALID = "invalid"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class EntailmentResult:
    verdict: Verdict
    backend: str
    witness: Optional[dict[str, Value]] = None
    reason: str = ""

    def __str__(self) -> str:
        extra = f" ({self.reason})" if self.reason else ""
        return f"{self.verdict.value} [{self.backend}]{extra}"


def free_theory_variables(*constraints: Constraint) -> list[Var]:
    """The free variables of the constraints, sorted by name; all must have a
    theory sort."""
    seen: dict[str, Var] = {}
    for c in constraints:
        for v in c.variables:
            if not v.type.is_base or v.type.result_sort not in (INT, BOOL):
                raise TheoryError(
                    f"entailment variable {v.name} must have sort Int or Bool")
            seen[v.name] = v
    return [seen[name] for name in sorted(seen)]


# ---------- Bounded backend ----------


class BoundedBackend:
    """Exhaustive assignment enumeration over a bounded range.

    Refutation-only unless every variable's sort has a configured finite
    domain, in which case the sweep is complete and may answer valid.
    """

    def __init__(
        self,
        bound: int = DEFAULT_BOUND,
        finite_domains: Optional[Mapping[Sort, Sequence[Value]]] = None,
        max_assignments: int = _MAX_ASSIGNMENTS,
    ):
        self.bound = bound
        self.finite_domains = dict(finite_domains) if finite_domains else {}
        self.max_assignments = max_assignments

    def _domain(self, sort: Sort) -> tuple[list[Value], bool]:
        """Values to sweep for the sort, plus whether they are exhaustive."""
        if sort in self.finite_domains:
            return list(self.finite_domains[sort]), True
        if sort == BOOL:
            return [Value(BOOL, False), Value(BOOL, True)], True
        if sort == INT:
            return [Value(INT, n) for n in range(-self.bound, self.bound + 1)], False
        raise TheoryError(f"no bounded domain for sort {sort}")

    def check(self, phi: Constraint, psi: Constraint) -> EntailmentResult:
        variables = free_theory_variables(phi, psi)
        domains: list[list[Value]] = []
        complete = True
        total = 1
        for v in variables:
            dom, exhaustive = self._domain(v.type.result_sort)
            domains.append(dom)
            complete = complete and exhaustive
            total *= len(dom)
        if total > self.max_assignments:
            return EntailmentResult(
                Verdict.UNKNOWN, "bounded",
                reason=f"assignment space {total} exceeds cap {self.max_assignments}")

        def sweep(i: int, partial: dict[Var, Term]) -> Optional[dict[str, Value]]:
            if i == len(variables):
                gamma = Substitution(partial)
                if calc_normalize(gamma.apply(phi.term)) != TRUE:
                    return None
                if calc_normalize(gamma.apply(psi.term)) != TRUE:
                    return {v.name: value for v, value in (
                        (w, _value_of_term(partial[w])) for w in variables)}
                return None
            for value in domains[i]:
                partial[variables[i]] = value.term()
                hit = sweep(i + 1, partial)
                if hit is not None:
                    return hit
            partial.pop(variables[i], None)
            return None

        witness = sweep(0, {})
        if witness is not None:
            return EntailmentResult(Verdict.INVALID, "bounded", witness=witness)
        if complete:
            return EntailmentResult(Verdict.VALID, "bounded")
        return EntailmentResult(
            Verdict.UNKNOWN, "bounded",
            reason=f"no refutation within [-{self.bound}, {self.bound}]")


def _value_of_term(term: Term) -> Value:
    from .theory import value_of

    v = value_of(term)
    assert v is not None
    return v


# ---------- SMT-LIB2 printing ----------

_SMT_OPS = {
    "+": "+", "-": "-", "*": "*", ">": ">", ">=": ">=", "<": "<", "<=": "<=",
    "=": "=", "/\\": "and", "\\/": "or", "not": "not",
}

_SIMPLE_SYMBOL_CHARS = set(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    "~!@$%^&*_-+=<>.?/")


def _smt_name(name: str) -> str:
    if name and all(c in _SIMPLE_SYMBOL_CHARS for c in name) and not name[0].isdigit():
        return name
    return "|" + name.replace("|", "_") + "|"


def term_to_smt(term: Term) -> str:
    """Render a theory term in SMT-LIB2 concrete syntax."""
    from .theory import value_of

    value = value_of(term)
    if value is not None:
        if value.sort == BOOL:
            return str(value)
        n = value.payload
        return str(n) if n >= 0 else f"(- {-n})"
    if isinstance(term, Var):
        return _smt_name(term.name)
    head, args = term.spine
    if isinstance(head, Sym):
        name = head.symbol.name
        rendered = " ".join(term_to_smt(a) for a in args)
        if name == "neg":
            return f"(- {rendered})"
        if name == "!=":
            return f"(distinct {rendered})"
        op = _SMT_OPS.get(name)
        if op is None:
            raise TheoryError(f"symbol {name} has no SMT-LIB2 rendering")
        return f"({op} {rendered})" if args else op
    raise TheoryError(f"cannot render term for SMT: {term}")


def _is_linear(term: Term) -> bool:
    for sub in term.iter_subterms():
        head, args = sub.spine
        if isinstance(head, Sym) and head.symbol.name == "*" and len(args) == 2:
            if not (is_ground_theory_term(args[0]) or is_ground_theory_term(args[1])):
                return False
    return True


def entailment_script(phi: Constraint, psi: Constraint) -> str:
    """The SMT-LIB2 script whose unsat answer certifies phi entails psi."""
    variables = free_theory_variables(phi, psi)
    logic = "QF_LIA" if _is_linear(phi.term) and _is_linear(psi.term) else "QF_NIA"
    lines = [f"(set-logic {logic})"]
    for v in variables:
        lines.append(f"(declare-const {_smt_name(v.name)} {v.type.result_sort.name})")
    lines.append(f"(assert {term_to_smt(phi.term)})")
    lines.append(f"(assert (not {term_to_smt(psi.term)}))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


# ---------- External backend ----------


def default_smt_command() -> list[str]:
    env = os.environ.get("HORPO_SMT_CMD")
    if env:
        return shlex.split(env)
    z3 = shutil.which("z3")
    if z3:
        return [z3, "-in"]
    cvc5 = shutil.which("cvc5")
    if cvc5:
        return [cvc5, "--lang", "smt2"]
    return [sys.executable, "-m", "horpo.smt_shim"]


def default_timeout_ms() -> int:
    raw = os.environ.get("HORPO_SMT_TIMEOUT_MS")
    try:
        return int(raw) if raw else DEFAULT_TIMEOUT_MS
    except ValueError:
        return DEFAULT_TIMEOUT_MS


class SmtBackend:
    """One-shot SMT-LIB2 sessions over a child process.

    Each query spawns its own process, so concurrent evaluation sessions
    never share solver state.
    """

    def __init__(self, command: Optional[Sequence[str]] = None,
                 timeout_ms: Optional[int] = None):
        self.command = list(command) if command else default_smt_command()
        self.timeout_ms = timeout_ms if timeout_ms is not None else default_timeout_ms()

    def check(self, phi: Constraint, psi: Constraint) -> EntailmentResult:
        script = entailment_script(phi, psi)
        try:
            proc = subprocess.run(
                self.command,
                input=script,
                capture_output=True,
                text=True,
                timeout=self.timeout_ms / 1000.0,
            )
        except FileNotFoundError:
            return EntailmentResult(
                Verdict.UNKNOWN, "smt", reason=f"solver unavailable: {self.command[0]}")
        except subprocess.TimeoutExpired:
            return EntailmentResult(
                Verdict.UNKNOWN, "smt", reason=f"solver timeout after {self.timeout_ms} ms")
        except OSError as exc:
            return EntailmentResult(Verdict.UNKNOWN, "smt", reason=f"solver failed: {exc}")
        answer = None
        for line in proc.stdout.splitlines():
            line = line.strip()
            if line in ("sat", "unsat", "unknown"):
                answer = line
                break
        if answer == "unsat":
            return EntailmentResult(Verdict.VALID, "smt")
        if answer == "sat":
            return EntailmentResult(
                Verdict.INVALID, "smt", reason="solver found a countermodel")
        detail = proc.stderr.strip() or proc.stdout.strip() or f"exit {proc.returncode}"
        return EntailmentResult(
            Verdict.UNKNOWN, "smt", reason=f"unparseable solver reply: {detail[:200]}")


# ---------- Combined checker ----------


@dataclass
class EntailmentStats:
    calls: int = 0
    cache_hits: int = 0
    smt_queries: int = 0
    by_verdict: dict[str, int] = field(default_factory=dict)


class EntailmentChecker:
    """Cached entailment combining the bounded and external backends.

    mode "off" uses only the bounded backend; "auto" tries a bounded
    refutation first and consults the external solver otherwise; "always"
    uses only the external solver.  An unknown never upgrades to valid.
    """

    def __init__(
        self,
        mode: str = "auto",
        bound: int = DEFAULT_BOUND,
        finite_domains: Optional[Mapping[Sort, Sequence[Value]]] = None,
        smt: Optional[SmtBackend] = None,
    ):
        if mode not in ("off", "auto", "always"):
            raise ValueError(f"unknown entailment mode {mode!r}")
        self.mode = mode
        self.bounded = BoundedBackend(bound=bound, finite_domains=finite_domains)
        self.smt = smt or SmtBackend()
        self.stats = EntailmentStats()
        self._cache: dict[tuple[Term, Term], EntailmentResult] = {}

    def entails(self, phi: Constraint, psi: Constraint) -> EntailmentResult:
        key = (phi.term, psi.term)
        self.stats.calls += 1
        cached = self._cache.get(key)
        if cached is not None:
            self.stats.cache_hits += 1
            return cached
        result = self._check(phi, psi)
        self.stats.by_verdict[result.verdict.value] = (
            self.stats.by_verdict.get(result.verdict.value, 0) + 1)
        self._cache[key] = result
        return result

    def _check(self, phi: Constraint, psi: Constraint) -> EntailmentResult:
        if self.mode == "always":
            self.stats.smt_queries += 1
            return self.smt.check(phi, psi)
        bounded = self.bounded.check(phi, psi)
        if bounded.verdict is not Verdict.UNKNOWN or self.mode == "off":
            return bounded
        self.stats.smt_queries += 1
        external = self.smt.check(phi, psi)
        if external.verdict is Verdict.UNKNOWN:
            reason = "; ".join(r for r in (bounded.reason, external.reason) if r)
            return EntailmentResult(Verdict.UNKNOWN, "bounded+smt", reason=reason)
        return external
