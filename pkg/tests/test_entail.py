from __future__ import annotations

import os
import stat
import subprocess
import sys
from io import StringIO

import pytest

from horpo.entail import (
    BoundedBackend,
    EntailmentChecker,
    SmtBackend,
    Verdict,
    entailment_script,
    term_to_smt,
)
from horpo.smt_shim import run as shim_run
from horpo.terms import Base, Sym, Var, app
from horpo.theory import (
    AND,
    BOOL,
    Constraint,
    GE,
    GT,
    INT,
    LT,
    NE,
    NEG,
    OR,
    MINUS,
    PLUS,
    TIMES,
    TRUE_CONSTRAINT,
    Value,
    int_value,
)

I = Base(INT)
X = Var("x", I)
Y = Var("y", I)
B = Var("p", Base(BOOL))

PHI_POS = Constraint(app(Sym(GT), X, int_value(0)))
PSI_NONNEG = Constraint(app(Sym(GE), X, int_value(0)))


def shim(script: str) -> str:
    out = StringIO()
    shim_run(script, out)
    return out.getvalue().strip()


# ------------- bounded backend -------------


def test_bounded_refutes_with_witness() -> None:
    result = BoundedBackend().check(TRUE_CONSTRAINT, Constraint(app(Sym(GT), X, X)))
    assert result.verdict is Verdict.INVALID
    assert result.witness is not None and "x" in result.witness


def test_bounded_refutes_strict_strengthening() -> None:
    result = BoundedBackend().check(PHI_POS, Constraint(app(Sym(GT), X, int_value(1))))
    assert result.verdict is Verdict.INVALID
    assert result.witness == {"x": Value(INT, 1)}


def test_bounded_unknown_without_finite_domains() -> None:
    result = BoundedBackend().check(PHI_POS, PSI_NONNEG)
    assert result.verdict is Verdict.UNKNOWN
    assert "refutation" in result.reason


def test_bounded_complete_with_configured_domains() -> None:
    domain = [Value(INT, n) for n in range(-3, 4)]
    backend = BoundedBackend(finite_domains={INT: domain})
    result = backend.check(PHI_POS, PSI_NONNEG)
    assert result.verdict is Verdict.VALID


def test_bounded_bool_domain_is_exhaustive() -> None:
    phi = Constraint(B)
    result = BoundedBackend().check(phi, phi)
    assert result.verdict is Verdict.VALID


# ------------- SMT-LIB2 printing -------------


def test_script_shape() -> None:
    script = entailment_script(PHI_POS, PSI_NONNEG)
    assert "(set-logic QF_LIA)" in script
    assert "(declare-const x Int)" in script
    assert "(assert (> x 0))" in script
    assert "(assert (not (>= x 0)))" in script
    assert script.rstrip().endswith("(check-sat)")


def test_nonlinear_products_pick_nia() -> None:
    phi = Constraint(app(Sym(GT), app(Sym(TIMES), X, Y), int_value(0)))
    assert "(set-logic QF_NIA)" in entailment_script(phi, PSI_NONNEG)
    linear = Constraint(app(Sym(GT), app(Sym(TIMES), X, int_value(2)), int_value(0)))
    assert "(set-logic QF_LIA)" in entailment_script(linear, PSI_NONNEG)


def test_rendering_of_operators() -> None:
    assert term_to_smt(app(Sym(NEG), X)) == "(- x)"
    assert term_to_smt(app(Sym(NE), X, Y)) == "(distinct x y)"
    assert term_to_smt(int_value(-4)) == "(- 4)"
    assert term_to_smt(app(Sym(AND), B, B)) == "(and p p)"


# ------------- bundled shim -------------


def test_shim_unsat_on_valid_entailment() -> None:
    assert shim(entailment_script(PHI_POS, PSI_NONNEG)) == "unsat"


def test_shim_sat_on_refutable_entailment() -> None:
    phi = TRUE_CONSTRAINT
    psi = Constraint(app(Sym(GT), X, X))
    assert shim(entailment_script(phi, psi)) == "sat"


def test_shim_handles_disjunction_and_negation() -> None:
    script = """
    (set-logic QF_LIA)
    (declare-const a Int)
    (assert (or (< a 0) (> a 10)))
    (assert (>= a 0))
    (assert (<= a 10))
    (check-sat)
    """
    assert shim(script) == "unsat"


def test_shim_equalities() -> None:
    script = """
    (declare-const a Int)
    (declare-const b Int)
    (assert (= (+ a 1) b))
    (assert (= b a))
    (check-sat)
    """
    assert shim(script) == "unsat"


def test_shim_finds_models_for_small_systems() -> None:
    script = """
    (declare-const a Int)
    (declare-const b Int)
    (assert (> a 3))
    (assert (< b a))
    (check-sat)
    """
    assert shim(script) == "sat"


def test_shim_nonlinear_falls_back_to_search() -> None:
    sat = """
    (declare-const a Int)
    (assert (= (* a a) 9))
    (check-sat)
    """
    assert shim(sat) == "sat"
    hard = """
    (declare-const a Int)
    (declare-const b Int)
    (assert (> (* a b) 1000000))
    (check-sat)
    """
    assert shim(hard) == "unknown"  # outside the bounded search radius


def test_shim_bool_reasoning() -> None:
    script = """
    (declare-const p Bool)
    (assert p)
    (assert (not p))
    (check-sat)
    """
    assert shim(script) == "unsat"


def test_shim_runs_as_subprocess() -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "horpo.smt_shim"],
        input=entailment_script(PHI_POS, PSI_NONNEG),
        capture_output=True, text=True, timeout=60)
    assert proc.stdout.strip() == "unsat"


# ------------- external backend plumbing -------------


def test_smt_backend_reports_missing_binary() -> None:
    backend = SmtBackend(command=["no-such-solver-binary"], timeout_ms=1000)
    result = backend.check(PHI_POS, PSI_NONNEG)
    assert result.verdict is Verdict.UNKNOWN
    assert "unavailable" in result.reason


def test_smt_backend_reports_garbage_reply(tmp_path) -> None:
    fake = tmp_path / "fake-solver.sh"
    fake.write_text("#!/bin/sh\necho flurble\n")
    fake.chmod(fake.stat().st_mode | stat.S_IEXEC)
    result = SmtBackend(command=[str(fake)], timeout_ms=2000).check(
        PHI_POS, PSI_NONNEG)
    assert result.verdict is Verdict.UNKNOWN
    assert "unparseable" in result.reason


def test_smt_command_env_override(tmp_path, monkeypatch) -> None:
    fake = tmp_path / "always-unsat.sh"
    fake.write_text("#!/bin/sh\ncat > /dev/null\necho unsat\n")
    fake.chmod(fake.stat().st_mode | stat.S_IEXEC)
    monkeypatch.setenv("HORPO_SMT_CMD", str(fake))
    backend = SmtBackend()
    assert backend.command == [str(fake)]
    result = backend.check(PHI_POS, Constraint(app(Sym(LT), X, int_value(0))))
    assert result.verdict is Verdict.VALID  # trusts the configured solver


def test_smt_timeout_env(monkeypatch) -> None:
    monkeypatch.setenv("HORPO_SMT_TIMEOUT_MS", "1234")
    assert SmtBackend().timeout_ms == 1234
    monkeypatch.setenv("HORPO_SMT_TIMEOUT_MS", "not-a-number")
    assert SmtBackend().timeout_ms == 5000


def test_smt_timeout_maps_to_unknown(tmp_path) -> None:
    slow = tmp_path / "slow-solver.sh"
    slow.write_text("#!/bin/sh\nsleep 30\n")
    slow.chmod(slow.stat().st_mode | stat.S_IEXEC)
    result = SmtBackend(command=[str(slow)], timeout_ms=200).check(
        PHI_POS, PSI_NONNEG)
    assert result.verdict is Verdict.UNKNOWN
    assert "timeout" in result.reason


# ------------- combined checker -------------


def test_auto_mode_resolves_validity(checker) -> None:
    assert checker.entails(PHI_POS, PSI_NONNEG).verdict is Verdict.VALID


def test_auto_mode_prefers_bounded_witnesses(checker) -> None:
    result = checker.entails(PHI_POS, Constraint(app(Sym(GT), X, int_value(1))))
    assert result.verdict is Verdict.INVALID
    assert result.backend == "bounded"


def test_off_mode_never_claims_validity() -> None:
    off = EntailmentChecker(mode="off")
    assert off.entails(PHI_POS, PSI_NONNEG).verdict is Verdict.UNKNOWN


def test_cache_counts_hits(checker) -> None:
    before = checker.stats.cache_hits
    checker.entails(PHI_POS, PSI_NONNEG)
    checker.entails(PHI_POS, PSI_NONNEG)
    assert checker.stats.cache_hits > before


def test_backend_agreement_never_valid_when_bounded_refutes() -> None:
    # sweep a small family of entailments through both backends
    auto = EntailmentChecker(mode="auto")
    bounded = BoundedBackend()
    candidates = []
    for c in (-2, 0, 1, 3):
        for op_l in (GT, GE, LT):
            candidates.append(Constraint(app(Sym(op_l), X, int_value(c))))
    for phi in candidates:
        for psi in candidates:
            combined = auto.entails(phi, psi)
            refuted = bounded.check(phi, psi)
            if refuted.verdict is Verdict.INVALID:
                assert combined.verdict is not Verdict.VALID
