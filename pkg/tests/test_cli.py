from __future__ import annotations

import subprocess
import sys

import pytest

from horpo.cli import main
from horpo.fixtures import fixture_path, fixture_text


def run_cli(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def test_orient_exit_zero_and_summary(capsys) -> None:
    code, out = run_cli(capsys, "orient", fixture_path("sum.lcstrs"))
    assert code == 0
    assert "status: oriented" in out
    assert "precedence: sum > +" in out


def test_orient_definitive_failure_exit_one(capsys, tmp_path) -> None:
    bad = tmp_path / "self.lcstrs"
    bad.write_text("sort u\na : u\na -> a {strict}\n")
    code, out = run_cli(capsys, "orient", str(bad))
    assert code == 1
    assert "space-exhausted" in out


def test_orient_budget_exit_three(capsys) -> None:
    code, out = run_cli(capsys, "orient", fixture_path("sum.lcstrs"),
                        "--budget-nodes", "1")
    assert code == 3
    assert "budget-exhausted" in out


def test_orient_records_are_stable(capsys) -> None:
    code1, out1 = run_cli(capsys, "orient", fixture_path("sum.lcstrs"),
                          "--format", "records", "--seed", "0")
    code2, out2 = run_cli(capsys, "orient", fixture_path("sum.lcstrs"),
                          "--format", "records", "--seed", "0")
    assert code1 == code2 == 0
    assert out1 == out2  # byte-identical
    assert "status=oriented" in out1
    assert all("=" in line for line in out1.strip().splitlines())


def test_check_good_and_bad_params(capsys) -> None:
    code, out = run_cli(capsys, "check", fixture_path("sum.lcstrs"),
                        "--params", fixture_path("sum.params"))
    assert code == 0 and "all rules oriented" in out
    code, out = run_cli(capsys, "check", fixture_path("sum.lcstrs"),
                        "--params", fixture_path("empty.params"))
    assert code == 1
    assert "rule 2" in out and "FAIL" in out


def test_check_input_error_exit_two(capsys) -> None:
    code, _ = run_cli(capsys, "check", fixture_path("sum.lcstrs"))
    assert code == 2  # no params given


def test_missing_file_exit_two(capsys) -> None:
    code, _ = run_cli(capsys, "orient", "no-such-file.lcstrs")
    assert code == 2


def test_parse_error_exit_two(capsys, tmp_path) -> None:
    broken = tmp_path / "broken.lcstrs"
    broken.write_text("a : Widget\n")
    code, _ = run_cli(capsys, "orient", str(broken))
    assert code == 2


def test_explain_prints_tree(capsys) -> None:
    code, out = run_cli(capsys, "explain", fixture_path("sum.lcstrs"),
                        "--rule", "2")
    assert code == 0
    assert "≻≻Copy" in out and "≻≻Lex" in out and "≻Theory" in out


def test_explain_records_flatten_nodes(capsys) -> None:
    code, out = run_cli(capsys, "explain", fixture_path("sum.lcstrs"),
                        "--rule", "2", "--format", "records")
    assert code == 0
    assert "node.1.clause=gt-rpo" in out


def test_selftest_passes_small(capsys) -> None:
    code, out = run_cli(capsys, "selftest", "--universe-size", "3",
                        "--substitutions", "3")
    assert code == 0
    assert "selftest passed" in out


def test_selftest_records(capsys) -> None:
    code, out = run_cli(capsys, "selftest", "--universe-size", "3",
                        "--substitutions", "3", "--format", "records")
    assert code == 0
    assert "lemma.full-filters.gt-acyclic=pass" in out


def test_console_script_entry_point() -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "horpo.cli", "orient", fixture_path("sum.lcstrs"),
         "--format", "records"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "status=oriented" in proc.stdout


def test_filtered_fixture_full_vs_search(capsys) -> None:
    code_full, _ = run_cli(capsys, "orient", fixture_path("filtered.lcstrs"),
                           "--filters", "full")
    assert code_full == 1
    code_search, out = run_cli(capsys, "orient", fixture_path("filtered.lcstrs"))
    assert code_search == 0
    assert "pi(wrap) = {}" in out
