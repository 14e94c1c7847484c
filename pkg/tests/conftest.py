from __future__ import annotations

import pytest

from horpo.entail import EntailmentChecker
from horpo.fixtures import fixture_text
from horpo.oracle import benchmark_param_sets, benchmark_signature
from horpo.problems import parse_problem


@pytest.fixture(scope="session")
def checker() -> EntailmentChecker:
    """One shared entailment session: the cache keeps solver spawns low."""
    return EntailmentChecker(mode="auto")


@pytest.fixture(scope="session")
def bench():
    return benchmark_signature()


@pytest.fixture(scope="session")
def bench_params(bench):
    signature, _ = bench
    return dict(benchmark_param_sets(signature))


@pytest.fixture(scope="session")
def sum_problem():
    return parse_problem(fixture_text("sum.lcstrs"))


@pytest.fixture(scope="session")
def factorial_problem():
    return parse_problem(fixture_text("factorial.lcstrs"))
