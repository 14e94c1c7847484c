"""The orientation service: check, orient, explain, and selftest endpoints.

The handler functions (``run_check`` etc.) are plain functions over the
pydantic models, shared verbatim by the HTTP endpoints and the command-line
client, which calls them in process unless pointed at a remote server.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..constrained import ConstrainedDerivation, evaluate_judgment
from ..core import HorpoParams, PrecedenceError
from ..entail import EntailmentChecker
from ..oracle import (
    benchmark_param_sets,
    benchmark_signature,
    build_graph,
    check_lemmas,
    engine_agreement,
)
from ..problems import (
    ErrorCode,
    ProblemError,
    ProblemFile,
    merge_params,
    params_spec_to_lines,
    params_to_spec,
    parse_params_text,
    parse_problem,
    pretty_term,
    resolve_params,
    rule_to_text,
)
from ..synth import OrientationStatus, orient, validate
from .models import (
    CheckRequest,
    CheckResponse,
    DerivationModel,
    EngineOptions,
    ErrorModel,
    ExplainRequest,
    ExplainResponse,
    HealthResponse,
    LemmaLine,
    OrientRequest,
    OrientResponse,
    ParamsModel,
    RuleReport,
    SelftestRequest,
    SelftestResponse,
    StatsModel,
)


def _checker(options: EngineOptions) -> EntailmentChecker:
    return EntailmentChecker(mode=options.smt, bound=options.bound)


def derivation_model(d: ConstrainedDerivation) -> DerivationModel:
    return DerivationModel(
        rule=d.rule,
        slug=d.slug,
        left=pretty_term(d.left),
        right=pretty_term(d.right),
        index=d.index,
        entailment=str(d.certificate) if d.certificate else None,
        premises=[derivation_model(p) for p in d.premises],
    )


def params_model(params: HorpoParams, symbols) -> ParamsModel:
    spec = params_to_spec(params, symbols)
    chains = [line.removeprefix("precedence: ")
              for line in params_spec_to_lines(spec) if line.startswith("precedence:")]
    return ParamsModel(
        precedence=chains,
        filters={name: sorted(positions)
                 for name, positions in spec.filters.items()},
    )


def _load_problem(text: str) -> ProblemFile:
    return parse_problem(text)


def _resolve_request_params(pf: ProblemFile, sidecar_text):
    sidecar = parse_params_text(sidecar_text) if sidecar_text else None
    spec, warnings = merge_params(pf.params, sidecar)
    if spec is None or spec.empty:
        return None, warnings
    return resolve_params(spec, pf.signature), warnings


def run_check(request: CheckRequest) -> CheckResponse:
    pf = _load_problem(request.problem)
    params, warnings = _resolve_request_params(pf, request.params)
    if params is None:
        raise ProblemError(
            ErrorCode.SYNTAX,
            "check needs parameters: add a params block or a sidecar file")
    problem = pf.orientation_problem()
    try:
        report = validate(problem, params, mode=request.options.mode,
                          entailment=_checker(request.options))
    except PrecedenceError as exc:
        raise ProblemError(ErrorCode.SORT, str(exc))
    rules = [
        RuleReport(
            index=c.index,
            rule=rule_to_text(c.rule),
            demand=c.rule.demand,
            ok=c.ok,
            clause=c.derivation.rule if c.derivation else None,
            clause_slug=c.derivation.slug if c.derivation else None,
            reason=c.reason or None,
        )
        for c in report.checks
    ]
    return CheckResponse(ok=report.ok, rules=rules, warnings=warnings)


def run_orient(request: OrientRequest) -> OrientResponse:
    pf = _load_problem(request.problem)
    problem = pf.orientation_problem()
    options = request.options
    outcome = orient(
        problem,
        budget_nodes=options.budget_nodes,
        budget_ms=options.budget_ms,
        seed=options.seed,
        mode=options.mode,
        entailment=_checker(options),
        filters=options.filters,
    )
    stats = StatsModel(
        candidates=outcome.stats.candidates,
        nodes=outcome.stats.nodes,
        entailment_calls=outcome.stats.entailment_calls,
        entailment_cache_hits=outcome.stats.entailment_cache_hits,
        elapsed_ms=outcome.stats.elapsed_ms,
    )
    if outcome.status is not OrientationStatus.ORIENTED:
        return OrientResponse(status=outcome.status.value, stats=stats)
    solution = outcome.solution
    rules = [
        RuleReport(
            index=i,
            rule=rule_to_text(rule),
            demand=rule.demand,
            ok=True,
            clause=d.rule,
            clause_slug=d.slug,
        )
        for i, (rule, d) in enumerate(
            zip(problem.rules, solution.derivations), start=1)
    ]
    return OrientResponse(
        status="oriented",
        params=params_model(solution.params, problem.occurring_symbols()),
        rules=rules,
        stats=stats,
    )


def run_explain(request: ExplainRequest) -> ExplainResponse:
    pf = _load_problem(request.problem)
    problem = pf.orientation_problem()
    if not 1 <= request.rule <= len(problem.rules):
        raise ProblemError(
            ErrorCode.SYNTAX,
            f"rule index {request.rule} out of range 1..{len(problem.rules)}")
    params, _ = _resolve_request_params(pf, request.params)
    options = request.options
    checker = _checker(options)
    if params is None:
        outcome = orient(
            problem, budget_nodes=options.budget_nodes, budget_ms=options.budget_ms,
            seed=options.seed, mode=options.mode, entailment=checker,
            filters=options.filters)
        if not outcome.oriented:
            return ExplainResponse(
                rule=rule_to_text(problem.rules[request.rule - 1]),
                demand=problem.rules[request.rule - 1].demand,
                ok=False,
                reason=f"no parameters found ({outcome.status.value})")
        params = outcome.solution.params
    rule = problem.rules[request.rule - 1]
    judged = evaluate_judgment(
        rule.judgment(), params, problem.value_order, checker, options.mode)
    return ExplainResponse(
        rule=rule_to_text(rule),
        demand=rule.demand,
        ok=judged.derivation is not None,
        derivation=derivation_model(judged.derivation) if judged.derivation else None,
        reason="; ".join(judged.notes) or None if judged.derivation is None else None,
        params=params_model(params, problem.occurring_symbols()),
    )


def run_selftest(request: SelftestRequest) -> SelftestResponse:
    signature, pool = benchmark_signature()
    lemmas: list[LemmaLine] = []
    agreement_pairs = 0
    mismatches: list[str] = []
    universe_terms = 0
    for set_name, params in benchmark_param_sets(signature):
        graph = build_graph(signature, request.universe_size, params,
                            mode=request.mode, variables=pool)
        universe_terms = len(graph.universe)
        report = check_lemmas(graph, substitutions=request.substitutions,
                              seed=request.seed)
        lemmas.extend(
            LemmaLine(parameter_set=set_name, name=r.name, passed=r.passed,
                      checked=r.checked, counterexample=r.counterexample)
            for r in report.results)
        pairs, bad = engine_agreement(graph)
        agreement_pairs += pairs
        mismatches.extend(bad[:5])
    return SelftestResponse(
        passed=all(l.passed for l in lemmas) and not mismatches,
        universe_terms=universe_terms,
        lemmas=lemmas,
        agreement_pairs=agreement_pairs,
        agreement_ok=not mismatches,
        mismatches=mismatches,
    )


# ---------- FastAPI wiring ----------

app = FastAPI(
    title="horpo",
    version=__version__,
    description="Termination-ordering service for constrained rewrite systems",
)


def _http(exc: ProblemError) -> HTTPException:
    detail = ErrorModel(code=exc.code.value, message=exc.message,
                        line=exc.line, col=exc.col).model_dump()
    return HTTPException(status_code=400, detail=detail)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/check", response_model=CheckResponse)
def check_endpoint(request: CheckRequest) -> CheckResponse:
    try:
        return run_check(request)
    except ProblemError as exc:
        raise _http(exc)


@app.post("/orient", response_model=OrientResponse)
def orient_endpoint(request: OrientRequest) -> OrientResponse:
    try:
        return run_orient(request)
    except ProblemError as exc:
        raise _http(exc)


@app.post("/explain", response_model=ExplainResponse)
def explain_endpoint(request: ExplainRequest) -> ExplainResponse:
    try:
        return run_explain(request)
    except ProblemError as exc:
        raise _http(exc)


@app.post("/selftest", response_model=SelftestResponse)
def selftest_endpoint(request: SelftestRequest) -> SelftestResponse:
    return run_selftest(request)
