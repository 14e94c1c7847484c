"""Command-line client for the orientation service.

Subcommands: check, orient, explain, selftest, serve.  By default the
service handlers run in process; ``--server URL`` (or HORPO_SERVER) sends
the same request to a running instance instead.  The client only builds
requests and renders responses.

Exit codes: 0 success, 1 orientation failure, 2 input error, 3 budget
exhausted, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional

from .problems import ProblemError
from .service.models import (
    CheckRequest,
    CheckResponse,
    DerivationModel,
    EngineOptions,
    ExplainRequest,
    ExplainResponse,
    OrientRequest,
    OrientResponse,
    SelftestRequest,
    SelftestResponse,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horpo",
        description="Termination ordering engine for constrained rewrite systems")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_budget: bool = True) -> None:
        p.add_argument("--mode", choices=["sound", "paper"], default="sound",
                       help="fidelity mode of the path clauses")
        p.add_argument("--smt", choices=["off", "auto", "always"], default="auto",
                       help="entailment backend selection")
        p.add_argument("--bound", type=int, default=16,
                       help="range for the bounded entailment backend")
        if with_budget:
            p.add_argument("--budget-nodes", type=int, default=100_000)
            p.add_argument("--budget-ms", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=["text", "records"], default="text")
        p.add_argument("--server", default=os.environ.get("HORPO_SERVER"),
                       help="send the request to a running service instead")

    p_check = sub.add_parser("check", help="validate rules under given parameters")
    p_check.add_argument("problem", help="problem file")
    p_check.add_argument("--params", help="sidecar params file")
    common(p_check)

    p_orient = sub.add_parser("orient", help="search for orienting parameters")
    p_orient.add_argument("problem")
    p_orient.add_argument("--filters", choices=["search", "full"], default="search",
                          help="whether to search argument filters")
    common(p_orient)

    p_explain = sub.add_parser("explain", help="print the derivation of one rule")
    p_explain.add_argument("problem")
    p_explain.add_argument("--rule", type=int, default=1, help="1-based rule index")
    p_explain.add_argument("--params", help="sidecar params file")
    p_explain.add_argument("--filters", choices=["search", "full"], default="search")
    common(p_explain)

    p_self = sub.add_parser("selftest", help="run the oracle property suites")
    p_self.add_argument("--universe-size", type=int, default=4)
    p_self.add_argument("--substitutions", type=int, default=25)
    common(p_self, with_budget=False)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _options(args: argparse.Namespace) -> EngineOptions:
    return EngineOptions(
        mode=args.mode,
        smt=args.smt,
        bound=args.bound,
        budget_nodes=getattr(args, "budget_nodes", 100_000),
        budget_ms=getattr(args, "budget_ms", 10_000),
        seed=args.seed,
        filters=getattr(args, "filters", "search"),
    )


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _post(server: str, endpoint: str, payload, response_model):
    import httpx

    try:
        reply = httpx.post(f"{server.rstrip('/')}/{endpoint}",
                           json=payload.model_dump(), timeout=600.0)
    except httpx.HTTPError as exc:
        print(f"input error: cannot reach server: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    if reply.status_code == 400:
        detail = reply.json().get("detail", {})
        print(f"{detail.get('code', 'input')} error at "
              f"{detail.get('line', 0)}:{detail.get('col', 0)}: "
              f"{detail.get('message', reply.text)}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    reply.raise_for_status()
    return response_model.model_validate(reply.json())


def _dispatch(args, endpoint: str, payload, response_model, runner):
    if args.server:
        return _post(args.server, endpoint, payload, response_model)
    try:
        return runner(payload)
    except ProblemError as exc:
        print(exc, file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


# ---------- rendering ----------


def _records(pairs) -> str:
    return "\n".join(f"{key}={value}" for key, value in pairs)


def _compact(text: str) -> str:
    return text.replace(" ", "")


def render_check(resp: CheckResponse, fmt: str) -> str:
    if fmt == "records":
        pairs = [("command", "check"), ("ok", str(resp.ok).lower())]
        for rule in resp.rules:
            prefix = f"rule.{rule.index}"
            pairs.append((f"{prefix}.demand", rule.demand))
            pairs.append((f"{prefix}.status", "ok" if rule.ok else "failed"))
            if rule.clause_slug:
                pairs.append((f"{prefix}.clause", rule.clause_slug))
            if rule.reason:
                pairs.append((f"{prefix}.reason", rule.reason))
        return _records(pairs)
    lines = []
    for rule in resp.rules:
        mark = "ok " if rule.ok else "FAIL"
        detail = rule.clause if rule.ok else (rule.reason or "no clause applies")
        lines.append(f"rule {rule.index} [{rule.demand}] {mark} {detail}: {rule.rule}")
    lines.append("all rules oriented" if resp.ok else "some rules failed")
    return "\n".join(lines)


def _params_pairs(params) -> list[tuple[str, str]]:
    pairs = []
    for i, chain in enumerate(params.precedence, start=1):
        pairs.append((f"precedence.{i}", _compact(chain)))
    for name, positions in sorted(params.filters.items()):
        pairs.append((f"pi.{name}", ",".join(str(p) for p in positions)))
    return pairs


def render_orient(resp: OrientResponse, fmt: str) -> str:
    if fmt == "records":
        pairs = [("command", "orient"), ("status", resp.status),
                 ("candidates", resp.stats.candidates),
                 ("nodes", resp.stats.nodes),
                 ("entailment-calls", resp.stats.entailment_calls)]
        if resp.params:
            pairs.extend(_params_pairs(resp.params))
        for rule in resp.rules:
            pairs.append((f"rule.{rule.index}.clause", rule.clause_slug))
        return _records(pairs)
    lines = [f"status: {resp.status}"]
    if resp.params:
        for chain in resp.params.precedence:
            lines.append(f"precedence: {chain}")
        for name, positions in sorted(resp.params.filters.items()):
            inner = ", ".join(str(p) for p in positions)
            lines.append(f"pi({name}) = {{{inner}}}")
    for rule in resp.rules:
        lines.append(f"rule {rule.index} [{rule.demand}] via {rule.clause}: {rule.rule}")
    lines.append(
        f"explored {resp.stats.candidates} candidates, {resp.stats.nodes} rule checks, "
        f"{resp.stats.entailment_calls} entailment calls")
    return "\n".join(lines)


def _derivation_lines(node: DerivationModel, depth: int, out: list[str]) -> None:
    pos = f" at {node.index}" if node.index is not None else ""
    cert = f"   -- {node.entailment}" if node.entailment else ""
    out.append(f"{'  ' * depth}[{node.rule}{pos}] {node.left}  vs  {node.right}{cert}")
    for p in node.premises:
        _derivation_lines(p, depth + 1, out)


def render_explain(resp: ExplainResponse, fmt: str) -> str:
    if fmt == "records":
        pairs = [("command", "explain"), ("ok", str(resp.ok).lower()),
                 ("rule", _compact(resp.rule))]
        if resp.derivation:
            flat: list[tuple[int, DerivationModel]] = []

            def walk(node: DerivationModel, depth: int) -> None:
                flat.append((depth, node))
                for p in node.premises:
                    walk(p, depth + 1)

            walk(resp.derivation, 0)
            for i, (depth, node) in enumerate(flat, start=1):
                pairs.append((f"node.{i}.depth", depth))
                pairs.append((f"node.{i}.clause", node.slug))
                pairs.append((f"node.{i}.left", _compact(node.left)))
                pairs.append((f"node.{i}.right", _compact(node.right)))
        elif resp.reason:
            pairs.append(("reason", resp.reason))
        return _records(pairs)
    lines = [f"rule [{resp.demand}]: {resp.rule}"]
    if resp.params:
        for chain in resp.params.precedence:
            lines.append(f"precedence: {chain}")
        for name, positions in sorted(resp.params.filters.items()):
            lines.append(f"pi({name}) = {{{', '.join(map(str, positions))}}}")
    if resp.derivation:
        _derivation_lines(resp.derivation, 0, lines)
    else:
        lines.append(f"not derivable: {resp.reason or 'no clause applies'}")
    return "\n".join(lines)


def render_selftest(resp: SelftestResponse, fmt: str) -> str:
    if fmt == "records":
        pairs = [("command", "selftest"), ("passed", str(resp.passed).lower()),
                 ("universe-terms", resp.universe_terms),
                 ("agreement-pairs", resp.agreement_pairs),
                 ("agreement-ok", str(resp.agreement_ok).lower())]
        for lemma in resp.lemmas:
            key = f"lemma.{lemma.parameter_set}.{lemma.name}"
            pairs.append((key, "pass" if lemma.passed else "fail"))
        return _records(pairs)
    lines = [f"universe: {resp.universe_terms} terms"]
    current = None
    for lemma in resp.lemmas:
        if lemma.parameter_set != current:
            current = lemma.parameter_set
            lines.append(f"parameter set: {current}")
        status = "PASS" if lemma.passed else "FAIL"
        extra = f"  ({lemma.counterexample})" if lemma.counterexample else ""
        lines.append(f"  {status} {lemma.name} [{lemma.checked} checks]{extra}")
    lines.append(
        f"engine/oracle agreement: {'ok' if resp.agreement_ok else 'MISMATCH'} "
        f"on {resp.agreement_pairs} pairs")
    lines.append("selftest passed" if resp.passed else "selftest FAILED")
    return "\n".join(lines)


# ---------- entry point ----------


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - map to the documented exit code
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def _run(args: argparse.Namespace) -> int:
    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    from . import service

    if args.command == "check":
        request = CheckRequest(
            problem=_read(args.problem),
            params=_read(args.params) if args.params else None,
            options=_options(args))
        resp = _dispatch(args, "check", request, CheckResponse, service.run_check)
        for warning in resp.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        print(render_check(resp, args.format))
        return EXIT_OK if resp.ok else EXIT_FAILED

    if args.command == "orient":
        request = OrientRequest(problem=_read(args.problem), options=_options(args))
        resp = _dispatch(args, "orient", request, OrientResponse, service.run_orient)
        print(render_orient(resp, args.format))
        if resp.status == "oriented":
            return EXIT_OK
        return EXIT_BUDGET if resp.status == "budget-exhausted" else EXIT_FAILED

    if args.command == "explain":
        request = ExplainRequest(
            problem=_read(args.problem),
            params=_read(args.params) if args.params else None,
            rule=args.rule,
            options=_options(args))
        resp = _dispatch(args, "explain", request, ExplainResponse, service.run_explain)
        print(render_explain(resp, args.format))
        return EXIT_OK if resp.ok else EXIT_FAILED

    if args.command == "selftest":
        request = SelftestRequest(
            universe_size=args.universe_size,
            substitutions=args.substitutions,
            seed=args.seed,
            mode=args.mode)
        resp = _dispatch(args, "selftest", request, SelftestResponse,
                         service.run_selftest)
        print(render_selftest(resp, args.format))
        return EXIT_OK if resp.passed else EXIT_INTERNAL

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
