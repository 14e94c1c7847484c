"""Independent naive transcription of the ordering rules, plus lemma suites.

This module re-states every clause of the unconstrained relations as plain,
unmemoized recursive predicates, shares nothing with the optimized engine
except the term representation (the duplication is deliberate), and builds
complete relation graphs over small enumerated term universes.  The graphs
drive the structural-property suites: equivalence axioms, compatibility,
composition into the transitive closure, application monotonicity, and
acyclicity of the strict relation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import networkx as nx

from .core import ArgumentFilter, HorpoEngine, HorpoParams, MODES, Precedence
from .terms import (
    App,
    Arrow,
    Base,
    FunctionSymbol,
    Signature,
    Sort,
    Substitution,
    Sym,
    Term,
    Var,
    arrow,
    collapse,
    default_variable_pool,
    enumerate_terms,
)

UNIVERSE_CAP = 5000


# ---------- Naive rule transcription ----------


def _regarded(params: HorpoParams, f, n: int) -> list[int]:
    return sorted(i for i in params.filter.regarded(f) if 1 <= i <= n)


def naive_approx(s: Term, t: Term, params: HorpoParams) -> bool:
    if s.structure != t.structure:
        return False
    s_head, s_args = s.spine
    t_head, t_args = t.spine
    if isinstance(s_head, Var):
        return (
            s_head == t_head
            and len(s_args) == len(t_args)
            and all(naive_approx(a, b, params) for a, b in zip(s_args, t_args))
        )
    if isinstance(s_head, Sym) and isinstance(t_head, Sym):
        f, g = s_head.symbol, t_head.symbol
        return (
            collapse(f.type) == collapse(g.type)
            and params.precedence.equiv(f, g)
            and params.filter.regarded(f) == params.filter.regarded(g)
            and len(s_args) == len(t_args)
            and all(
                naive_approx(s_args[i - 1], t_args[i - 1], params)
                for i in _regarded(params, f, len(s_args))
            )
        )
    return False


def naive_geq(s: Term, t: Term, params: HorpoParams, mode: str = "sound") -> bool:
    return naive_approx(s, t, params) or naive_gt(s, t, params, mode)


def naive_gt(s: Term, t: Term, params: HorpoParams, mode: str = "sound") -> bool:
    if s.structure != t.structure:
        return False
    s_head, s_args = s.spine
    t_head, t_args = t.spine
    if (
        isinstance(s_head, Var)
        and s_head == t_head
        and len(s_args) == len(t_args)
        and all(naive_geq(a, b, params, mode) for a, b in zip(s_args, t_args))
        and any(naive_gt(a, b, params, mode) for a, b in zip(s_args, t_args))
    ):
        return True
    if isinstance(s_head, Sym) and isinstance(t_head, Sym):
        f, g = s_head.symbol, t_head.symbol
        if (
            collapse(f.type) == collapse(g.type)
            and params.precedence.equiv(f, g)
            and params.filter.regarded(f) == params.filter.regarded(g)
            and len(s_args) == len(t_args)
        ):
            idx = _regarded(params, f, len(s_args))
            if all(
                naive_geq(s_args[i - 1], t_args[i - 1], params, mode) for i in idx
            ) and any(
                naive_gt(s_args[i - 1], t_args[i - 1], params, mode) for i in idx
            ):
                return True
    return naive_rpo(s, t, params, mode)


def naive_rpo(s: Term, t: Term, params: HorpoParams, mode: str = "sound") -> bool:
    s_head, s_args = s.spine
    if not isinstance(s_head, Sym):
        return False
    f = s_head.symbol
    n = len(s_args)
    if any(i not in params.filter.regarded(f) for i in range(n + 1, f.max_arity + 1)):
        return False
    if any(
        naive_geq(s_args[i - 1], t, params, mode) for i in _regarded(params, f, n)
    ):
        return True
    t_head, t_args = t.spine
    m = len(t_args)
    if isinstance(t_head, Sym):
        g = t_head.symbol
        if params.precedence.gt(f, g) and all(
            naive_rpo(s, t_args[j - 1], params, mode) for j in _regarded(params, g, m)
        ):
            return True
        if params.precedence.equiv(f, g):
            pi_f = params.filter.regarded(f)
            pi_g = params.filter.regarded(g)
            for i in sorted(pi_f & pi_g):
                if i > min(n, m):
                    break
                upto = set(range(1, i + 1))
                if pi_f & upto != pi_g & upto:
                    continue
                if (
                    all(
                        naive_approx(s_args[j - 1], t_args[j - 1], params)
                        for j in range(1, i) if j in pi_f
                    )
                    and naive_gt(s_args[i - 1], t_args[i - 1], params, mode)
                    and all(
                        naive_rpo(s, t_args[j - 1], params, mode)
                        for j in range(i + 1, m + 1) if j in pi_g
                    )
                ):
                    return True
    if isinstance(t, App):
        pieces = list(t_args) if mode == "paper" else [t_head] + list(t_args)
        if all(naive_rpo(s, piece, params, mode) for piece in pieces):
            return True
    return False


_RELATIONS: dict[str, Callable[..., bool]] = {
    "approx": lambda s, t, p, m: naive_approx(s, t, p),
    "geq": naive_geq,
    "gt": naive_gt,
    "rpo": naive_rpo,
}


def naive_relate(s: Term, t: Term, relation: str, params: HorpoParams,
                 mode: str = "sound") -> bool:
    """Literal, unmemoized evaluation of one relation; the test oracle."""
    if relation not in _RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    if mode not in MODES:
        raise ValueError(f"unknown fidelity mode {mode!r}")
    return _RELATIONS[relation](s, t, params, mode)


# ---------- Relation graphs ----------


@dataclass
class RelationGraph:
    universe: tuple[Term, ...]
    variables: tuple[Var, ...]
    params: HorpoParams
    mode: str
    approx_edges: frozenset[tuple[int, int]]
    geq_edges: frozenset[tuple[int, int]]
    gt_edges: frozenset[tuple[int, int]]

    def index(self, term: Term) -> int:
        return self.universe.index(term)


def build_graph(
    signature: Signature,
    max_size: int,
    params: HorpoParams,
    mode: str = "sound",
    variables: Optional[Sequence[Var]] = None,
    cap: int = UNIVERSE_CAP,
    types: Optional[Sequence] = None,
) -> RelationGraph:
    """Enumerate the term universe and compute complete naive edge sets.

    Validates the parameters first: a broken precedence is reported before
    any lemma checking can run.
    """
    params.validate(list(signature))
    pool = tuple(variables) if variables is not None else default_variable_pool(signature)
    wanted = list(types) if types is not None else _distinct_types(signature, pool)
    universe: list[Term] = []
    for t in wanted:
        universe.extend(enumerate_terms(signature, max_size, t, variables=pool))
    if len(universe) > cap:
        raise ValueError(f"universe of {len(universe)} terms exceeds cap {cap}")

    by_structure: dict[object, list[int]] = {}
    for i, term in enumerate(universe):
        by_structure.setdefault(term.structure, []).append(i)

    approx_edges: set[tuple[int, int]] = set()
    gt_edges: set[tuple[int, int]] = set()
    for group in by_structure.values():
        for i in group:
            for j in group:
                if naive_approx(universe[i], universe[j], params):
                    approx_edges.add((i, j))
                if naive_gt(universe[i], universe[j], params, mode):
                    gt_edges.add((i, j))
    return RelationGraph(
        universe=tuple(universe),
        variables=pool,
        params=params,
        mode=mode,
        approx_edges=frozenset(approx_edges),
        geq_edges=frozenset(approx_edges | gt_edges),
        gt_edges=frozenset(gt_edges),
    )


def _distinct_types(signature: Signature, pool: Sequence[Var]) -> list:
    types = []
    for atom_type in [f.type for f in signature] + [v.type for v in pool]:
        if atom_type not in types:
            types.append(atom_type)
        while isinstance(atom_type, Arrow):
            atom_type = atom_type.codomain
            if atom_type not in types:
                types.append(atom_type)
    return types


# ---------- Lemma suite ----------


@dataclass
class LemmaResult:
    name: str
    passed: bool
    checked: int
    counterexample: Optional[str] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  counterexample: {self.counterexample}" if self.counterexample else ""
        return f"{status}  {self.name} ({self.checked} checks){extra}"


@dataclass
class LemmaReport:
    results: list[LemmaResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]


def check_lemmas(graph: RelationGraph, substitutions: int = 50,
                 seed: int = 0) -> LemmaReport:
    """Run every structural property over the graph's finite universe."""
    u = graph.universe
    params, mode = graph.params, graph.mode
    report = LemmaReport()

    def record(name: str, failures: list[str], checked: int) -> None:
        report.results.append(LemmaResult(
            name=name, passed=not failures, checked=checked,
            counterexample=failures[0] if failures else None))

    # equivalence: reflexive
    fails = [str(u[i]) for i in range(len(u)) if (i, i) not in graph.approx_edges]
    record("approx-reflexive", fails, len(u))

    # equivalence: symmetric
    fails = [f"{u[i]} ~~ {u[j]}" for i, j in graph.approx_edges
             if (j, i) not in graph.approx_edges]
    record("approx-symmetric", fails, len(graph.approx_edges))

    # compatibility on the left: approx composed with each relation
    succ: dict[str, dict[int, list[int]]] = {"approx": {}, "geq": {}, "gt": {}}
    for name, edges in (("approx", graph.approx_edges),
                        ("geq", graph.geq_edges), ("gt", graph.gt_edges)):
        for i, j in edges:
            succ[name].setdefault(i, []).append(j)
    for name, edges in (("approx", graph.approx_edges),
                        ("geq", graph.geq_edges), ("gt", graph.gt_edges)):
        fails = []
        checked = 0
        for i, j in graph.approx_edges:
            for k in succ[name].get(j, ()):
                checked += 1
                if (i, k) not in edges:
                    fails.append(f"{u[i]} ~~ {u[j]} R {u[k]}")
        label = "approx-transitive" if name == "approx" else f"compat-approx-{name}"
        record(label, fails, checked)

    # weak-then-strict composes into the transitive closure of strict
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(len(u)))
    digraph.add_edges_from(graph.gt_edges)
    reach = {i: nx.descendants(digraph, i) for i in digraph.nodes}
    fails = []
    checked = 0
    for i, j in graph.geq_edges:
        for k in succ["gt"].get(j, ()):
            checked += 1
            if k not in reach[i]:
                fails.append(f"{u[i]} >= {u[j]} > {u[k]}")
    record("geq-gt-in-gt-plus", fails, checked)

    # application monotonicity and left strictness
    record(*_application_lemma(
        graph, strict=False, name="geq-monotonic"))
    record(*_application_lemma(
        graph, strict=True, name="left-application-strict"))

    # stability of the equivalence under sampled substitutions
    rng = random.Random(seed)
    by_type: dict[object, list[Term]] = {}
    for term in u:
        by_type.setdefault(term.type, []).append(term)
    fails = []
    checked = 0
    for _ in range(substitutions):
        binding = {}
        for v in graph.variables:
            candidates = by_type.get(v.type, [v])
            binding[v] = rng.choice(candidates)
        gamma = Substitution(binding)
        for i, j in graph.approx_edges:
            checked += 1
            if not naive_approx(gamma.apply(u[i]), gamma.apply(u[j]), params):
                fails.append(f"{u[i]} ~~ {u[j]} under {gamma}")
        if fails:
            break
    record("approx-stable", fails, checked)

    # the strict relation admits no cycle on this universe
    try:
        cycle = nx.find_cycle(digraph)
        fails = [" > ".join(str(u[i]) for i, _ in cycle)]
    except nx.NetworkXNoCycle:
        fails = []
    record("gt-acyclic", fails, len(graph.gt_edges))
    return report


def _application_lemma(graph: RelationGraph, strict: bool, name: str):
    """Lemma shared shape: left pair related, right pair weakly related,
    then the applications are related (strictly when the left pair is)."""
    u = graph.universe
    params, mode = graph.params, graph.mode
    left_edges = graph.gt_edges if strict else graph.geq_edges
    fails: list[str] = []
    checked = 0
    weak_pairs = list(graph.geq_edges)
    for i, j in left_edges:
        s, t = u[i], u[j]
        if not isinstance(s.type, Arrow) or s.type != t.type:
            continue
        domain = s.type.domain
        for k, l in weak_pairs:
            v1, v2 = u[k], u[l]
            if v1.type != domain or v2.type != domain:
                continue
            checked += 1
            sa, ta = App(s, v1), App(t, v2)
            ok = (naive_gt(sa, ta, params, mode) if strict
                  else naive_geq(sa, ta, params, mode))
            if not ok:
                fails.append(f"({s}) ({v1}) vs ({t}) ({v2})")
                return name, fails, checked
    return name, fails, checked


# ---------- Benchmark universe ----------


def benchmark_signature() -> tuple[Signature, tuple[Var, ...]]:
    """The standard small signature the structural suites run on: a binary
    and a unary symbol over one sort, two constants, plus two variables each
    of the base and unary-arrow types."""
    base = Base(Sort("o"))
    f = FunctionSymbol("f", arrow(base, base, base))
    g = FunctionSymbol("g", arrow(base, base))
    a = FunctionSymbol("a", base)
    b = FunctionSymbol("b", base)
    signature = Signature([f, g, a, b])
    pool = (Var("x1", base), Var("x2", base),
            Var("F1", arrow(base, base)), Var("F2", arrow(base, base)))
    return signature, pool


def benchmark_param_sets(signature: Signature) -> list[tuple[str, HorpoParams]]:
    """Three parameter sets: full filters, one emptied filter, and a
    two-class precedence."""
    f, g, a, b = list(signature)
    stacked = Precedence.from_classes([[f], [g], [a, b]])
    return [
        ("full-filters", HorpoParams(stacked)),
        ("emptied-filter", HorpoParams(stacked, ArgumentFilter({g: frozenset()}))),
        ("two-class", HorpoParams(Precedence.from_classes([[f, g], [a, b]]))),
    ]


# ---------- Engine agreement ----------


def engine_agreement(graph: RelationGraph) -> tuple[int, list[str]]:
    """Compare the memoized engine against the naive edge sets on every pair
    of universe terms.  Returns (pairs checked, mismatches)."""
    u = graph.universe
    engine = HorpoEngine(graph.params, graph.mode)
    mismatches: list[str] = []
    checked = 0
    for i in range(len(u)):
        for j in range(len(u)):
            checked += 1
            pairs = (
                ("approx", (i, j) in graph.approx_edges,
                 engine.approx(u[i], u[j]) is not None),
                ("geq", (i, j) in graph.geq_edges,
                 engine.geq(u[i], u[j]) is not None),
                ("gt", (i, j) in graph.gt_edges,
                 engine.gt(u[i], u[j]) is not None),
            )
            for rel, naive_ans, engine_ans in pairs:
                if naive_ans != engine_ans:
                    mismatches.append(
                        f"{rel}({u[i]}, {u[j]}): naive={naive_ans} "
                        f"engine={engine_ans}")
    return checked, mismatches
