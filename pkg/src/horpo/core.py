"""The unconstrained ordering relations on curried simply-typed terms.

Four relations, parameterized by a precedence (quasi-order on function
symbols with well-founded strict part) and an argument filter (the regarded
argument positions of each symbol):

* ``approx``  -- the equivalence: same type structure, clauses Eq-mono/Eq-args;
* ``gt``      -- the strict decrease: clauses Gr-mono/Gr-args/Gr-rpo;
* ``geq``     -- approx or gt;
* ``rpo_gt``  -- the path-ordering workhorse behind Gr-rpo: clauses
  Rpo-select/Rpo-lex/Rpo-copy/Rpo-appl, applicable to a symbol-headed left
  side whose missing argument positions are all regarded.

Successful judgments return a Derivation tree naming the clause used at each
step; evaluation is deterministic (fixed clause order, smallest witness
index) and memoized per engine instance.

Fidelity modes: in mode ``sound`` the Rpo-appl clause additionally requires
the right side's head to be dominated, which the well-foundedness argument
needs; mode ``paper`` drops that head requirement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .terms import App, FunctionSymbol, Sym, Term, Var, collapse

EQ_MONO = "Eq-mono"
EQ_ARGS = "Eq-args"
GR_MONO = "Gr-mono"
GR_ARGS = "Gr-args"
GR_RPO = "Gr-rpo"
RPO_SELECT = "Rpo-select"
RPO_APPL = "Rpo-appl"
RPO_COPY = "Rpo-copy"
RPO_LEX = "Rpo-lex"

APPROX_RULES = frozenset({EQ_MONO, EQ_ARGS})
GT_RULES = frozenset({GR_MONO, GR_ARGS, GR_RPO})
RPO_RULES = frozenset({RPO_SELECT, RPO_APPL, RPO_COPY, RPO_LEX})

MODES = ("sound", "paper")


class PrecedenceError(ValueError):
    """A precedence or filter violating its invariants."""


class Cmp(Enum):
    GREATER = "greater"
    EQUIVALENT = "equivalent"
    SMALLER = "smaller"
    INCOMPARABLE = "incomparable"


class Precedence:
    """A quasi-order on function symbols, stored as its weak-order closure.

    Symbols never mentioned compare as incomparable (but every symbol is
    equivalent to itself).  The strict part of any transitively closed
    quasi-order is acyclic, which ``validate`` re-checks explicitly together
    with reflexivity/transitivity, guarding against hand-built subclasses.
    """

    def __init__(self, symbols: Sequence[FunctionSymbol],
                 geq: Mapping[FunctionSymbol, frozenset[FunctionSymbol]]):
        self._symbols = tuple(symbols)
        self._geq = dict(geq)

    @classmethod
    def empty(cls) -> "Precedence":
        return cls((), {})

    @classmethod
    def from_classes(cls, classes: Sequence[Sequence[FunctionSymbol]]) -> "Precedence":
        """Build from equivalence classes listed from highest to lowest."""
        symbols: list[FunctionSymbol] = []
        geq: dict[FunctionSymbol, set[FunctionSymbol]] = {}
        below: list[FunctionSymbol] = []
        for cl in reversed([list(c) for c in classes]):
            for f in cl:
                if f in geq:
                    raise PrecedenceError(f"symbol {f.name} occurs in two classes")
                geq[f] = set(cl) | set(below)
            below.extend(cl)
            symbols = list(cl) + symbols
        return cls(symbols, {f: frozenset(s) for f, s in geq.items()})

    @classmethod
    def from_pairs(
        cls,
        greater: Iterable[tuple[FunctionSymbol, FunctionSymbol]] = (),
        equivalent: Iterable[tuple[FunctionSymbol, FunctionSymbol]] = (),
    ) -> "Precedence":
        """Build the reflexive-transitive closure of the given relations.

        A cycle through a strict pair collapses into an equivalence, which
        ``validate`` then rejects, so user input cannot smuggle in a cyclic
        strict part unnoticed.
        """
        greater = list(greater)
        equivalent = list(equivalent)
        symbols: list[FunctionSymbol] = []
        for f, g in greater + equivalent:
            for h in (f, g):
                if h not in symbols:
                    symbols.append(h)
        geq: dict[FunctionSymbol, set[FunctionSymbol]] = {f: {f} for f in symbols}
        for f, g in greater:
            geq[f].add(g)
        for f, g in equivalent:
            geq[f].add(g)
            geq[g].add(f)
        changed = True
        while changed:
            changed = False
            for f in symbols:
                new = set().union(*(geq[g] for g in geq[f]))
                if not new <= geq[f]:
                    geq[f] |= new
                    changed = True
        prec = cls(symbols, {f: frozenset(s) for f, s in geq.items()})
        for f, g in greater:
            if prec.compare(f, g) is not Cmp.GREATER:
                raise PrecedenceError(
                    f"declared {f.name} > {g.name} contradicts other declarations "
                    f"(cycle through the strict part)")
        return prec

    @property
    def symbols(self) -> tuple[FunctionSymbol, ...]:
        return self._symbols

    def compare(self, f: FunctionSymbol, g: FunctionSymbol) -> Cmp:
        if f == g:
            return Cmp.EQUIVALENT
        fg = g in self._geq.get(f, ())
        gf = f in self._geq.get(g, ())
        if fg and gf:
            return Cmp.EQUIVALENT
        if fg:
            return Cmp.GREATER
        if gf:
            return Cmp.SMALLER
        return Cmp.INCOMPARABLE

    def gt(self, f: FunctionSymbol, g: FunctionSymbol) -> bool:
        return self.compare(f, g) is Cmp.GREATER

    def equiv(self, f: FunctionSymbol, g: FunctionSymbol) -> bool:
        return self.compare(f, g) is Cmp.EQUIVALENT

    def geq(self, f: FunctionSymbol, g: FunctionSymbol) -> bool:
        return self.compare(f, g) in (Cmp.GREATER, Cmp.EQUIVALENT)

    def equivalence_classes(
        self, symbols: Optional[Sequence[FunctionSymbol]] = None,
    ) -> list[list[FunctionSymbol]]:
        """Equivalence classes over the given symbols, higher classes first;
        classes incomparable to each other appear in first-symbol order."""
        syms = list(symbols) if symbols is not None else list(self._symbols)
        classes: list[list[FunctionSymbol]] = []
        for f in syms:
            for cl in classes:
                if self.equiv(f, cl[0]):
                    cl.append(f)
                    break
            else:
                classes.append([f])
        # stable topological-ish sort: count how many classes sit strictly above
        def above(cl: list[FunctionSymbol]) -> int:
            return sum(1 for other in classes
                       if other is not cl and self.gt(other[0], cl[0]))
        return sorted(classes, key=above)

    def validate(self, symbols: Sequence[FunctionSymbol] = ()) -> dict[int, int]:
        """Check the quasi-order axioms over the declared plus given symbols.

        Returns the recorded maximal arity per equivalence class (classes are
        finite here, so the boundedness requirement holds by construction).
        Raises PrecedenceError on reflexivity/transitivity failures or a
        cyclic strict part.
        """
        syms = list(self._symbols)
        for f in symbols:
            if f not in syms:
                syms.append(f)
        for f in syms:
            if self.compare(f, f) is not Cmp.EQUIVALENT:
                raise PrecedenceError(f"precedence is not reflexive on {f.name}")
        for f in syms:
            for g in syms:
                cmp_fg = self.compare(f, g)
                cmp_gf = self.compare(g, f)
                expected = {
                    Cmp.GREATER: Cmp.SMALLER, Cmp.SMALLER: Cmp.GREATER,
                    Cmp.EQUIVALENT: Cmp.EQUIVALENT,
                    Cmp.INCOMPARABLE: Cmp.INCOMPARABLE}[cmp_fg]
                if cmp_gf is not expected:
                    raise PrecedenceError(
                        f"inconsistent comparisons between {f.name} and {g.name}")
                for h in syms:
                    if self.geq(f, g) and self.geq(g, h) and not self.geq(f, h):
                        raise PrecedenceError(
                            f"precedence is not transitive on "
                            f"{f.name}, {g.name}, {h.name}")
        # acyclicity of the strict part via depth-first search
        color: dict[FunctionSymbol, int] = {}

        def dfs(f: FunctionSymbol) -> None:
            color[f] = 1
            for g in syms:
                if self.gt(f, g):
                    if color.get(g) == 1:
                        raise PrecedenceError(
                            f"strict part has a cycle through {f.name} and {g.name}")
                    if g not in color:
                        dfs(g)
            color[f] = 2

        for f in syms:
            if f not in color:
                dfs(f)
        bounds: dict[int, int] = {}
        for idx, cl in enumerate(self.equivalence_classes(syms)):
            bounds[idx] = max(f.max_arity for f in cl)
        return bounds


class ArgumentFilter:
    """The regarded argument positions of each symbol; unlisted symbols
    regard all of their positions."""

    def __init__(self, overrides: Mapping[FunctionSymbol, Iterable[int]] = ()):
        self._overrides: dict[FunctionSymbol, frozenset[int]] = {}
        for f, positions in dict(overrides).items():
            positions = frozenset(positions)
            full = frozenset(range(1, f.max_arity + 1))
            if not positions <= full:
                raise PrecedenceError(
                    f"filter for {f.name} uses positions outside 1..{f.max_arity}")
            self._overrides[f] = positions

    @staticmethod
    def full(f: FunctionSymbol) -> frozenset[int]:
        return frozenset(range(1, f.max_arity + 1))

    def regarded(self, f: FunctionSymbol) -> frozenset[int]:
        return self._overrides.get(f, self.full(f))

    @property
    def overrides(self) -> dict[FunctionSymbol, frozenset[int]]:
        return dict(self._overrides)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ArgumentFilter):
            return NotImplemented
        mine = {f: p for f, p in self._overrides.items() if p != self.full(f)}
        theirs = {f: p for f, p in other._overrides.items() if p != self.full(f)}
        return mine == theirs

    def __hash__(self) -> int:
        return hash(frozenset(
            (f, p) for f, p in self._overrides.items() if p != self.full(f)))


@dataclass(frozen=True)
class HorpoParams:
    """The tunable parameters of the ordering: precedence plus filter."""

    precedence: Precedence
    filter: ArgumentFilter = field(default_factory=ArgumentFilter)

    def validate(self, symbols: Sequence[FunctionSymbol] = (),
                 constrained: bool = False) -> None:
        self.precedence.validate(symbols)
        if constrained:
            for f in list(symbols) + list(self.precedence.symbols):
                if f.is_theory and self.filter.regarded(f) != ArgumentFilter.full(f):
                    raise PrecedenceError(
                        f"theory symbol {f.name} must regard all its arguments")


@dataclass(frozen=True)
class Derivation:
    """A proof tree: which clause justified each relation step."""

    rule: str
    left: Term
    right: Term
    index: Optional[int] = None
    premises: tuple["Derivation", ...] = ()

    def pretty(self, indent: int = 0) -> str:
        rel = {
            **{r: "~~" for r in APPROX_RULES},
            **{r: ">!" for r in GT_RULES},
            **{r: ">>" for r in RPO_RULES},
        }[self.rule]
        pos = f" at {self.index}" if self.index is not None else ""
        line = f"{'  ' * indent}{self.left} {rel} {self.right}   [{self.rule}{pos}]"
        return "\n".join([line] + [p.pretty(indent + 1) for p in self.premises])


class HorpoEngine:
    """Memoized evaluator for the unconstrained relations under fixed params."""

    def __init__(self, params: HorpoParams, mode: str = "sound"):
        if mode not in MODES:
            raise ValueError(f"unknown fidelity mode {mode!r}")
        self.params = params
        self.mode = mode
        self._memo: dict[tuple[str, Term, Term], Optional[Derivation]] = {}

    # -- public relations ---------------------------------------------------

    def approx(self, s: Term, t: Term) -> Optional[Derivation]:
        return self._memoized("approx", s, t, self._approx)

    def gt(self, s: Term, t: Term) -> Optional[Derivation]:
        return self._memoized("gt", s, t, self._gt)

    def geq(self, s: Term, t: Term) -> Optional[Derivation]:
        """approx or gt; the returned derivation's clause names the disjunct."""
        return self.approx(s, t) or self.gt(s, t)

    def rpo_gt(self, s: Term, t: Term) -> Optional[Derivation]:
        return self._memoized("rpo", s, t, self._rpo_gt)

    # -- machinery ----------------------------------------------------------

    def _memoized(self, op, s, t, fn) -> Optional[Derivation]:
        key = (op, s, t)
        if key in self._memo:
            return self._memo[key]
        result = fn(s, t)
        self._memo[key] = result
        return result

    def _regarded_applied(self, f: FunctionSymbol, n: int) -> list[int]:
        return sorted(i for i in self.params.filter.regarded(f) if i <= n)

    def _approx(self, s: Term, t: Term) -> Optional[Derivation]:
        if s.structure != t.structure:
            return None
        s_head, s_args = s.spine
        t_head, t_args = t.spine
        if isinstance(s_head, Var):
            # Eq-mono: same variable head, all arguments equivalent
            if s_head != t_head or len(s_args) != len(t_args):
                return None
            premises = []
            for si, ti in zip(s_args, t_args):
                d = self.approx(si, ti)
                if d is None:
                    return None
                premises.append(d)
            return Derivation(EQ_MONO, s, t, premises=tuple(premises))
        if isinstance(s_head, Sym) and isinstance(t_head, Sym):
            # Eq-args: equivalent heads with equal filters, regarded arguments
            # equivalent
            f, g = s_head.symbol, t_head.symbol
            if collapse(f.type) != collapse(g.type):
                return None
            if not self.params.precedence.equiv(f, g):
                return None
            if self.params.filter.regarded(f) != self.params.filter.regarded(g):
                return None
            if len(s_args) != len(t_args):
                return None
            premises = []
            for i in self._regarded_applied(f, len(s_args)):
                d = self.approx(s_args[i - 1], t_args[i - 1])
                if d is None:
                    return None
                premises.append(d)
            return Derivation(EQ_ARGS, s, t, premises=tuple(premises))
        return None

    def _gt(self, s: Term, t: Term) -> Optional[Derivation]:
        if s.structure != t.structure:
            return None
        s_head, s_args = s.spine
        t_head, t_args = t.spine
        if (isinstance(s_head, Var) and s_head == t_head
                and len(s_args) == len(t_args)):
            # Gr-mono: all arguments weakly decrease, one strictly
            d = self._args_decrease(s, t, s_args, t_args,
                                    list(range(1, len(s_args) + 1)), GR_MONO)
            if d is not None:
                return d
        if isinstance(s_head, Sym) and isinstance(t_head, Sym):
            f, g = s_head.symbol, t_head.symbol
            if (collapse(f.type) == collapse(g.type)
                    and self.params.precedence.equiv(f, g)
                    and self.params.filter.regarded(f) == self.params.filter.regarded(g)
                    and len(s_args) == len(t_args)):
                # Gr-args: regarded arguments weakly decrease, one strictly
                d = self._args_decrease(s, t, s_args, t_args,
                                        self._regarded_applied(f, len(s_args)), GR_ARGS)
                if d is not None:
                    return d
        rpo = self.rpo_gt(s, t)
        if rpo is not None:
            return Derivation(GR_RPO, s, t, premises=(rpo,))
        return None

    def _args_decrease(self, s, t, s_args, t_args, positions, rule):
        premises: list[Derivation] = []
        witness: Optional[int] = None
        for i in positions:
            weak = self.geq(s_args[i - 1], t_args[i - 1])
            if weak is None:
                return None
            premises.append(weak)
        for k, i in enumerate(positions):
            strict = self.gt(s_args[i - 1], t_args[i - 1])
            if strict is not None:
                witness = i
                premises[k] = strict
                break
        if witness is None:
            return None
        return Derivation(rule, s, t, index=witness, premises=tuple(premises))

    def _rpo_gt(self, s: Term, t: Term) -> Optional[Derivation]:
        s_head, s_args = s.spine
        if not isinstance(s_head, Sym):
            return None
        f = s_head.symbol
        n = len(s_args)
        if not self._missing_positions_regarded(f, n):
            return None
        regarded_s = self._regarded_applied(f, n)

        # Rpo-select: one regarded argument already dominates the right side
        for i in regarded_s:
            d = self.geq(s_args[i - 1], t)
            if d is not None:
                return Derivation(RPO_SELECT, s, t, index=i, premises=(d,))

        t_head, t_args = t.spine
        m = len(t_args)

        # Rpo-lex: equivalent heads, lexicographic decrease at the smallest
        # witness index
        if isinstance(t_head, Sym):
            g = t_head.symbol
            if self.params.precedence.equiv(f, g):
                d = self._lex(s, t, f, g, s_args, t_args)
                if d is not None:
                    return d

        # Rpo-copy: strictly smaller head, regarded arguments all dominated
        if isinstance(t_head, Sym):
            g = t_head.symbol
            if self.params.precedence.gt(f, g):
                premises = []
                ok = True
                for j in self._regarded_applied(g, m):
                    d = self.rpo_gt(s, t_args[j - 1])
                    if d is None:
                        ok = False
                        break
                    premises.append(d)
                if ok:
                    return Derivation(RPO_COPY, s, t, premises=tuple(premises))

        # Rpo-appl: the right side is an application and every piece is
        # dominated; mode "sound" also demands the head
        if isinstance(t, App):
            premises = []
            pieces = list(t_args) if self.mode == "paper" else [t_head] + list(t_args)
            ok = True
            for piece in pieces:
                d = self.rpo_gt(s, piece)
                if d is None:
                    ok = False
                    break
                premises.append(d)
            if ok:
                return Derivation(RPO_APPL, s, t, premises=tuple(premises))
        return None

    def _missing_positions_regarded(self, f: FunctionSymbol, n: int) -> bool:
        regarded = self.params.filter.regarded(f)
        return all(i in regarded for i in range(n + 1, f.max_arity + 1))

    def _lex(self, s, t, f, g, s_args, t_args) -> Optional[Derivation]:
        pi_f = self.params.filter.regarded(f)
        pi_g = self.params.filter.regarded(g)
        n, m = len(s_args), len(t_args)
        for i in sorted(pi_f & pi_g):
            if i > min(n, m):
                break
            upto = set(range(1, i + 1))
            if pi_f & upto != pi_g & upto:
                continue
            premises: list[Derivation] = []
            ok = True
            for j in range(1, i):
                if j in pi_f:
                    d = self.approx(s_args[j - 1], t_args[j - 1])
                    if d is None:
                        ok = False
                        break
                    premises.append(d)
            if not ok:
                continue
            strict = self.gt(s_args[i - 1], t_args[i - 1])
            if strict is None:
                continue
            premises.append(strict)
            for j in range(i + 1, m + 1):
                if j in pi_g:
                    d = self.rpo_gt(s, t_args[j - 1])
                    if d is None:
                        ok = False
                        break
                    premises.append(d)
            if ok:
                return Derivation(RPO_LEX, s, t, index=i, premises=tuple(premises))
        return None


# -- module-level conveniences -----------------------------------------------


def approx(s: Term, t: Term, params: HorpoParams, mode: str = "sound"):
    return HorpoEngine(params, mode).approx(s, t)


def geq(s: Term, t: Term, params: HorpoParams, mode: str = "sound"):
    return HorpoEngine(params, mode).geq(s, t)


def gt(s: Term, t: Term, params: HorpoParams, mode: str = "sound"):
    return HorpoEngine(params, mode).gt(s, t)


def rpo_gt(s: Term, t: Term, params: HorpoParams, mode: str = "sound"):
    return HorpoEngine(params, mode).rpo_gt(s, t)


# -- derivation replay ---------------------------------------------------------


def verify_derivation(d: Derivation, params: HorpoParams, mode: str = "sound") -> bool:
    """Re-validate every step of a derivation against the clause definitions.

    Independent of the engine's search: checks each node's side conditions
    and that the premises connect the sub-term pairs the clause dictates.
    """
    engine = HorpoEngine(params, mode)  # reused only for helper predicates
    return _verify(d, engine)


def _verify(d: Derivation, eng: HorpoEngine) -> bool:
    s, t = d.left, d.right
    prec, filt = eng.params.precedence, eng.params.filter
    s_head, s_args = s.spine
    t_head, t_args = t.spine

    def premises_connect(pairs, rules_per_pair) -> bool:
        if len(d.premises) != len(pairs):
            return False
        for p, (ls, rs), allowed in zip(d.premises, pairs, rules_per_pair):
            if p.left != ls or p.right != rs or p.rule not in allowed:
                return False
            if not _verify(p, eng):
                return False
        return True

    weak = APPROX_RULES | GT_RULES

    if d.rule in (EQ_MONO, EQ_ARGS, GR_MONO, GR_ARGS):
        if s.structure != t.structure or len(s_args) != len(t_args):
            return False
    if d.rule in (EQ_MONO, GR_MONO):
        if not isinstance(s_head, Var) or s_head != t_head:
            return False
    if d.rule in (EQ_ARGS, GR_ARGS):
        if not (isinstance(s_head, Sym) and isinstance(t_head, Sym)):
            return False
        f, g = s_head.symbol, t_head.symbol
        if collapse(f.type) != collapse(g.type) or not prec.equiv(f, g):
            return False
        if filt.regarded(f) != filt.regarded(g):
            return False

    if d.rule == EQ_MONO:
        pairs = list(zip(s_args, t_args))
        return premises_connect(pairs, [APPROX_RULES] * len(pairs))
    if d.rule == EQ_ARGS:
        idx = eng._regarded_applied(s_head.symbol, len(s_args))
        pairs = [(s_args[i - 1], t_args[i - 1]) for i in idx]
        return premises_connect(pairs, [APPROX_RULES] * len(pairs))
    if d.rule in (GR_MONO, GR_ARGS):
        positions = (list(range(1, len(s_args) + 1)) if d.rule == GR_MONO
                     else eng._regarded_applied(s_head.symbol, len(s_args)))
        if d.index not in positions:
            return False
        pairs = [(s_args[i - 1], t_args[i - 1]) for i in positions]
        allowed = [GT_RULES if i == d.index else weak for i in positions]
        return premises_connect(pairs, allowed)
    if d.rule == GR_RPO:
        if s.structure != t.structure:
            return False
        return premises_connect([(s, t)], [RPO_RULES])

    # the four path clauses share the head guard
    if not isinstance(s_head, Sym):
        return False
    f = s_head.symbol
    if not eng._missing_positions_regarded(f, len(s_args)):
        return False
    if d.rule == RPO_SELECT:
        if d.index not in eng._regarded_applied(f, len(s_args)):
            return False
        return premises_connect([(s_args[d.index - 1], t)], [weak])
    if d.rule == RPO_COPY:
        if not isinstance(t_head, Sym) or not prec.gt(f, t_head.symbol):
            return False
        idx = eng._regarded_applied(t_head.symbol, len(t_args))
        pairs = [(s, t_args[j - 1]) for j in idx]
        return premises_connect(pairs, [RPO_RULES] * len(pairs))
    if d.rule == RPO_LEX:
        if not isinstance(t_head, Sym) or not prec.equiv(f, t_head.symbol):
            return False
        g = t_head.symbol
        pi_f, pi_g = filt.regarded(f), filt.regarded(g)
        i = d.index
        if i is None or i not in pi_f & pi_g or i > min(len(s_args), len(t_args)):
            return False
        upto = set(range(1, i + 1))
        if pi_f & upto != pi_g & upto:
            return False
        pairs = []
        allowed = []
        for j in range(1, i):
            if j in pi_f:
                pairs.append((s_args[j - 1], t_args[j - 1]))
                allowed.append(APPROX_RULES)
        pairs.append((s_args[i - 1], t_args[i - 1]))
        allowed.append(GT_RULES)
        for j in range(i + 1, len(t_args) + 1):
            if j in pi_g:
                pairs.append((s, t_args[j - 1]))
                allowed.append(RPO_RULES)
        return premises_connect(pairs, allowed)
    if d.rule == RPO_APPL:
        if not isinstance(t, App):
            return False
        pieces = (list(t_args) if eng.mode == "paper" else [t_head] + list(t_args))
        pairs = [(s, piece) for piece in pieces]
        return premises_connect(pairs, [RPO_RULES] * len(pairs))
    return False
