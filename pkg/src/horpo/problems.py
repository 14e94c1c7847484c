"""Concrete syntax for orientation problems.

A problem file is line oriented::

    # recursive summation
    theory ints
    sort state                      # extra uninterpreted sorts
    order Int = nonneg              # per-sort value-order override
    sum : Int -> Int                # symbol declaration (plain)
    sum x -> 0 [x <= 0] {weak}
    sum x -> x + sum (x - 1) [x > 0] {strict} L = {x}
    params {
        precedence: sum > + ~ -
        pi(sum) = {1}
    }

Rules default to demand strict, constraint true, and the logical-variable
set Var(constraint) plus the fresh variables of the right side.  Terms use
juxtaposition for application (tightest), the usual arithmetic and
comparison operators, and ``/\\ \\/ not`` on booleans.  A params file (used
as a sidecar next to a problem) holds bare ``precedence:`` and ``pi(...)``
lines.

Parse failures raise ProblemError carrying a distinct code (lexical,
syntax, sort, arity) and the 1-based line/column of the offending token.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Union

from .core import ArgumentFilter, HorpoParams, Precedence, PrecedenceError
from .synth import OrientationProblem, RuleSpec, make_rule
from .terms import (
    App,
    Arrow,
    Base,
    FunctionSymbol,
    Signature,
    SimpleType,
    Sort,
    Sym,
    SymbolKind,
    Term,
    Var,
    app,
)
from .theory import (
    AND,
    BOOL,
    Constraint,
    EQ,
    GE,
    GT,
    INT,
    LE,
    LT,
    NE,
    NEG,
    NOT,
    OR,
    MINUS,
    PLUS,
    THEORY_SYMBOLS,
    TIMES,
    TheoryError,
    TRUE_CONSTRAINT,
    ValueOrder,
    bool_value,
    int_value,
    value_of,
)


class ErrorCode(Enum):
    LEXICAL = "lexical"
    SYNTAX = "syntax"
    SORT = "sort"
    ARITY = "arity"


class ProblemError(Exception):
    def __init__(self, code: ErrorCode, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{code.value} error at {line}:{col}: {message}")
        self.code = code
        self.message = message
        self.line = line
        self.col = col


RESERVED = frozenset({
    "sort", "order", "theory", "params", "precedence", "pi",
    "strict", "weak", "not", "true", "false", "neg", "L",
})

_PUNCT = ["->", ">=", "<=", "!=", "/\\", "\\/", "=", ">", "<",
          "+", "-", "*", "(", ")", "{", "}", "[", "]", ",", ":", "~"]


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | "punct" | "eol"
    text: str
    line: int
    col: int


def _tokenize_line(text: str, line_no: int) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t":
            i += 1
            continue
        if c == "#":
            break
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            tokens.append(Token("ident", text[i:j], line_no, i + 1))
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], line_no, i + 1))
            i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("punct", p, line_no, i + 1))
                i += len(p)
                break
        else:
            raise ProblemError(
                ErrorCode.LEXICAL, f"unexpected character {c!r}", line_no, i + 1)
    tokens.append(Token("eol", "", line_no, n + 1))
    return tokens


# ---------- Raw term syntax ----------


@dataclass
class RawIdent:
    name: str
    tok: Token


@dataclass
class RawInt:
    value: int
    tok: Token


@dataclass
class RawBool:
    value: bool
    tok: Token


@dataclass
class RawApply:
    fun: "Raw"
    arg: "Raw"
    tok: Token


@dataclass
class RawCall:
    symbol: FunctionSymbol
    args: list
    tok: Token


Raw = Union[RawIdent, RawInt, RawBool, RawApply, RawCall]


class _TokenCursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eol":
            self.pos += 1
        return tok

    def at_punct(self, *texts: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text in texts

    def at_ident(self, *texts: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and (not texts or tok.text in texts)

    def expect_punct(self, text: str) -> Token:
        tok = self.peek()
        if not self.at_punct(text):
            raise ProblemError(
                ErrorCode.SYNTAX, f"expected {text!r}, found {tok.text or 'end of line'!r}",
                tok.line, tok.col)
        return self.next()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise ProblemError(
                ErrorCode.SYNTAX, f"expected an identifier, found {tok.text or 'end of line'!r}",
                tok.line, tok.col)
        return self.next()

    def expect_eol(self) -> None:
        tok = self.peek()
        if tok.kind != "eol":
            raise ProblemError(
                ErrorCode.SYNTAX, f"unexpected trailing {tok.text!r}", tok.line, tok.col)


_CMP = {">": GT, ">=": GE, "<": LT, "<=": LE, "=": EQ, "!=": NE}


def _parse_term(cur: _TokenCursor) -> Raw:
    return _parse_or(cur)


def _parse_or(cur: _TokenCursor) -> Raw:
    left = _parse_and(cur)
    while cur.at_punct("\\/"):
        tok = cur.next()
        left = RawCall(OR, [left, _parse_and(cur)], tok)
    return left


def _parse_and(cur: _TokenCursor) -> Raw:
    left = _parse_not(cur)
    while cur.at_punct("/\\"):
        tok = cur.next()
        left = RawCall(AND, [left, _parse_not(cur)], tok)
    return left


def _parse_not(cur: _TokenCursor) -> Raw:
    if cur.at_ident("not"):
        tok = cur.next()
        return RawCall(NOT, [_parse_not(cur)], tok)
    return _parse_cmp(cur)


def _parse_cmp(cur: _TokenCursor) -> Raw:
    left = _parse_add(cur)
    if cur.at_punct(*_CMP):
        tok = cur.next()
        right = _parse_add(cur)
        return RawCall(_CMP[tok.text], [left, right], tok)
    return left


def _parse_add(cur: _TokenCursor) -> Raw:
    left = _parse_mul(cur)
    while cur.at_punct("+", "-"):
        tok = cur.next()
        op = PLUS if tok.text == "+" else MINUS
        left = RawCall(op, [left, _parse_mul(cur)], tok)
    return left


def _parse_mul(cur: _TokenCursor) -> Raw:
    left = _parse_unary(cur)
    while cur.at_punct("*"):
        tok = cur.next()
        left = RawCall(TIMES, [left, _parse_unary(cur)], tok)
    return left


def _parse_unary(cur: _TokenCursor) -> Raw:
    if cur.at_punct("-"):
        tok = cur.next()
        inner = _parse_unary(cur)
        if isinstance(inner, RawInt):
            return RawInt(-inner.value, tok)  # fold literal negation
        return RawCall(NEG, [inner], tok)
    return _parse_app(cur)


_ATOM_STARTS = ("ident", "int")
_TERM_KEYWORDS = RESERVED - {"true", "false"}


def _parse_app(cur: _TokenCursor) -> Raw:
    atom = _parse_atom(cur)
    while cur.peek().kind in _ATOM_STARTS or cur.at_punct("("):
        tok = cur.peek()
        if tok.kind == "ident" and tok.text in _TERM_KEYWORDS:
            break  # structural keyword ends the term
        arg = _parse_atom(cur)
        atom = RawApply(atom, arg, tok)
    return atom


def _parse_atom(cur: _TokenCursor) -> Raw:
    tok = cur.peek()
    if tok.kind == "int":
        cur.next()
        return RawInt(int(tok.text), tok)
    if tok.kind == "ident":
        if tok.text in ("true", "false"):
            cur.next()
            return RawBool(tok.text == "true", tok)
        if tok.text in _TERM_KEYWORDS:
            raise ProblemError(
                ErrorCode.SYNTAX, f"reserved word {tok.text!r} cannot start a term",
                tok.line, tok.col)
        cur.next()
        return RawIdent(tok.text, tok)
    if cur.at_punct("("):
        cur.next()
        inner = _parse_term(cur)
        cur.expect_punct(")")
        return inner
    raise ProblemError(
        ErrorCode.SYNTAX, f"expected a term, found {tok.text or 'end of line'!r}",
        tok.line, tok.col)


# ---------- Type syntax ----------


def _parse_type(cur: _TokenCursor, sorts: dict[str, Sort]) -> SimpleType:
    left = _parse_type_atom(cur, sorts)
    if cur.at_punct("->"):
        cur.next()
        return Arrow(left, _parse_type(cur, sorts))
    return left


def _parse_type_atom(cur: _TokenCursor, sorts: dict[str, Sort]) -> SimpleType:
    if cur.at_punct("("):
        cur.next()
        inner = _parse_type(cur, sorts)
        cur.expect_punct(")")
        return inner
    tok = cur.expect_ident()
    if tok.text not in sorts:
        raise ProblemError(
            ErrorCode.SORT, f"unknown sort {tok.text!r}", tok.line, tok.col)
    return Base(sorts[tok.text])


# ---------- Type inference ----------


@dataclass(frozen=True)
class _TV:
    """A type metavariable used during inference."""

    id: int


class _Inference:
    def __init__(self, signature: Signature, theory_enabled: bool):
        self.signature = signature
        self.theory_enabled = theory_enabled
        self.subst: dict[_TV, object] = {}
        self.var_types: dict[str, _TV] = {}
        self._counter = 0

    def fresh(self) -> _TV:
        self._counter += 1
        return _TV(self._counter)

    def resolve(self, t):
        while isinstance(t, _TV) and t in self.subst:
            t = self.subst[t]
        if isinstance(t, Arrow):
            return Arrow(self.resolve(t.domain), self.resolve(t.codomain))
        return t

    def _occurs(self, tv: _TV, t) -> bool:
        t = self.resolve(t) if isinstance(t, _TV) else t
        if isinstance(t, _TV):
            return t == tv
        if isinstance(t, Arrow):
            return self._occurs(tv, self.resolve(t.domain)) or self._occurs(
                tv, self.resolve(t.codomain))
        return False

    def unify(self, a, b, tok: Token) -> None:
        a, b = self.resolve(a), self.resolve(b)
        if isinstance(a, _TV):
            if a != b:
                if self._occurs(a, b):
                    raise ProblemError(
                        ErrorCode.SORT, "cannot infer a finite type here",
                        tok.line, tok.col)
                self.subst[a] = b
            return
        if isinstance(b, _TV):
            self.unify(b, a, tok)
            return
        if isinstance(a, Base) and isinstance(b, Base):
            if a.sort != b.sort:
                raise ProblemError(
                    ErrorCode.SORT, f"sort mismatch: {a} vs {b}", tok.line, tok.col)
            return
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.domain, b.domain, tok)
            self.unify(a.codomain, b.codomain, tok)
            return
        # one side fully applied, the other expects more arguments
        raise ProblemError(
            ErrorCode.ARITY, f"type mismatch: {a} vs {b}", tok.line, tok.col)

    def infer(self, raw: Raw):
        if isinstance(raw, RawInt):
            if not self.theory_enabled:
                raise ProblemError(
                    ErrorCode.SORT, "integer literal with theory disabled",
                    raw.tok.line, raw.tok.col)
            return Base(INT)
        if isinstance(raw, RawBool):
            if not self.theory_enabled:
                raise ProblemError(
                    ErrorCode.SORT, "boolean literal with theory disabled",
                    raw.tok.line, raw.tok.col)
            return Base(BOOL)
        if isinstance(raw, RawIdent):
            declared = self.signature.get(raw.name)
            if declared is not None:
                return declared.type
            if raw.name in RESERVED:
                raise ProblemError(
                    ErrorCode.SYNTAX, f"reserved word {raw.name!r} used as a term",
                    raw.tok.line, raw.tok.col)
            tv = self.var_types.get(raw.name)
            if tv is None:
                tv = self.fresh()
                self.var_types[raw.name] = tv
            return tv
        if isinstance(raw, RawCall):
            if not self.theory_enabled:
                raise ProblemError(
                    ErrorCode.SORT,
                    f"theory symbol {raw.symbol.name!r} with theory disabled",
                    raw.tok.line, raw.tok.col)
            expected = raw.symbol.type.argument_types
            for arg, want in zip(raw.args, expected):
                got = self.infer(arg)
                self.unify(got, want, raw.tok)
            return Base(raw.symbol.type.result_sort)
        if isinstance(raw, RawApply):
            tf = self.resolve(self.infer(raw.fun))
            ta = self.infer(raw.arg)
            if isinstance(tf, Base):
                raise ProblemError(
                    ErrorCode.ARITY,
                    f"term of sort {tf} is applied to an argument",
                    raw.tok.line, raw.tok.col)
            if isinstance(tf, _TV):
                dom, cod = self.fresh(), self.fresh()
                self.subst[tf] = Arrow(dom, cod)  # type: ignore[arg-type]
                tf = Arrow(dom, cod)  # type: ignore[assignment]
            self.unify(tf.domain, ta, raw.tok)
            return tf.codomain
        raise AssertionError(f"unknown raw node {raw!r}")

    def grounded_var(self, name: str, tok: Token) -> Var:
        t = self.resolve(self.var_types[name])
        if isinstance(t, _TV) or _has_tv(t):
            raise ProblemError(
                ErrorCode.SORT, f"cannot infer the type of variable {name!r}",
                tok.line, tok.col)
        return Var(name, t)

    def build(self, raw: Raw) -> Term:
        if isinstance(raw, RawInt):
            return int_value(raw.value)
        if isinstance(raw, RawBool):
            return bool_value(raw.value)
        if isinstance(raw, RawIdent):
            declared = self.signature.get(raw.name)
            if declared is not None:
                return Sym(declared)
            return self.grounded_var(raw.name, raw.tok)
        if isinstance(raw, RawCall):
            return app(Sym(raw.symbol), *[self.build(a) for a in raw.args])
        if isinstance(raw, RawApply):
            return App(self.build(raw.fun), self.build(raw.arg))
        raise AssertionError


def _has_tv(t) -> bool:
    if isinstance(t, _TV):
        return True
    if isinstance(t, Arrow):
        return _has_tv(t.domain) or _has_tv(t.codomain)
    return False


# ---------- Params ----------


@dataclass
class ParamsSpec:
    """Name-level precedence chains and filter lines, prior to resolution."""

    greater: list[tuple[str, str]] = field(default_factory=list)
    equivalent: list[tuple[str, str]] = field(default_factory=list)
    filters: dict[str, frozenset[int]] = field(default_factory=dict)
    positions: dict[str, tuple[int, int]] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not (self.greater or self.equivalent or self.filters)

    def mentioned(self) -> list[str]:
        names: list[str] = []
        for f, g in self.greater + self.equivalent:
            for n in (f, g):
                if n not in names:
                    names.append(n)
        for n in self.filters:
            if n not in names:
                names.append(n)
        return names


_THEORY_BY_NAME = {f.name: f for f in THEORY_SYMBOLS}


def resolve_params(spec: ParamsSpec, signature: Signature) -> HorpoParams:
    """Turn name-level params into HorpoParams against a signature (theory
    symbols are resolvable by name as well)."""

    def lookup(name: str) -> FunctionSymbol:
        f = signature.get(name) or _THEORY_BY_NAME.get(name)
        if f is None:
            line, col = spec.positions.get(name, (0, 0))
            raise ProblemError(
                ErrorCode.SORT, f"unknown symbol {name!r} in params", line, col)
        return f

    try:
        precedence = Precedence.from_pairs(
            greater=[(lookup(a), lookup(b)) for a, b in spec.greater],
            equivalent=[(lookup(a), lookup(b)) for a, b in spec.equivalent],
        )
        overrides = {lookup(name): positions
                     for name, positions in spec.filters.items()}
        return HorpoParams(precedence, ArgumentFilter(overrides))
    except PrecedenceError as exc:
        raise ProblemError(ErrorCode.SORT, str(exc)) from exc


def merge_params(inline: Optional[ParamsSpec], sidecar: Optional[ParamsSpec]
                 ) -> tuple[Optional[ParamsSpec], list[str]]:
    """Combine inline and sidecar params; the sidecar wins on conflict."""
    if sidecar is None:
        return inline, []
    if inline is None or inline.empty:
        return sidecar, []
    warnings = []
    sidecar_has_prec = bool(sidecar.greater or sidecar.equivalent)
    merged = ParamsSpec(
        greater=list(sidecar.greater if sidecar_has_prec else inline.greater),
        equivalent=list(sidecar.equivalent if sidecar_has_prec else inline.equivalent),
        filters=dict(inline.filters),
        positions={**inline.positions, **sidecar.positions},
    )
    if sidecar_has_prec and (inline.greater or inline.equivalent):
        warnings.append("sidecar precedence overrides the inline params block")
    for name, positions in sidecar.filters.items():
        if name in merged.filters and merged.filters[name] != positions:
            warnings.append(f"sidecar filter for {name} overrides the inline one")
        merged.filters[name] = positions
    return merged, warnings


def _parse_params_line(cur: _TokenCursor, spec: ParamsSpec) -> None:
    tok = cur.peek()
    if cur.at_ident("precedence"):
        cur.next()
        cur.expect_punct(":")
        prev = _chain_symbol(cur)
        saw_any = False
        while cur.at_punct(">", "~"):
            op = cur.next()
            nxt = _chain_symbol(cur)
            if op.text == ">":
                spec.greater.append((prev, nxt))
            else:
                spec.equivalent.append((prev, nxt))
            prev = nxt
            saw_any = True
        if not saw_any:
            raise ProblemError(
                ErrorCode.SYNTAX, "precedence chain needs at least one > or ~",
                tok.line, tok.col)
        cur.expect_eol()
        return
    if cur.at_ident("pi"):
        cur.next()
        cur.expect_punct("(")
        name = _chain_symbol(cur)
        cur.expect_punct(")")
        cur.expect_punct("=")
        cur.expect_punct("{")
        positions: set[int] = set()
        while not cur.at_punct("}"):
            num = cur.peek()
            if num.kind != "int":
                raise ProblemError(
                    ErrorCode.SYNTAX, "filter positions must be integers",
                    num.line, num.col)
            cur.next()
            positions.add(int(num.text))
            if cur.at_punct(","):
                cur.next()
        cur.expect_punct("}")
        cur.expect_eol()
        if name in spec.filters:
            raise ProblemError(
                ErrorCode.SYNTAX, f"duplicate filter line for {name}",
                tok.line, tok.col)
        spec.filters[name] = frozenset(positions)
        return
    raise ProblemError(
        ErrorCode.SYNTAX,
        f"expected precedence: or pi(...) inside params, found {tok.text!r}",
        tok.line, tok.col)


def _chain_symbol(cur: _TokenCursor) -> str:
    tok = cur.peek()
    if tok.kind == "ident" or (tok.kind == "punct" and tok.text in _THEORY_BY_NAME):
        cur.next()
        return tok.text
    raise ProblemError(
        ErrorCode.SYNTAX, f"expected a symbol name, found {tok.text or 'end of line'!r}",
        tok.line, tok.col)


def parse_params_text(text: str) -> ParamsSpec:
    """Parse a sidecar params file: bare param lines, or a params { } block."""
    spec = ParamsSpec()
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        tokens = _tokenize_line(lines[i], i + 1)
        cur = _TokenCursor(tokens)
        if cur.peek().kind == "eol":
            i += 1
            continue
        if cur.at_ident("params"):
            cur.next()
            cur.expect_punct("{")
            cur.expect_eol()
            i += 1
            while i < len(lines):
                inner = _TokenCursor(_tokenize_line(lines[i], i + 1))
                if inner.at_punct("}"):
                    inner.next()
                    inner.expect_eol()
                    break
                if inner.peek().kind != "eol":
                    _parse_params_line(inner, spec)
                i += 1
            else:
                raise ProblemError(ErrorCode.SYNTAX, "unterminated params block",
                                   len(lines), 1)
            i += 1
            continue
        _parse_params_line(cur, spec)
        # record positions of names for later resolution errors
        i += 1
    for name in spec.mentioned():
        spec.positions.setdefault(name, (0, 0))
    return spec


# ---------- Problem files ----------


@dataclass
class ProblemFile:
    theory: str = "ints"
    sorts: list[Sort] = field(default_factory=list)
    order_overrides: dict[str, str] = field(default_factory=dict)
    signature: Signature = field(default_factory=Signature)
    rules: list[RuleSpec] = field(default_factory=list)
    params: Optional[ParamsSpec] = None

    def value_order(self) -> ValueOrder:
        return ValueOrder.with_overrides(self.order_overrides)

    def orientation_problem(self) -> OrientationProblem:
        return OrientationProblem(
            rules=list(self.rules),
            signature=self.signature,
            value_order=self.value_order(),
        )

    def horpo_params(self) -> Optional[HorpoParams]:
        if self.params is None or self.params.empty:
            return None
        return resolve_params(self.params, self.signature)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProblemFile):
            return NotImplemented
        return (
            self.theory == other.theory
            and self.sorts == other.sorts
            and self.order_overrides == other.order_overrides
            and list(self.signature) == list(other.signature)
            and self.rules == other.rules
            and _params_key(self.params) == _params_key(other.params)
        )


def _params_key(spec: Optional[ParamsSpec]):
    if spec is None or spec.empty:
        return None
    return (tuple(spec.greater), tuple(spec.equivalent),
            tuple(sorted(spec.filters.items())))


def parse_problem(text: str) -> ProblemFile:
    pf = ProblemFile()
    sorts: dict[str, Sort] = {INT.name: INT, BOOL.name: BOOL}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        tokens = _tokenize_line(lines[i], i + 1)
        cur = _TokenCursor(tokens)
        first = cur.peek()
        if first.kind == "eol":
            i += 1
            continue
        if cur.at_ident("theory"):
            cur.next()
            name = cur.expect_ident()
            if name.text not in ("ints", "none"):
                raise ProblemError(
                    ErrorCode.SYNTAX, f"unknown theory {name.text!r} (ints or none)",
                    name.line, name.col)
            pf.theory = name.text
            cur.expect_eol()
        elif cur.at_ident("sort"):
            cur.next()
            name = cur.expect_ident()
            if name.text in sorts or name.text in RESERVED:
                raise ProblemError(
                    ErrorCode.SORT, f"sort {name.text!r} is already defined",
                    name.line, name.col)
            sort = Sort(name.text)
            sorts[name.text] = sort
            pf.sorts.append(sort)
            cur.expect_eol()
        elif cur.at_ident("order"):
            cur.next()
            sort_name = cur.expect_ident()
            cur.expect_punct("=")
            order_name = cur.expect_ident()
            cur.expect_eol()
            try:
                ValueOrder.with_overrides({sort_name.text: order_name.text})
            except TheoryError as exc:
                raise ProblemError(
                    ErrorCode.SORT, str(exc), sort_name.line, sort_name.col)
            pf.order_overrides[sort_name.text] = order_name.text
        elif cur.at_ident("params"):
            block = [lines[i]]
            depth = lines[i].split("#")[0].count("{") - lines[i].split("#")[0].count("}")
            while depth > 0:
                i += 1
                if i >= len(lines):
                    raise ProblemError(
                        ErrorCode.SYNTAX, "unterminated params block", len(lines), 1)
                block.append(lines[i])
                code_part = lines[i].split("#")[0]
                depth += code_part.count("{") - code_part.count("}")
            offset = i - len(block) + 1
            spec = _parse_params_block(block, offset)
            if pf.params is not None:
                raise ProblemError(
                    ErrorCode.SYNTAX, "duplicate params block", first.line, first.col)
            pf.params = spec
        elif _is_declaration(tokens):
            name = cur.expect_ident()
            if name.text in RESERVED:
                raise ProblemError(
                    ErrorCode.SYNTAX, f"reserved word {name.text!r} cannot name a symbol",
                    name.line, name.col)
            if pf.signature.get(name.text) or name.text in _THEORY_BY_NAME:
                raise ProblemError(
                    ErrorCode.SORT, f"symbol {name.text!r} is already declared",
                    name.line, name.col)
            cur.expect_punct(":")
            sym_type = _parse_type(cur, sorts)
            if cur.at_ident("plain"):
                cur.next()
            cur.expect_eol()
            pf.signature.add(FunctionSymbol(name.text, sym_type, SymbolKind.PLAIN))
        else:
            pf.rules.append(_parse_rule(cur, pf))
        i += 1
    return pf


def _is_declaration(tokens: list[Token]) -> bool:
    return (len(tokens) >= 2 and tokens[0].kind == "ident"
            and tokens[1].kind == "punct" and tokens[1].text == ":")


def _parse_params_block(block_lines: list[str], offset: int) -> ParamsSpec:
    spec = ParamsSpec()
    head = _TokenCursor(_tokenize_line(block_lines[0], offset + 1))
    head.next()  # params
    head.expect_punct("{")
    rest_tokens = []
    if head.peek().kind != "eol":
        raise ProblemError(ErrorCode.SYNTAX, "params block starts on its own line",
                           head.peek().line, head.peek().col)
    for j, line in enumerate(block_lines[1:], start=1):
        cur = _TokenCursor(_tokenize_line(line, offset + j + 1))
        if cur.at_punct("}"):
            cur.next()
            cur.expect_eol()
            break
        if cur.peek().kind == "eol":
            continue
        _parse_params_line(cur, spec)
    for name in spec.mentioned():
        spec.positions.setdefault(name, (offset + 1, 1))
    return spec


def _parse_rule(cur: _TokenCursor, pf: ProblemFile) -> RuleSpec:
    start = cur.peek()
    inference = _Inference(pf.signature, theory_enabled=pf.theory == "ints")
    raw_lhs = _parse_term(cur)
    cur.expect_punct("->")
    raw_rhs = _parse_term(cur)
    raw_phi = None
    if cur.at_punct("["):
        cur.next()
        raw_phi = _parse_term(cur)
        cur.expect_punct("]")
    demand = "strict"
    if cur.at_punct("{"):
        cur.next()
        tok = cur.expect_ident()
        if tok.text not in ("strict", "weak"):
            raise ProblemError(
                ErrorCode.SYNTAX, f"demand must be strict or weak, got {tok.text!r}",
                tok.line, tok.col)
        demand = tok.text
        cur.expect_punct("}")
    lvar_tokens: Optional[list[Token]] = None
    if cur.at_ident("L"):
        cur.next()
        cur.expect_punct("=")
        cur.expect_punct("{")
        lvar_tokens = []
        while not cur.at_punct("}"):
            lvar_tokens.append(cur.expect_ident())
            if cur.at_punct(","):
                cur.next()
        cur.expect_punct("}")
    cur.expect_eol()

    lhs_type = inference.infer(raw_lhs)
    rhs_type = inference.infer(raw_rhs)
    inference.unify(lhs_type, rhs_type, start)
    if raw_phi is not None:
        phi_type = inference.infer(raw_phi)
        inference.unify(phi_type, Base(BOOL), start)

    lhs = inference.build(raw_lhs)
    rhs = inference.build(raw_rhs)
    phi = Constraint(inference.build(raw_phi)) if raw_phi is not None else TRUE_CONSTRAINT
    lvars: Optional[list[Var]] = None
    if lvar_tokens is not None:
        lvars = []
        for tok in lvar_tokens:
            if tok.text not in inference.var_types:
                raise ProblemError(
                    ErrorCode.SORT,
                    f"logical variable {tok.text!r} does not occur in the rule",
                    tok.line, tok.col)
            lvars.append(inference.grounded_var(tok.text, tok))
    try:
        return make_rule(lhs, rhs, phi, lvars, demand)
    except TheoryError as exc:
        raise ProblemError(ErrorCode.SORT, str(exc), start.line, start.col) from exc


# ---------- Pretty printing ----------

_INFIX_PREC = {"\\/": 10, "/\\": 20, ">": 30, ">=": 30, "<": 30, "<=": 30,
               "=": 30, "!=": 30, "+": 40, "-": 40, "*": 50}
_APP_PREC = 60
_ATOM_PREC = 70


def pretty_term(term: Term, parent: int = 0) -> str:
    value = value_of(term)
    if value is not None:
        text = str(value)
        prec = 55 if text.startswith("-") else _ATOM_PREC
        return _wrap(text, prec, parent)
    head, args = term.spine
    if isinstance(head, Sym) and head.symbol.kind is SymbolKind.THEORY:
        name = head.symbol.name
        if name in _INFIX_PREC and len(args) == 2:
            prec = _INFIX_PREC[name]
            text = (f"{pretty_term(args[0], prec)} {name} "
                    f"{pretty_term(args[1], prec + 1)}")
            return _wrap(text, prec, parent)
        if name == "not" and len(args) == 1:
            return _wrap(f"not {pretty_term(args[0], 26)}", 25, parent)
        if name == "neg" and len(args) == 1:
            return _wrap(f"-{pretty_term(args[0], 56)}", 55, parent)
    if not args:
        return _wrap(str(head), _ATOM_PREC, parent)
    parts = [pretty_term(head, _APP_PREC)] + [
        pretty_term(a, _APP_PREC + 1) for a in args]
    return _wrap(" ".join(parts), _APP_PREC, parent)


def _wrap(text: str, prec: int, parent: int) -> str:
    return f"({text})" if prec < parent else text


def rule_to_text(rule: RuleSpec) -> str:
    parts = [f"{pretty_term(rule.lhs)} -> {pretty_term(rule.rhs)}"]
    if rule.constraint != TRUE_CONSTRAINT:
        parts.append(f"[{pretty_term(rule.constraint.term)}]")
    parts.append(f"{{{rule.demand}}}")
    names = ", ".join(sorted(v.name for v in rule.lvars))
    parts.append(f"L = {{{names}}}")
    return " ".join(parts)


def params_spec_to_lines(spec: ParamsSpec) -> list[str]:
    lines = []
    for a, b in spec.greater:
        lines.append(f"precedence: {a} > {b}")
    for a, b in spec.equivalent:
        lines.append(f"precedence: {a} ~ {b}")
    for name, positions in sorted(spec.filters.items()):
        inner = ", ".join(str(p) for p in sorted(positions))
        lines.append(f"pi({name}) = {{{inner}}}")
    return lines


def problem_to_text(pf: ProblemFile) -> str:
    lines = [f"theory {pf.theory}"]
    for sort in pf.sorts:
        lines.append(f"sort {sort.name}")
    for name, order in pf.order_overrides.items():
        lines.append(f"order {name} = {order}")
    for f in pf.signature:
        lines.append(f"{f.name} : {f.type}")
    for rule in pf.rules:
        lines.append(rule_to_text(rule))
    if pf.params is not None and not pf.params.empty:
        lines.append("params {")
        lines.extend("    " + line for line in params_spec_to_lines(pf.params))
        lines.append("}")
    return "\n".join(lines) + "\n"


def params_to_spec(params: HorpoParams,
                   symbols: Sequence[FunctionSymbol]) -> ParamsSpec:
    """Render found parameters back into name-level form (for output)."""
    spec = ParamsSpec()
    classes = params.precedence.equivalence_classes(list(symbols))
    for cl in classes:
        for a, b in zip(cl, cl[1:]):
            spec.equivalent.append((a.name, b.name))
    for upper, lower in zip(classes, classes[1:]):
        if params.precedence.gt(upper[0], lower[0]):
            spec.greater.append((upper[0].name, lower[0].name))
    for f, positions in sorted(params.filter.overrides.items(), key=lambda kv: kv[0].name):
        if positions != ArgumentFilter.full(f):
            spec.filters[f.name] = positions
    return spec
