"""Simple types, curried terms, substitutions, and term enumeration.

Terms are applicative and lambda-free: a term is a typed variable, a typed
function symbol, or an application of one term to another.  Every term
decomposes uniquely into a head (a variable or a symbol) applied to a spine
of arguments, and the ordering relations are stated in terms of that spine.

Term size is node count: variables, symbols, and application nodes each
count one.  All values here are immutable after construction, so they can be
shared freely between threads and memo tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterator, Mapping, Optional, Sequence


class TermError(ValueError):
    """An ill-formed sort, type, symbol, term, or substitution."""


# ---------- Sorts and simple types ----------


@dataclass(frozen=True)
class Sort:
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise TermError("sort name must be nonempty")

    def __str__(self) -> str:
        return self.name


class SimpleType:
    """Base class for simple types; instances are Base or Arrow."""

    @property
    def argument_types(self) -> tuple["SimpleType", ...]:
        """The full list sigma_1..sigma_m when self = sigma_1 => .. => sigma_m => iota."""
        raise NotImplementedError

    @property
    def result_sort(self) -> Sort:
        raise NotImplementedError

    @property
    def arity(self) -> int:
        return len(self.argument_types)

    @property
    def is_base(self) -> bool:
        return isinstance(self, Base)


@dataclass(frozen=True)
class Base(SimpleType):
    sort: Sort

    @property
    def argument_types(self) -> tuple[SimpleType, ...]:
        return ()

    @property
    def result_sort(self) -> Sort:
        return self.sort

    def __str__(self) -> str:
        return self.sort.name


@dataclass(frozen=True)
class Arrow(SimpleType):
    domain: SimpleType
    codomain: SimpleType

    @cached_property
    def argument_types(self) -> tuple[SimpleType, ...]:  # type: ignore[override]
        return (self.domain,) + self.codomain.argument_types

    @property
    def result_sort(self) -> Sort:
        return self.codomain.result_sort

    def __str__(self) -> str:
        dom = str(self.domain)
        if isinstance(self.domain, Arrow):
            dom = f"({dom})"
        return f"{dom} -> {self.codomain}"


def arrow(*types: SimpleType) -> SimpleType:
    """Right-associated arrow type over the given components."""
    if not types:
        raise TermError("arrow() needs at least one type")
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


@dataclass(frozen=True)
class TypeStructure:
    """A simple type with all sorts identified: only the arity skeleton remains."""

    args: tuple["TypeStructure", ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        if not self.args:
            return "*"
        return "(" + " ".join(str(a) for a in self.args) + ") -> *"


def collapse(t: SimpleType) -> TypeStructure:
    """Collapse a simple type to its structure by identifying all sorts."""
    return TypeStructure(tuple(collapse(a) for a in t.argument_types))


# ---------- Function symbols ----------


class SymbolKind(Enum):
    PLAIN = "plain"
    THEORY = "theory"
    VALUE = "value"


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    type: SimpleType
    kind: SymbolKind = SymbolKind.PLAIN

    def __post_init__(self) -> None:
        if not self.name:
            raise TermError("symbol name must be nonempty")
        if self.kind is SymbolKind.VALUE and not self.type.is_base:
            raise TermError(f"value symbol {self.name} must have base type")

    @property
    def max_arity(self) -> int:
        return self.type.arity

    @property
    def is_theory(self) -> bool:
        """Theory and value symbols both belong to the theory signature."""
        return self.kind is not SymbolKind.PLAIN

    @property
    def is_value(self) -> bool:
        return self.kind is SymbolKind.VALUE

    def __str__(self) -> str:
        return self.name


# ---------- Terms ----------


class Term:
    """A curried simply-typed term.  Subclasses: Var, Sym, App, Hole."""

    @property
    def type(self) -> SimpleType:
        raise NotImplementedError

    @cached_property
    def structure(self) -> TypeStructure:
        return collapse(self.type)

    @cached_property
    def size(self) -> int:
        """Node count: variables, symbols, and applications each count one."""
        if isinstance(self, App):
            return self.fun.size + self.arg.size + 1
        return 1

    @cached_property
    def spine(self) -> tuple["Term", tuple["Term", ...]]:
        """Unique decomposition head + argument list; head is never an App."""
        if isinstance(self, App):
            head, args = self.fun.spine
            return head, args + (self.arg,)
        return self, ()

    def iter_subterms(self) -> Iterator["Term"]:
        yield self
        if isinstance(self, App):
            yield from self.fun.iter_subterms()
            yield from self.arg.iter_subterms()

    def variables(self) -> frozenset["Var"]:
        return frozenset(t for t in self.iter_subterms() if isinstance(t, Var))

    def symbols(self) -> Iterator[FunctionSymbol]:
        for t in self.iter_subterms():
            if isinstance(t, Sym):
                yield t.symbol

    def __str__(self) -> str:
        head, args = self.spine
        if not args:
            return self._atom_str()
        parts = [head._atom_str()]
        for a in args:
            s = str(a)
            parts.append(f"({s})" if isinstance(a, App) else s)
        return " ".join(parts)

    def _atom_str(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Var(Term):
    name: str
    var_type: SimpleType

    @property
    def type(self) -> SimpleType:
        return self.var_type

    def _atom_str(self) -> str:
        return self.name


@dataclass(frozen=True)
class Sym(Term):
    symbol: FunctionSymbol

    @property
    def type(self) -> SimpleType:
        return self.symbol.type

    def _atom_str(self) -> str:
        return self.symbol.name


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term

    def __post_init__(self) -> None:
        ft = self.fun.type
        if not isinstance(ft, Arrow):
            raise TermError(f"cannot apply non-arrow term: ({self.fun}) : {ft}")
        if ft.domain != self.arg.type:
            raise TermError(
                f"argument type mismatch: ({self.fun}) expects {ft.domain}, "
                f"got ({self.arg}) : {self.arg.type}"
            )

    @property
    def type(self) -> SimpleType:
        return self.fun.type.codomain  # type: ignore[union-attr]

    def _atom_str(self) -> str:
        return f"({self})"


@dataclass(frozen=True)
class Hole(Term):
    """The single hole of a context.  Never occurs in ordinary terms."""

    hole_type: SimpleType

    @property
    def type(self) -> SimpleType:
        return self.hole_type

    def _atom_str(self) -> str:
        return "[]"


def app(head: Term, *args: Term) -> Term:
    """Apply head to args left to right; the inverse of Term.spine."""
    result = head
    for a in args:
        result = App(result, a)
    return result


def sym(symbol: FunctionSymbol) -> Term:
    return Sym(symbol)


def is_theory_term(term: Term) -> bool:
    """True when every symbol occurring in the term is a theory or value symbol."""
    return all(f.is_theory for f in term.symbols())


def is_ground(term: Term) -> bool:
    return not term.variables()


# ---------- Substitutions ----------


class Substitution:
    """A type-preserving finite map from variables to terms."""

    def __init__(self, binding: Mapping[Var, Term]):
        for var, term in binding.items():
            if not isinstance(var, Var):
                raise TermError(f"substitution domain must be variables, got {var!r}")
            if var.type != term.type:
                raise TermError(
                    f"substitution is not type-preserving on {var.name}: "
                    f"{var.type} vs {term.type}"
                )
        self._binding = dict(binding)

    @property
    def domain(self) -> frozenset[Var]:
        return frozenset(self._binding)

    def get(self, var: Var) -> Term:
        return self._binding.get(var, var)

    def apply(self, term: Term) -> Term:
        if isinstance(term, Var):
            return self._binding.get(term, term)
        if isinstance(term, App):
            return App(self.apply(term.fun), self.apply(term.arg))
        return term

    def items(self):
        return self._binding.items()

    def __repr__(self) -> str:
        inner = ", ".join(f"{v.name} -> {t}" for v, t in sorted(
            self._binding.items(), key=lambda kv: kv[0].name))
        return "{" + inner + "}"


# ---------- Contexts ----------


class Context:
    """A term with exactly one hole; plugging preserves well-typedness."""

    def __init__(self, term_with_hole: Term):
        holes = [t for t in term_with_hole.iter_subterms() if isinstance(t, Hole)]
        if len(holes) != 1:
            raise TermError(f"context must contain exactly one hole, found {len(holes)}")
        self.term = term_with_hole
        self.hole_type = holes[0].type

    def plug(self, term: Term) -> Term:
        if term.type != self.hole_type:
            raise TermError(
                f"cannot plug ({term}) : {term.type} into hole of type {self.hole_type}")

        def go(t: Term) -> Term:
            if isinstance(t, Hole):
                return term
            if isinstance(t, App):
                return App(go(t.fun), go(t.arg))
            return t

        return go(self.term)


# ---------- Signatures ----------


class Signature:
    """An explicit, finite list of declared function symbols.

    The underlying theory permits infinitely many symbols as long as the
    maximal arity within each precedence class stays bounded; the artifact
    works with an explicit declaration list (value symbols for literals are
    created on demand outside the signature).
    """

    def __init__(self, symbols: Sequence[FunctionSymbol] = ()):
        self._symbols: list[FunctionSymbol] = []
        self._by_name: dict[str, FunctionSymbol] = {}
        for f in symbols:
            self.add(f)

    def add(self, f: FunctionSymbol) -> None:
        if f.name in self._by_name:
            raise TermError(f"duplicate symbol declaration: {f.name}")
        self._symbols.append(f)
        self._by_name[f.name] = f

    def get(self, name: str) -> Optional[FunctionSymbol]:
        return self._by_name.get(name)

    def __iter__(self) -> Iterator[FunctionSymbol]:
        return iter(self._symbols)

    def __contains__(self, f: FunctionSymbol) -> bool:
        return self._by_name.get(f.name) == f

    def __len__(self) -> int:
        return len(self._symbols)

    def occurring_types(self) -> list[SimpleType]:
        """All types occurring in declared symbol types, in first-occurrence
        order: each declared type together with its domains and codomains,
        recursively."""
        seen: list[SimpleType] = []

        def visit(t: SimpleType) -> None:
            if t not in seen:
                seen.append(t)
            if isinstance(t, Arrow):
                visit(t.domain)
                visit(t.codomain)

        for f in self._symbols:
            visit(f.type)
        return seen


_POOL_LETTERS = "xyzuwv"


def default_variable_pool(signature: Signature, per_type: int = 2) -> tuple[Var, ...]:
    """A fixed pool of fresh variables: per_type variables for each distinct
    type occurring in the signature."""
    pool: list[Var] = []
    for k, t in enumerate(signature.occurring_types()):
        letter = _POOL_LETTERS[k] if k < len(_POOL_LETTERS) else f"v{k}_"
        for j in range(1, per_type + 1):
            pool.append(Var(f"{letter}{j}", t))
    return tuple(pool)


class UniverseCapExceeded(RuntimeError):
    """Raised when term enumeration would exceed the configured cap."""


def enumerate_terms(
    signature: Signature,
    max_size: int,
    type: SimpleType,
    variables: Optional[Sequence[Var]] = None,
    max_terms: Optional[int] = None,
) -> list[Term]:
    """All well-typed terms of the given type with at most max_size nodes.

    Atoms are the declared symbols plus a variable pool (the default pool has
    two variables per distinct type occurring in the signature).  The result
    is deterministic: ordered by size, then by construction order.
    """
    if max_size < 1:
        raise TermError("max_size must be at least 1")
    pool = tuple(variables) if variables is not None else default_variable_pool(signature)
    atoms: list[Term] = [Sym(f) for f in signature] + list(pool)

    # Every subterm type is a type-subterm of an atom type or of the request.
    types: list[SimpleType] = []

    def visit(t: SimpleType) -> None:
        if t not in types:
            types.append(t)
        if isinstance(t, Arrow):
            visit(t.domain)
            visit(t.codomain)

    for a in atoms:
        visit(a.type)
    visit(type)

    arrows_to: dict[SimpleType, list[Arrow]] = {}
    for t in types:
        if isinstance(t, Arrow):
            arrows_to.setdefault(t.codomain, []).append(t)

    memo: dict[tuple[SimpleType, int], list[Term]] = {}

    def terms_of(t: SimpleType, size: int) -> list[Term]:
        key = (t, size)
        if key in memo:
            return memo[key]
        out: list[Term] = []
        if size == 1:
            out = [a for a in atoms if a.type == t]
        elif size >= 3:
            for at in arrows_to.get(t, ()):
                for fun_size in range(1, size - 1):
                    arg_size = size - 1 - fun_size
                    for fun in terms_of(at, fun_size):
                        for arg in terms_of(at.domain, arg_size):
                            out.append(App(fun, arg))
        memo[key] = out
        return out

    result: list[Term] = []
    for size in range(1, max_size + 1):
        result.extend(terms_of(type, size))
        if max_terms is not None and len(result) > max_terms:
            raise UniverseCapExceeded(
                f"universe exceeds cap of {max_terms} terms at size {size}")
    return result
