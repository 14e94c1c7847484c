"""A small SMT-LIB2 checker for quantifier-free integer/boolean problems.

Reads SMT-LIB2 commands on stdin and answers check-sat with sat, unsat, or
unknown.  Deliberately incomplete: unsatisfiability is certified by
Fourier-Motzkin elimination over the rationals after integer tightening of
strict inequalities (sound for integers), and satisfiability by a bounded
search for an integer model.  Anything it cannot settle is ``unknown``.

This is the default child process behind HORPO_SMT_CMD when no real solver
is installed; installing z3 or cvc5 and pointing HORPO_SMT_CMD at it gives a
complete backend with the same wire protocol.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Union

Sexpr = Union[str, list]

_DNF_CAP = 4096
_FM_ROW_CAP = 20000
_SEARCH_CAP = 400_000


class ShimError(Exception):
    pass


# ---------- S-expression reading ----------


def tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            tokens.append(c)
            i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise ShimError("unterminated quoted symbol")
            tokens.append(text[i:j + 1])
            i = j + 1
        elif c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            tokens.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n();"|':
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def parse_all(text: str) -> list[Sexpr]:
    tokens = tokenize(text)
    pos = 0

    def parse() -> Sexpr:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(parse())
            if pos >= len(tokens):
                raise ShimError("unbalanced parenthesis")
            pos += 1
            return items
        if tok == ")":
            raise ShimError("unexpected )")
        return tok

    exprs = []
    while pos < len(tokens):
        exprs.append(parse())
    return exprs


def unquote(name: str) -> str:
    return name[1:-1] if name.startswith("|") and name.endswith("|") else name


# ---------- Polynomials over integer variables ----------

# A polynomial is a dict from a sorted tuple of variable names (the monomial)
# to a Fraction coefficient; the empty tuple is the constant term.
Poly = dict


def poly_const(c: int) -> Poly:
    return {(): Fraction(c)}


def poly_var(name: str) -> Poly:
    return {(name,): Fraction(1)}


def poly_add(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for mono, coeff in b.items():
        out[mono] = out.get(mono, Fraction(0)) + sign * coeff
        if out[mono] == 0:
            del out[mono]
    return out


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            mono = tuple(sorted(m1 + m2))
            out[mono] = out.get(mono, Fraction(0)) + c1 * c2
            if out[mono] == 0:
                del out[mono]
    return out


def poly_neg(a: Poly) -> Poly:
    return {m: -c for m, c in a.items()}


def poly_is_linear(a: Poly) -> bool:
    return all(len(m) <= 1 for m in a)


def poly_vars(a: Poly) -> set[str]:
    return {v for m in a for v in m}


def poly_eval(a: Poly, env: dict[str, int]) -> Fraction:
    total = Fraction(0)
    for mono, coeff in a.items():
        prod_val = 1
        for v in mono:
            prod_val *= env[v]
        total += coeff * prod_val
    return total


# ---------- Formula normalization ----------

# NNF trees: ("and", [..]) | ("or", [..]) | ("ge0", poly) | ("bool", name, value)
# | ("const", bool).  ("ge0", p) asserts p >= 0 after integer tightening.


class Problem:
    def __init__(self) -> None:
        self.sorts: dict[str, str] = {}
        self.assertions: list[Sexpr] = []
        self.last_model: Optional[dict[str, object]] = None

    def declare(self, name: str, sort: str) -> None:
        self.sorts[unquote(name)] = sort

    def to_poly(self, e: Sexpr) -> Poly:
        if isinstance(e, str):
            name = unquote(e)
            if name.lstrip("-").isdigit():
                return poly_const(int(name))
            if self.sorts.get(name) == "Int":
                return poly_var(name)
            raise ShimError(f"not an integer term: {e}")
        op, *args = e
        polys = [self.to_poly(a) for a in args]
        if op == "+":
            out = polys[0]
            for p in polys[1:]:
                out = poly_add(out, p)
            return out
        if op == "-":
            if len(polys) == 1:
                return poly_neg(polys[0])
            out = polys[0]
            for p in polys[1:]:
                out = poly_add(out, p, sign=-1)
            return out
        if op == "*":
            out = polys[0]
            for p in polys[1:]:
                out = poly_mul(out, p)
            return out
        raise ShimError(f"unsupported integer operator: {op}")

    def _cmp(self, op: str, a: Sexpr, b: Sexpr, negate: bool):
        """A comparison in NNF; >= 0 rows use integer tightening for strictness."""
        if negate:
            flip = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}
            if op in flip:
                return self._cmp(flip[op], a, b, False)
            if op == "=":
                return ("or", [self._cmp("<", a, b, False), self._cmp(">", a, b, False)])
            raise ShimError(f"cannot negate {op}")
        pa, pb = self.to_poly(a), self.to_poly(b)
        diff = poly_add(pa, pb, sign=-1)
        if op == ">=":
            return ("ge0", diff)
        if op == ">":
            return ("ge0", poly_add(diff, poly_const(1), sign=-1))
        if op == "<=":
            return ("ge0", poly_neg(diff))
        if op == "<":
            return ("ge0", poly_add(poly_neg(diff), poly_const(1), sign=-1))
        if op == "=":
            return ("and", [("ge0", diff), ("ge0", poly_neg(diff))])
        raise ShimError(f"unsupported comparison {op}")

    def nnf(self, e: Sexpr, negate: bool = False):
        if isinstance(e, str):
            name = unquote(e)
            if name == "true":
                return ("const", not negate)
            if name == "false":
                return ("const", negate)
            if self.sorts.get(name) == "Bool":
                return ("bool", name, not negate)
            raise ShimError(f"not a boolean atom: {e}")
        op, *args = e
        if op == "not":
            return self.nnf(args[0], not negate)
        if op == "and":
            kids = [self.nnf(a, negate) for a in args]
            return ("or" if negate else "and", kids)
        if op == "or":
            kids = [self.nnf(a, negate) for a in args]
            return ("and" if negate else "or", kids)
        if op == "=>":
            return self.nnf(["or", ["not", args[0]], args[1]], negate)
        if op in ("<", "<=", ">", ">=") or (
            op == "=" and self._is_int_term(args[0])
        ):
            return self._cmp(op, args[0], args[1], negate)
        if op == "=":
            # boolean equality: (a and b) or (not a and not b)
            a, b = args
            expanded = ["or", ["and", a, b], ["and", ["not", a], ["not", b]]]
            return self.nnf(expanded, negate)
        if op == "distinct":
            return self.nnf(["not", ["=", args[0], args[1]]], negate)
        raise ShimError(f"unsupported operator {op}")

    def _is_int_term(self, e: Sexpr) -> bool:
        if isinstance(e, str):
            name = unquote(e)
            return name.lstrip("-").isdigit() or self.sorts.get(name) == "Int"
        return e[0] in ("+", "-", "*")

    # ---------- Solving ----------

    def check_sat(self) -> str:
        try:
            tree = ("and", [self.nnf(a) for a in self.assertions])
            disjuncts = dnf(tree)
        except ShimError:
            return "unknown"
        if disjuncts is None:
            return "unknown"
        any_unknown = False
        for literals in disjuncts:
            status, model = self._solve_conjunction(literals)
            if status == "sat":
                self.last_model = model
                return "sat"
            if status == "unknown":
                any_unknown = True
        return "unknown" if any_unknown else "unsat"

    def _solve_conjunction(self, literals) -> tuple[str, Optional[dict]]:
        bools: dict[str, bool] = {}
        rows: list[Poly] = []
        for lit in literals:
            if lit[0] == "const":
                if not lit[1]:
                    return "unsat", None
            elif lit[0] == "bool":
                _, name, val = lit
                if bools.setdefault(name, val) != val:
                    return "unsat", None
            else:
                rows.append(lit[1])
        linear = all(poly_is_linear(r) for r in rows)
        if linear and fm_infeasible([dict(r) for r in rows]):
            return "unsat", None
        model = self._search_model(rows, bools)
        if model is not None:
            return "sat", model
        return ("unknown", None) if rows else ("sat", dict(bools))

    def _search_model(self, rows: list[Poly], bools: dict[str, bool]):
        int_vars = sorted(set().union(*[poly_vars(r) for r in rows]) if rows else set())
        if not int_vars:
            if all(poly_eval(r, {}) >= 0 for r in rows):
                return dict(bools)
            return None
        radius = {1: 64, 2: 32, 3: 12, 4: 8, 5: 6, 6: 4}.get(len(int_vars))
        if radius is None or (2 * radius + 1) ** len(int_vars) > _SEARCH_CAP:
            return None
        rng = range(-radius, radius + 1)
        for point in product(rng, repeat=len(int_vars)):
            env = dict(zip(int_vars, point))
            if all(poly_eval(r, env) >= 0 for r in rows):
                out: dict[str, object] = dict(bools)
                out.update(env)
                return out
        return None


def dnf(tree) -> Optional[list[list]]:
    """Disjunctive normal form as lists of literals; None when too large."""
    kind = tree[0]
    if kind in ("ge0", "bool", "const"):
        return [[tree]]
    if kind == "and":
        result: list[list] = [[]]
        for kid in tree[1]:
            kid_dnf = dnf(kid)
            if kid_dnf is None:
                return None
            result = [a + b for a in result for b in kid_dnf]
            if len(result) > _DNF_CAP:
                return None
        return result
    if kind == "or":
        result = []
        for kid in tree[1]:
            kid_dnf = dnf(kid)
            if kid_dnf is None:
                return None
            result.extend(kid_dnf)
            if len(result) > _DNF_CAP:
                return None
        return result
    raise ShimError(f"bad tree {kind}")


def fm_infeasible(rows: list[Poly]) -> bool:
    """Fourier-Motzkin elimination: True when the system (each row >= 0) has
    no rational solution.  Rows are linear polynomials."""
    variables = sorted(set().union(*[poly_vars(r) for r in rows]) if rows else set())
    for var in variables:
        key = (var,)
        pos = [r for r in rows if r.get(key, 0) > 0]
        neg = [r for r in rows if r.get(key, 0) < 0]
        rest = [r for r in rows if not r.get(key)]
        combined: list[Poly] = []
        for p in pos:
            for q in neg:
                # p: c1*v + a >= 0 (c1>0), q: -c2*v + b >= 0 (c2>0)
                c1, c2 = p[key], -q[key]
                row = poly_add(
                    {m: c for m, c in p.items() if m != key},
                    {m: c * (c1 / c2) for m, c in q.items() if m != key})
                combined.append(row)
        rows = rest + combined
        if len(rows) > _FM_ROW_CAP:
            return False  # give up; caller treats as not-proved
    return any(r.get((), Fraction(0)) < 0 for r in rows if set(r) <= {()})


# ---------- Command loop ----------


def run(text: str, out) -> None:
    problem = Problem()
    try:
        commands = parse_all(text)
    except ShimError as exc:
        print(f'(error "{exc}")', file=out)
        return
    for cmd in commands:
        if not isinstance(cmd, list) or not cmd:
            continue
        head = cmd[0]
        if head in ("set-logic", "set-option", "set-info"):
            continue
        if head == "declare-const":
            problem.declare(cmd[1], cmd[2])
        elif head == "declare-fun":
            if cmd[2] != []:
                print('(error "only nullary declare-fun is supported")', file=out)
                return
            problem.declare(cmd[1], cmd[3])
        elif head == "assert":
            problem.assertions.append(cmd[1])
        elif head == "check-sat":
            try:
                print(problem.check_sat(), file=out, flush=True)
            except (ShimError, RecursionError):
                print("unknown", file=out, flush=True)
        elif head == "get-model":
            model = problem.last_model or {}
            lines = []
            for name, val in sorted(model.items()):
                if isinstance(val, bool):
                    lines.append(f"  (define-fun {name} () Bool {str(val).lower()})")
                else:
                    rendered = str(val) if val >= 0 else f"(- {-val})"
                    lines.append(f"  (define-fun {name} () Int {rendered})")
            print("(\n" + "\n".join(lines) + "\n)", file=out, flush=True)
        elif head == "reset":
            problem = Problem()
        elif head == "exit":
            return
        else:
            print(f'(error "unsupported command {head}")', file=out)
            return


def main() -> int:
    run(sys.stdin.read(), sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
