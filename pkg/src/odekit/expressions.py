"""Parsing of ODE text into differential-polynomial normal form, and printing.

The accepted grammar (EBNF, also reproduced in the README):

    equation   = expr [ "=" expr ] ;
    expr       = term { ("+" | "-") term } ;
    term       = signed { "*" signed } ;
    signed     = { "+" | "-" } power ;
    power      = atom [ "^" exponent ] ;
    exponent   = integer | "(" integer ")" ;          (* nonnegative *)
    atom       = rational | name | derivative | "(" expr ")" ;
    rational   = integer [ "/" integer ] ;
    derivative = name { "'" } | "D" "(" name "," integer ")" ;

Multiplication is explicit (no juxtaposition), powers are nonnegative
integers, and `lhs = rhs` is read as lhs - rhs.  Only polynomial structure
is accepted; any other function-call syntax is rejected.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .poly import INDEP, Poly, deriv_gen, deriv_order, gen_sort_key

__all__ = [
    "ParseError",
    "SourceExpr",
    "Num",
    "Name",
    "Dx",
    "Neg",
    "Add",
    "Mul",
    "Pow",
    "parse",
    "DiffPoly",
    "to_diff_poly",
    "OdeProblem",
    "ode_problem",
    "format_poly",
    "parse_xy_poly",
]


class ParseError(ValueError):
    """Syntax error with byte offset and the set of tokens that were expected."""

    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(detail)


# -- source expression tree --------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Dx:
    """Derivative marker: order-k derivative of a dependent variable, k >= 0."""
    name: str
    order: int


@dataclass(frozen=True)
class Neg:
    arg: "SourceExpr"


@dataclass(frozen=True)
class Add:
    args: tuple


@dataclass(frozen=True)
class Mul:
    args: tuple


@dataclass(frozen=True)
class Pow:
    base: "SourceExpr"
    exponent: int


SourceExpr = Num | Name | Dx | Neg | Add | Mul | Pow


# -- lexer -------------------------------------------------------------------

_OPS = set("+-*^()=,/")


def _lex(text: str):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            primes = 0
            while j < n and text[j] == "'":
                primes += 1
                j += 1
            toks.append(("name", (name, primes), i))
            i = j
            continue
        if ch in _OPS:
            toks.append((ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(("end", None, n))
    return toks


# -- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _lex(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, message, expected=()):
        raise ParseError(message, self.peek()[2], expected)

    def expect(self, kind, expected_name=None):
        tok = self.peek()
        if tok[0] != kind:
            self.fail("syntax error", (expected_name or kind,))
        return self.next()

    def parse_equation(self):
        left = self.parse_expr()
        if self.peek()[0] == "=":
            self.next()
            right = self.parse_expr()
            left = Add((left, Neg(right)))
        if self.peek()[0] != "end":
            self.fail("syntax error", ("+", "-", "*", "^", "=", "end of input"))
        return left

    def parse_expr(self):
        args = [self.parse_term()]
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            term = self.parse_term()
            args.append(Neg(term) if op == "-" else term)
        return args[0] if len(args) == 1 else Add(tuple(args))

    def parse_term(self):
        args = [self.parse_signed()]
        while self.peek()[0] == "*":
            self.next()
            args.append(self.parse_signed())
        return args[0] if len(args) == 1 else Mul(tuple(args))

    def parse_signed(self):
        negate = False
        while self.peek()[0] in ("+", "-"):
            if self.next()[0] == "-":
                negate = not negate
        node = self.parse_power()
        return Neg(node) if negate else node

    def parse_power(self):
        base = self.parse_atom()
        if self.peek()[0] == "^":
            self.next()
            exponent = self.parse_exponent()
            base = Pow(base, exponent)
        return base

    def parse_exponent(self) -> int:
        parens = False
        if self.peek()[0] == "(":
            self.next()
            parens = True
        tok = self.peek()
        if tok[0] != "int":
            self.fail("syntax error", ("nonnegative integer exponent",))
        value = self.next()[1]
        if parens:
            self.expect(")")
        return value

    def parse_atom(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "int":
            self.next()
            value = Fraction(tok[1])
            if self.peek()[0] == "/":
                self.next()
                den_tok = self.peek()
                if den_tok[0] != "int":
                    self.fail("syntax error", ("integer denominator",))
                self.next()
                if den_tok[1] == 0:
                    raise ParseError("zero denominator", den_tok[2])
                value = value / den_tok[1]
            return Num(value)
        if kind == "name":
            name, primes = tok[1]
            pos = tok[2]
            self.next()
            if primes:
                return Dx(name, primes)
            if self.peek()[0] == "(":
                if name != "D":
                    raise ParseError(f"unknown function {name!r}", pos)
                self.next()
                inner = self.peek()
                if inner[0] != "name" or inner[1][1] != 0:
                    self.fail("syntax error", ("variable name",))
                self.next()
                self.expect(",", "','")
                order_tok = self.peek()
                if order_tok[0] != "int":
                    self.fail("syntax error", ("nonnegative integer order",))
                self.next()
                self.expect(")", "')'")
                return Dx(inner[1][0], order_tok[1])
            return Name(name)
        if kind == "(":
            self.next()
            inner = self.parse_expr()
            self.expect(")", "')'")
            return inner
        self.fail("syntax error", ("number", "name", "'('"))


def parse(text: str) -> SourceExpr:
    """Parse equation text into a source expression tree."""
    return _Parser(text).parse_equation()


# -- conversion to differential-polynomial form --------------------------------

@dataclass
class DiffPoly:
    """A differential polynomial: the canonical equation representation.

    `poly` is over the internal generators (x, y, y', ..., y^(n)); `order`
    is the highest derivative present (>= 1) and `quasi_linear` records
    whether the equation is degree 1 in that top derivative.
    """

    poly: Poly
    order: int
    quasi_linear: bool

    @staticmethod
    def from_poly(p: Poly) -> "DiffPoly":
        if p.is_zero():
            raise ValueError("zero equation")
        order = p.max_deriv_order()
        if order is None or order < 1:
            raise ValueError("not a differential equation: no derivative present")
        for g in p.gens:
            if g != INDEP and deriv_order(g) is None:
                raise ValueError(f"free parameter {g!r} in equation")
        for e in p.terms:
            if any(k < 0 for k in e):
                raise ValueError("non-polynomial")
        top = deriv_gen(order)
        return DiffPoly(p, order, p.degree(top) == 1)

    def top_gen(self) -> str:
        return deriv_gen(self.order)

    def solved_top(self):
        """(numerator, denominator) with y^(n) = numerator / denominator on-shell."""
        if not self.quasi_linear:
            raise ValueError("cannot solve for highest derivative")
        top = self.top_gen()
        den = self.poly.coeff_of(top, 1)
        rest = self.poly.coeff_of(top, 0)
        return -rest, den

    def monomials(self):
        """Terms in canonical (ascending graded-lex) order."""
        return self.poly.sorted_terms()

    def format(self, dep: str = "y", indep: str = "x") -> str:
        return format_poly(self.poly, dep=dep, indep=indep)


def _walk(expr, visit):
    visit(expr)
    if isinstance(expr, Neg):
        _walk(expr.arg, visit)
    elif isinstance(expr, (Add, Mul)):
        for a in expr.args:
            _walk(a, visit)
    elif isinstance(expr, Pow):
        _walk(expr.base, visit)


def _analyze_names(expr, params):
    dep_names = set()
    bare_names = set()

    def visit(node):
        if isinstance(node, Dx):
            dep_names.add(node.name)
        elif isinstance(node, Name):
            bare_names.add(node.name)

    _walk(expr, visit)
    dep_names -= set(params)
    if len(dep_names) > 1:
        raise ValueError(
            "multiple dependent variables: " + ", ".join(sorted(dep_names))
        )
    if not dep_names:
        raise ValueError("not a differential equation: no derivative present")
    dep = dep_names.pop()
    others = bare_names - {dep} - set(params)
    if len(others) > 1:
        raise ValueError("unknown symbols: " + ", ".join(sorted(others)))
    if others:
        indep = others.pop()
    else:
        indep = "x" if dep != "x" else "t"
    return dep, indep


def _build_poly(expr, dep, indep, params) -> Poly:
    if isinstance(expr, Num):
        return Poly.const(expr.value)
    if isinstance(expr, Name):
        if expr.name in params:
            return Poly.const(params[expr.name])
        if expr.name == dep:
            return Poly.gen(deriv_gen(0))
        if expr.name == indep:
            return Poly.gen(INDEP)
        raise ValueError(f"unknown symbol {expr.name!r}")
    if isinstance(expr, Dx):
        if expr.name != dep:
            raise ValueError(f"derivative of non-dependent symbol {expr.name!r}")
        return Poly.gen(deriv_gen(expr.order))
    if isinstance(expr, Neg):
        return -_build_poly(expr.arg, dep, indep, params)
    if isinstance(expr, Add):
        out = Poly.zero()
        for a in expr.args:
            out = out + _build_poly(a, dep, indep, params)
        return out
    if isinstance(expr, Mul):
        out = Poly.one()
        for a in expr.args:
            out = out * _build_poly(a, dep, indep, params)
        return out
    if isinstance(expr, Pow):
        return _build_poly(expr.base, dep, indep, params) ** expr.exponent
    raise TypeError(f"unexpected node {expr!r}")


def to_diff_poly(expr: SourceExpr | str, params: dict | None = None) -> DiffPoly:
    """Expand a parsed expression into fully collected normal form."""
    if isinstance(expr, str):
        expr = parse(expr)
    params = {k: Fraction(v) for k, v in (params or {}).items()}
    dep, indep = _analyze_names(expr, params)
    poly = _build_poly(expr, dep, indep, params)
    if poly.is_zero():
        raise ValueError("zero equation")
    return DiffPoly.from_poly(poly)


@dataclass
class OdeProblem:
    """A parsed equation plus its source text and display variable names."""

    equation: DiffPoly
    source: str = ""
    indep: str = "x"
    dep: str = "y"
    parameters: dict = field(default_factory=dict)

    def format(self) -> str:
        return self.equation.format(dep=self.dep, indep=self.indep)


def ode_problem(text: str, params: dict | None = None) -> OdeProblem:
    params = {k: Fraction(v) for k, v in (params or {}).items()}
    expr = parse(text)
    dep, indep = _analyze_names(expr, params)
    poly = _build_poly(expr, dep, indep, params)
    if poly.is_zero():
        raise ValueError("zero equation")
    return OdeProblem(DiffPoly.from_poly(poly), text, indep, dep, params)


# -- canonical printing --------------------------------------------------------

def _display_gen(g: str, dep: str, indep: str) -> str:
    if g == INDEP:
        return indep
    k = deriv_order(g)
    if k is None:
        return g
    if k <= 3:
        return dep + "'" * k
    return f"D({dep},{k})"


def format_poly(p: Poly, dep: str = "y", indep: str = "x") -> str:
    """Deterministic canonical string, terms ascending by graded-lex key."""
    if p.is_zero():
        return "0"
    pieces = []
    for exps, coeff in p.sorted_terms():
        factors = []
        for g, e in zip(p.gens, exps):
            if e == 0:
                continue
            name = _display_gen(g, dep, indep)
            factors.append(name if e == 1 else f"{name}^{e}")
        mono = "*".join(factors)
        mag = abs(coeff)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        pieces.append((coeff < 0, body))
    out = []
    for i, (neg, body) in enumerate(pieces):
        if i == 0:
            out.append("-" + body if neg else body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def parse_xy_poly(text: str, dep: str = "y", indep: str = "x") -> Poly:
    """Parse a polynomial in the plane variables only (vector field components)."""
    expr = parse(text)

    def visit(node):
        if isinstance(node, Dx) and node.order > 0:
            raise ValueError("derivatives are not allowed in vector field components")

    _walk(expr, visit)
    return _build_poly(expr, dep, indep, {})
