"""Parser and evaluator for polynomial-fraction expressions.

Grammar: identifiers z1..zn and w, the imaginary unit i, nonnegative integer
literals, operators + - * / ^ (integer exponents), parentheses.  All
coefficients are exact Gaussian rationals; decimal literals are rejected.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import MapParseError, PoleError
from .scalars import CR_I, ComplexRational, Scalar, coerce
from .jets import Jet

# -- syntax tree -------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Const:
    """Programmatic Gaussian-rational literal (not produced by the parser)."""

    value: ComplexRational


@dataclass(frozen=True)
class FloatConst:
    """Programmatic float literal; forces float mode when evaluated."""

    value: complex


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    a: object


@dataclass(frozen=True)
class Add:
    a: object
    b: object


@dataclass(frozen=True)
class Sub:
    a: object
    b: object


@dataclass(frozen=True)
class Mul:
    a: object
    b: object


@dataclass(frozen=True)
class Div:
    a: object
    b: object


@dataclass(frozen=True)
class Pow:
    a: object
    k: int


Expr = object

# -- tokenizer ---------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    k = 0
    while k < len(text):
        ch = text[k]
        if ch == "\n":
            line += 1
            col = 1
            k += 1
            continue
        if ch.isspace():
            col += 1
            k += 1
            continue
        if ch.isdigit():
            start = k
            while k < len(text) and text[k].isdigit():
                k += 1
            if k < len(text) and text[k] == ".":
                raise MapParseError("decimal literals are not allowed; use p/q", line, col)
            tokens.append(_Token("int", text[start:k], line, col))
            col += k - start
            continue
        if ch.isalpha() or ch == "_":
            start = k
            while k < len(text) and (text[k].isalnum() or text[k] == "_"):
                k += 1
            tokens.append(_Token("name", text[start:k], line, col))
            col += k - start
            continue
        if ch in "+-*/^()":
            tokens.append(_Token(ch, ch, line, col))
            col += 1
            k += 1
            continue
        raise MapParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, variables: set[str]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables = variables

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            what = tok.text or "end of input"
            raise MapParseError(f"expected {kind!r}, found {what!r}", tok.line, tok.col)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise MapParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)
        return e

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return Neg(self.unary())
        if self.peek().kind == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind == "^":
            self.advance()
            sign = 1
            while self.peek().kind == "-":
                self.advance()
                sign = -sign
            tok = self.expect("int")
            return Pow(base, sign * int(tok.text))
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return Num(Fraction(int(tok.text)))
        if tok.kind == "name":
            self.advance()
            if tok.text == "i":
                return Imag()
            if tok.text in self.variables:
                return Var(tok.text)
            raise MapParseError(f"unknown identifier {tok.text!r}", tok.line, tok.col)
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        what = tok.text or "end of input"
        raise MapParseError(f"expected a term, found {what!r}", tok.line, tok.col)


def parse_expression(text: str, variables: set[str]) -> Expr:
    """Parse one component expression over the given variable names."""
    return _Parser(text, variables).parse()


# -- evaluation --------------------------------------------------------------


def eval_scalar(expr: Expr, env: dict[str, Scalar], mode: str) -> Scalar:
    """Evaluate an expression to a scalar with the given variable bindings."""
    if isinstance(expr, Num):
        return coerce(ComplexRational.of(expr.value), mode)
    if isinstance(expr, Const):
        return coerce(expr.value, mode)
    if isinstance(expr, FloatConst):
        return complex(expr.value)
    if isinstance(expr, Imag):
        return coerce(CR_I, mode)
    if isinstance(expr, Var):
        return coerce(env[expr.name], mode)
    if isinstance(expr, Neg):
        return -eval_scalar(expr.a, env, mode)
    if isinstance(expr, Add):
        return eval_scalar(expr.a, env, mode) + eval_scalar(expr.b, env, mode)
    if isinstance(expr, Sub):
        return eval_scalar(expr.a, env, mode) - eval_scalar(expr.b, env, mode)
    if isinstance(expr, Mul):
        return eval_scalar(expr.a, env, mode) * eval_scalar(expr.b, env, mode)
    if isinstance(expr, Div):
        denom = eval_scalar(expr.b, env, mode)
        try:
            return eval_scalar(expr.a, env, mode) / denom
        except ZeroDivisionError as exc:
            raise PoleError("denominator vanishes at the evaluation point") from exc
    if isinstance(expr, Pow):
        base = eval_scalar(expr.a, env, mode)
        k = expr.k
        if k < 0:
            try:
                base = coerce(1, mode) / base
            except ZeroDivisionError as exc:
                raise PoleError("denominator vanishes at the evaluation point") from exc
            k = -k
        out = coerce(1, mode)
        for _ in range(k):
            out = out * base
        return out
    raise TypeError(f"unknown expression node {expr!r}")


def eval_jet(expr: Expr, env: dict[str, Jet], n: int, order: int, mode: str) -> Jet:
    """Evaluate an expression to a jet; division uses the geometric series.

    Realizes substitution of jets into a polynomial fraction.  Raises
    SingularSubstitutionError when a denominator has zero constant term.
    """
    if isinstance(expr, Num):
        return Jet.const(ComplexRational.of(expr.value), n, order, mode)
    if isinstance(expr, Const):
        return Jet.const(expr.value, n, order, mode)
    if isinstance(expr, FloatConst):
        return Jet.const(expr.value, n, order, "float")
    if isinstance(expr, Imag):
        return Jet.const(CR_I, n, order, mode)
    if isinstance(expr, Var):
        return env[expr.name]
    if isinstance(expr, Neg):
        return -eval_jet(expr.a, env, n, order, mode)
    if isinstance(expr, Add):
        return eval_jet(expr.a, env, n, order, mode) + eval_jet(expr.b, env, n, order, mode)
    if isinstance(expr, Sub):
        return eval_jet(expr.a, env, n, order, mode) - eval_jet(expr.b, env, n, order, mode)
    if isinstance(expr, Mul):
        return eval_jet(expr.a, env, n, order, mode) * eval_jet(expr.b, env, n, order, mode)
    if isinstance(expr, Div):
        return eval_jet(expr.a, env, n, order, mode) * eval_jet(expr.b, env, n, order, mode).inverse()
    if isinstance(expr, Pow):
        base = eval_jet(expr.a, env, n, order, mode)
        k = expr.k
        if k < 0:
            base = base.inverse()
            k = -k
        out = Jet.const(1, n, order, mode)
        for _ in range(k):
            out = out * base
        return out
    raise TypeError(f"unknown expression node {expr!r}")


def substitute_vars(expr: Expr, bindings: dict[str, Expr]) -> Expr:
    """Syntactic substitution of expressions for variables (map composition)."""
    if isinstance(expr, (Num, Const, FloatConst, Imag)):
        return expr
    if isinstance(expr, Var):
        return bindings.get(expr.name, expr)
    if isinstance(expr, Neg):
        return Neg(substitute_vars(expr.a, bindings))
    if isinstance(expr, Add):
        return Add(substitute_vars(expr.a, bindings), substitute_vars(expr.b, bindings))
    if isinstance(expr, Sub):
        return Sub(substitute_vars(expr.a, bindings), substitute_vars(expr.b, bindings))
    if isinstance(expr, Mul):
        return Mul(substitute_vars(expr.a, bindings), substitute_vars(expr.b, bindings))
    if isinstance(expr, Div):
        return Div(substitute_vars(expr.a, bindings), substitute_vars(expr.b, bindings))
    if isinstance(expr, Pow):
        return Pow(substitute_vars(expr.a, bindings), expr.k)
    raise TypeError(f"unknown expression node {expr!r}")


def expr_mode(expr: Expr) -> str:
    """Exact unless a FloatConst occurs somewhere in the tree."""
    if isinstance(expr, FloatConst):
        return "float"
    if isinstance(expr, (Num, Const, Imag, Var)):
        return "exact"
    if isinstance(expr, Neg):
        return expr_mode(expr.a)
    if isinstance(expr, Pow):
        return expr_mode(expr.a)
    if isinstance(expr, (Add, Sub, Mul, Div)):
        return "exact" if expr_mode(expr.a) == "exact" and expr_mode(expr.b) == "exact" else "float"
    raise TypeError(f"unknown expression node {expr!r}")


def scalar_to_expr(value) -> Expr:
    """Wrap a scalar as a literal node, preserving exactness."""
    if isinstance(value, ComplexRational):
        return Const(value)
    if isinstance(value, (int, Fraction)):
        return Const(ComplexRational.of(value))
    return FloatConst(complex(value))
