"""Scenario expression language: tokenizer, recursive-descent parser, printer, compiler.

Grammar, loosest binding first::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?            # right-associative
    atom  := number | 'i' | 'pi' | var | func '(' expr ')' | '(' expr ')'
    var   := ('x' | 'y') digit            # digit in 1..9
    func  := sin | cos | exp | log | sqrt

Compiled expressions evaluate on numpy arrays of points with complex arithmetic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from ..errors import EvalError, ExprSyntaxError, UnknownIdentifierError

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Num:
    text: str

    @property
    def value(self) -> float:
        return float(self.text)


@dataclass(frozen=True)
class ImagUnit:
    pass


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Var:
    prefix: str
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, ImagUnit, Pi, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    pos: int  # 1-based column


def tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if m is None or m.end() == i:
            raise ExprSyntaxError(f"unexpected character {text[i]!r}", i + 1, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(_Token(kind, m.group(kind), start + 1))
        i = m.end()
    tokens.append(_Token("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"{message}, found {found}", tok.pos, self.text)

    def expect(self, text: str):
        if self.tok.kind != "op" or self.tok.text != text:
            self.error(f"expected {text!r}")
        self.advance()

    def parse(self) -> Expr:
        if self.tok.kind == "end":
            self.error("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            self.error("unexpected token")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return Num(tok.text)
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(name, arg)
            if name == "i":
                return ImagUnit()
            if name == "pi":
                return Pi()
            if len(name) == 2 and name[0] in "xy" and name[1] in "123456789":
                return Var(name[0], int(name[1]))
            raise UnknownIdentifierError(f"unknown identifier {name!r}", tok.pos, self.text)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.error("expected an operand")


def parse_expr(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises:
        ExprSyntaxError: with the 1-based position of the offending token.
        UnknownIdentifierError: for identifiers outside the grammar.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression", 1, text if isinstance(text, str) else "")
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    return 5


def to_text(e: Expr) -> str:
    """Print with the minimum parentheses needed to reparse to the same tree."""
    if isinstance(e, Num):
        return e.text
    if isinstance(e, ImagUnit):
        return "i"
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Var):
        return f"{e.prefix}{e.index}"
    if isinstance(e, Call):
        return f"{e.func}({to_text(e.arg)})"
    if isinstance(e, Neg):
        inner = to_text(e.operand)
        return f"-({inner})" if _prec(e.operand) < 3 else f"-{inner}"
    p = _PREC[e.op]
    left, right = to_text(e.left), to_text(e.right)
    if e.op == "^":
        if _prec(e.left) <= 4:
            left = f"({left})"
        if _prec(e.right) < 3:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    sep = f" {e.op} " if p == 1 else e.op
    return f"{left}{sep}{right}"


def variables(e: Expr) -> set[tuple[str, int]]:
    if isinstance(e, Var):
        return {(e.prefix, e.index)}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, Call):
        return variables(e.arg)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    return set()


def is_complex(e: Expr) -> bool:
    """True when the tree mentions the imaginary unit."""
    if isinstance(e, ImagUnit):
        return True
    if isinstance(e, Neg):
        return is_complex(e.operand)
    if isinstance(e, Call):
        return is_complex(e.arg)
    if isinstance(e, BinOp):
        return is_complex(e.left) or is_complex(e.right)
    return False


# ---------------------------------------------------------------------------
# compilation to numpy closures

Compiled = Callable[[np.ndarray], np.ndarray]


def compile_expr(e: Expr, dim: int, prefix: str = "x", real: bool = False) -> Compiled:
    """Compile ``e`` into ``f(P) -> values`` where ``P`` has shape ``(..., dim)``.

    Values are complex128 arrays of shape ``P.shape[:-1]``. With ``real=True``
    the argument checks of ``log``/``sqrt`` follow real analysis.
    """
    for pre, idx in variables(e):
        if pre != prefix:
            raise UnknownIdentifierError(
                f"variable {pre}{idx} not allowed here (chart uses {prefix}1..{prefix}{dim})", 1
            )
        if idx > dim:
            raise UnknownIdentifierError(
                f"variable {pre}{idx} exceeds chart dimension {dim}", 1
            )
    return _compile(e, real)


def _compile(e: Expr, real: bool) -> Compiled:
    if isinstance(e, Num):
        v = complex(e.value)
        return lambda P: np.full(P.shape[:-1], v, dtype=complex)
    if isinstance(e, ImagUnit):
        return lambda P: np.full(P.shape[:-1], 1j, dtype=complex)
    if isinstance(e, Pi):
        return lambda P: np.full(P.shape[:-1], np.pi, dtype=complex)
    if isinstance(e, Var):
        k = e.index - 1
        return lambda P: P[..., k].astype(complex)
    if isinstance(e, Neg):
        f = _compile(e.operand, real)
        return lambda P: -f(P)
    if isinstance(e, Call):
        return _compile_call(e.func, _compile(e.arg, real), real)
    fl, fr = _compile(e.left, real), _compile(e.right, real)
    if e.op == "+":
        return lambda P: fl(P) + fr(P)
    if e.op == "-":
        return lambda P: fl(P) - fr(P)
    if e.op == "*":
        return lambda P: fl(P) * fr(P)
    if e.op == "/":
        def div(P):
            den = fr(P)
            if np.any(den == 0):
                raise EvalError("division by zero")
            return fl(P) / den
        return div
    # power: integer literal exponents stay exact for any base
    if isinstance(e.right, Num) and float(e.right.value).is_integer() and abs(e.right.value) <= 64:
        n = int(e.right.value)

        def ipow(P):
            b = fl(P)
            if n < 0 and np.any(b == 0):
                raise EvalError("zero raised to a negative power")
            return b**n
        return ipow

    def cpow(P):
        b, x = fl(P), fr(P)
        if real and np.any((b.real < 0) & (np.abs(x.imag) == 0) & (x.real != np.round(x.real))):
            raise EvalError("fractional power of a negative number in a real context")
        if np.any((b == 0) & (x.real <= 0)):
            raise EvalError("zero raised to a non-positive power")
        with np.errstate(all="ignore"):
            return np.power(b, x)
    return cpow


def _compile_call(name: str, f: Compiled, real: bool) -> Compiled:
    if name == "sin":
        return lambda P: np.sin(f(P))
    if name == "cos":
        return lambda P: np.cos(f(P))
    if name == "exp":
        return lambda P: np.exp(f(P))
    if name == "log":
        def log(P):
            a = f(P)
            if np.any(a == 0):
                raise EvalError("log of zero")
            if real and np.any(a.real < 0):
                raise EvalError("log of a negative number in a real context")
            return np.log(a)
        return log
    if name == "sqrt":
        def sqrt(P):
            a = f(P)
            if real and np.any(a.real < 0):
                raise EvalError("sqrt of a negative number in a real context")
            return np.sqrt(a)
        return sqrt
    raise UnknownIdentifierError(f"unknown function {name!r}", 1)
