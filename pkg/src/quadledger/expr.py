"""A small expression language for integrands.

Grammar (precedence lowest to highest, recursive descent):

    expression := term   (('+' | '-') term)*          left associative
    term       := unary  (('*' | '/') unary)*         left associative
    unary      := '-' unary | power
    power      := atom ('^' unary)?                   right associative
    atom       := NUMBER | 'x' | 'y' | 'z' | 'pi'
                | ('ln' | 'exp' | 'sqrt' | 'abs') '(' expression ')'
                | '(' expression ')'

Unary minus binds looser than '^', so -2^2 evaluates to -4. Implicit
multiplication is not supported: "2 x" is a parse error. Number literals are
decimal with optional fraction and exponent; 'pi' parses as a numeric
constant. Division by exactly zero is an evaluation error, never infinity;
infinities can arise only from overflow.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Mapping, Sequence, Union


class EvalError(Exception):
    """Base class for expression evaluation failures."""


class UnboundVariable(EvalError):
    """A variable in the expression has no binding."""


class DomainError(EvalError, ValueError):
    """ln of a non-positive value, sqrt of a negative value, or similar."""


class DivisionByZero(EvalError, ZeroDivisionError):
    """The denominator of a division evaluated to exactly zero."""


class ParseError(Exception):
    """Malformed expression text.

    Attributes
    ----------
    position : int
        Byte offset of the first offending token (input length for
        unexpected end of input).
    expected : str or None
        Description of what the parser wanted to see, when known.
    """

    def __init__(self, message: str, position: int, expected: str | None = None) -> None:
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position
        self.expected = expected


class TokenKind(Enum):
    NUMBER = "number"
    IDENTIFIER = "identifier"
    PLUS = "+"
    MINUS = "-"
    STAR = "*"
    SLASH = "/"
    CARET = "^"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    position: int


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # only "neg"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str  # one of ln exp sqrt abs
    arg: "Expr"


Expr = Union[Const, Var, Unary, Binary, Call]

VARIABLES = ("x", "y", "z")
FUNCTIONS = ("ln", "exp", "sqrt", "abs")

_NUMBER_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SINGLE = {
    "+": TokenKind.PLUS,
    "-": TokenKind.MINUS,
    "*": TokenKind.STAR,
    "/": TokenKind.SLASH,
    "^": TokenKind.CARET,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ",": TokenKind.COMMA,
}


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        kind = _SINGLE.get(ch)
        if kind is not None:
            tokens.append(Token(kind, ch, i))
            i += 1
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            tokens.append(Token(TokenKind.NUMBER, m.group(), i))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(Token(TokenKind.IDENTIFIER, m.group(), i))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Token | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, expected: str | None = None) -> ParseError:
        tok = self.peek()
        position = tok.position if tok is not None else len(self.text)
        return ParseError(message, position, expected)

    def expect(self, kind: TokenKind, expected: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind is not kind:
            raise self.error(f"expected {expected}", expected)
        return self.advance()

    def expression(self) -> Expr:
        node = self.term()
        while (tok := self.peek()) is not None and tok.kind in (TokenKind.PLUS, TokenKind.MINUS):
            self.advance()
            node = Binary(tok.text, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (tok := self.peek()) is not None and tok.kind in (TokenKind.STAR, TokenKind.SLASH):
            self.advance()
            node = Binary(tok.text, node, self.unary())
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.MINUS:
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.CARET:
            self.advance()
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input", "an operand")
        if tok.kind is TokenKind.NUMBER:
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError("number literal overflows", tok.position)
            return Const(value)
        if tok.kind is TokenKind.IDENTIFIER:
            self.advance()
            name = tok.text
            if name in VARIABLES:
                return Var(name)
            if name == "pi":
                return Const(math.pi)
            if name in FUNCTIONS:
                self.expect(TokenKind.LPAREN, f"'(' after {name}")
                arg = self.expression()
                self.expect(TokenKind.RPAREN, "')'")
                return Call(name, arg)
            raise ParseError(f"unknown identifier {name!r}", tok.position)
        if tok.kind is TokenKind.LPAREN:
            self.advance()
            node = self.expression()
            self.expect(TokenKind.RPAREN, "')'")
            return node
        raise self.error(f"unexpected token {tok.text!r}", "an operand")


def parse(text: str) -> Expr:
    """Parse expression text into a tree, or raise ParseError."""
    parser = _Parser(text)
    node = parser.expression()
    if parser.peek() is not None:
        raise parser.error("expected operator or end of input")
    return node


# --------------------------------------------------------------------------
# Evaluation. Both the tree walker and compiled closures route through the
# same guarded primitives so their results are bit-identical.
# --------------------------------------------------------------------------

def _guarded_pow(base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0.0:
        raise DivisionByZero(f"0.0 raised to {exponent!r}")
    try:
        return math.pow(base, exponent)
    except OverflowError:
        negative = base < 0.0 and exponent == math.floor(exponent) and math.fmod(exponent, 2.0) != 0.0
        return -math.inf if negative else math.inf
    except ValueError as exc:
        raise DomainError(f"pow({base!r}, {exponent!r}) is undefined for reals") from exc


def _guarded_ln(value: float) -> float:
    if value <= 0.0:
        raise DomainError(f"ln of non-positive value {value!r}")
    return math.log(value)


def _guarded_exp(value: float) -> float:
    try:
        return math.exp(value)
    except OverflowError:
        return math.inf


def _guarded_sqrt(value: float) -> float:
    if value < 0.0:
        raise DomainError(f"sqrt of negative value {value!r}")
    return math.sqrt(value)


def _guarded_div(numerator: float, denominator: float) -> float:
    if denominator == 0.0:
        raise DivisionByZero(f"{numerator!r} / 0.0")
    return numerator / denominator


_CALL_TABLE: dict[str, Callable[[float], float]] = {
    "ln": _guarded_ln,
    "exp": _guarded_exp,
    "sqrt": _guarded_sqrt,
    "abs": abs,
}


def evaluate(expr: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate a tree with the given variable bindings."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        try:
            return float(bindings[expr.name])
        except KeyError:
            raise UnboundVariable(f"variable {expr.name!r} is not bound") from None
    if isinstance(expr, Unary):
        return -evaluate(expr.operand, bindings)
    if isinstance(expr, Binary):
        left = evaluate(expr.left, bindings)
        if expr.op == "^":
            # squaring via multiplication matches the compiled code path
            if isinstance(expr.right, Const) and expr.right.value == 2.0:
                return left * left
            return _guarded_pow(left, evaluate(expr.right, bindings))
        right = evaluate(expr.right, bindings)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        return _guarded_div(left, right)
    return _CALL_TABLE[expr.fn](evaluate(expr.arg, bindings))


def free_variables(expr: Expr) -> frozenset[str]:
    """The set of variable names appearing in the tree."""
    names: set[str] = set()
    stack = [expr]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            names.add(node.name)
        elif isinstance(node, Unary):
            stack.append(node.operand)
        elif isinstance(node, Binary):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Call):
            stack.append(node.arg)
    return frozenset(names)


def substitute(expr: Expr, bindings: Mapping[str, float]) -> Expr:
    """Replace bound variables with numeric constants."""
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Var):
        if expr.name in bindings:
            return Const(float(bindings[expr.name]))
        return expr
    if isinstance(expr, Unary):
        return Unary(expr.op, substitute(expr.operand, bindings))
    if isinstance(expr, Binary):
        return Binary(expr.op, substitute(expr.left, bindings),
                      substitute(expr.right, bindings))
    return Call(expr.fn, substitute(expr.arg, bindings))


def _format_const(value: float) -> str:
    # small integer-valued constants print without the trailing ".0";
    # int() round-trips them exactly below 2**53
    if value.is_integer() and abs(value) < 1e15:
        return repr(int(value))
    return repr(value)


def render(expr: Expr) -> str:
    """Emit fully parenthesized canonical text; parse(render(e)) == e."""
    if isinstance(expr, Const):
        return _format_const(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Unary):
        return f"(-{render(expr.operand)})"
    if isinstance(expr, Binary):
        return f"({render(expr.left)}{expr.op}{render(expr.right)})"
    return f"{expr.fn}({render(expr.arg)})"


def _emit(expr: Expr) -> str:
    if isinstance(expr, Const):
        return repr(expr.value)  # full repr: compiled code must not mix int arithmetic in
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Unary):
        return f"(-{_emit(expr.operand)})"
    if isinstance(expr, Binary):
        if expr.op == "^":
            if isinstance(expr.right, Const) and expr.right.value == 2.0:
                base = _emit(expr.left)
                return f"({base}*{base})"
            return f"_pow({_emit(expr.left)}, {_emit(expr.right)})"
        if expr.op == "/":
            return f"_div({_emit(expr.left)}, {_emit(expr.right)})"
        return f"({_emit(expr.left)}{expr.op}{_emit(expr.right)})"
    return f"_{expr.fn}({_emit(expr.arg)})"


_COMPILE_NAMESPACE = {
    "_pow": _guarded_pow,
    "_div": _guarded_div,
    "_ln": _guarded_ln,
    "_exp": _guarded_exp,
    "_sqrt": _guarded_sqrt,
    "_abs": abs,
    "__builtins__": {},
}


def compile_expr(expr: Expr, parameters: Sequence[str]) -> Callable[..., float]:
    """Compile a tree into a fast positional-argument callable.

    ``parameters`` fixes the argument order; every free variable of the
    expression must appear in it. Evaluation semantics (division by zero,
    domain errors, overflow to infinity) are identical to :func:`evaluate`.
    """
    unknown = free_variables(expr) - set(parameters)
    if unknown:
        raise UnboundVariable(
            f"expression uses {sorted(unknown)} outside parameters {list(parameters)}"
        )
    for name in parameters:
        if name not in VARIABLES:
            raise ValueError(f"parameter {name!r} is not one of {VARIABLES}")
    source = f"lambda {', '.join(parameters)}: {_emit(expr)}"
    return eval(source, dict(_COMPILE_NAMESPACE))  # noqa: S307 - vetted generated source
