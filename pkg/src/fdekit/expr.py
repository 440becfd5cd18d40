"""Closed-form analytic expressions for the data functions.

The input language is a small infix grammar over a single variable ``t``:

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative, binds above unary minus
    atom   := NUMBER | 'pi' | 'e' | 't' | NAME '(' expr ')' | '(' expr ')'

Builtin functions: sin, cos, sinh, cosh, exp, ln, sqrt, abs.  Numbers accept
plain decimal and scientific notation.  Whitespace is insignificant.

Parsed expressions are immutable; evaluation is pure and vectorised over
numpy arrays, at real or complex points.  Complex evaluation uses principal
branches and rejects ``abs``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr",
    "parse",
    "ExprError",
    "ParseError",
    "EvalError",
    "DomainError",
    "OverflowEvalError",
]

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "ln", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}

# exponents larger than this are never treated as integer-literal powers
_MAX_INT_EXPONENT = 512


class ExprError(Exception):
    pass


class ParseError(ExprError):
    """Syntax error with a 0-based character offset."""

    def __init__(self, offset, reason):
        self.offset = offset
        self.reason = reason
        super().__init__(f"syntax error at offset {offset}: {reason}")


class EvalError(ExprError):
    pass


class DomainError(EvalError):
    """Evaluation left the domain of an operation (names the offending node)."""


class OverflowEvalError(EvalError):
    """A non-finite intermediate or final value was produced."""


# --- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    child: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


# --- tokenizer ------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<num>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r"|(?P<ws>\s+)"
)


def _tokenize(src):
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(pos, f"unexpected character {src[pos]!r}")
        if m.lastgroup != "ws":
            toks.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    return toks


# --- parser ---------------------------------------------------------------


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    def _peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def _next(self):
        tok = self._peek()
        if tok is not None:
            self.i += 1
        return tok

    def _offset(self):
        tok = self._peek()
        return tok[2] if tok is not None else len(self.src)

    def parse(self):
        node = self.expr()
        tok = self._peek()
        if tok is not None:
            if tok[1] == ")":
                raise ParseError(tok[2], "unbalanced parenthesis")
            raise ParseError(tok[2], f"unexpected token {tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while True:
            tok = self._peek()
            if tok is not None and tok[1] in ("+", "-"):
                self._next()
                node = BinOp(tok[1], node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            tok = self._peek()
            if tok is not None and tok[1] in ("*", "/"):
                self._next()
                node = BinOp(tok[1], node, self.unary())
            else:
                return node

    def unary(self):
        tok = self._peek()
        if tok is not None and tok[1] == "-":
            self._next()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        tok = self._peek()
        if tok is not None and tok[1] == "^":
            self._next()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self._next()
        if tok is None:
            raise ParseError(len(self.src), "unexpected end of input")
        kind, text, pos = tok
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "t":
                return Var()
            if text in CONSTANTS:
                return Const(text)
            if text in FUNCTIONS:
                nxt = self._peek()
                if nxt is None or nxt[1] != "(":
                    raise ParseError(self._offset(), f"expected '(' after {text!r}")
                self._next()
                arg = self.expr()
                self._expect_close()
                return Call(text, arg)
            raise ParseError(pos, f"unknown identifier {text!r}")
        if text == "(":
            node = self.expr()
            self._expect_close()
            return node
        raise ParseError(pos, f"unexpected token {text!r}")

    def _expect_close(self):
        tok = self._peek()
        if tok is None or tok[1] != ")":
            raise ParseError(self._offset(), "unbalanced parenthesis")
        self._next()


# --- printing -------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _fmt(node):
    """Render a node; returns (text, precedence)."""
    if isinstance(node, Num):
        return repr(node.value), _PREC["atom"]
    if isinstance(node, Const):
        return node.name, _PREC["atom"]
    if isinstance(node, Var):
        return "t", _PREC["atom"]
    if isinstance(node, Call):
        inner, _ = _fmt(node.arg)
        return f"{node.func}({inner})", _PREC["atom"]
    if isinstance(node, Neg):
        text, prec = _fmt(node.child)
        if prec < _PREC["neg"]:
            text = f"({text})"
        return f"-{text}", _PREC["neg"]
    if isinstance(node, BinOp):
        op = node.op
        p = _PREC[op]
        lt, lp = _fmt(node.left)
        rt, rp = _fmt(node.right)
        if op == "^":
            # right associative: parenthesise a non-atomic base
            if lp < _PREC["atom"]:
                lt = f"({lt})"
            if rp < p:
                rt = f"({rt})"
        else:
            if lp < p:
                lt = f"({lt})"
            # parenthesise right children of equal precedence so the
            # reparsed tree is structurally identical (floats do not
            # reassociate)
            if rp <= p:
                rt = f"({rt})"
        return f"{lt}{op}{rt}", p
    raise TypeError(f"not an AST node: {node!r}")


def _node_str(node):
    return _fmt(node)[0]


# --- evaluation -----------------------------------------------------------


def _int_literal_exponent(node):
    """Return the integer value of an integer-literal exponent node, else None."""
    if isinstance(node, Num):
        v = node.value
        if float(v).is_integer() and abs(v) <= _MAX_INT_EXPONENT:
            return int(v)
        return None
    if isinstance(node, Neg):
        inner = _int_literal_exponent(node.child)
        return -inner if inner is not None else None
    return None


def _eval(node, t, cplx):
    if isinstance(node, Num):
        return np.full_like(t, node.value)
    if isinstance(node, Const):
        return np.full_like(t, CONSTANTS[node.name])
    if isinstance(node, Var):
        return t.copy()
    if isinstance(node, Neg):
        return -_eval(node.child, t, cplx)
    if isinstance(node, Call):
        arg = _eval(node.arg, t, cplx)
        return _eval_call(node, arg, cplx)
    if isinstance(node, BinOp):
        left = _eval(node.left, t, cplx)
        op = node.op
        if op == "^":
            return _eval_pow(node, left, t, cplx)
        right = _eval(node.right, t, cplx)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if np.any(right == 0):
                raise DomainError(f"division by zero in '{_node_str(node)}'")
            return left / right
    raise TypeError(f"not an AST node: {node!r}")


def _eval_call(node, arg, cplx):
    fn = node.func
    if fn == "abs":
        if cplx:
            raise DomainError(
                f"'{_node_str(node)}': abs is not supported in complex evaluation"
            )
        return np.abs(arg)
    if fn == "ln":
        if cplx:
            if np.any(arg == 0):
                raise DomainError(f"ln of zero in '{_node_str(node)}'")
        elif np.any(arg <= 0):
            worst = float(np.min(np.real(arg)))
            raise DomainError(
                f"ln of non-positive value ({worst:g}) in '{_node_str(node)}'"
            )
        return np.log(arg)
    if fn == "sqrt":
        if not cplx and np.any(arg < 0):
            worst = float(np.min(np.real(arg)))
            raise DomainError(
                f"sqrt of negative value ({worst:g}) in '{_node_str(node)}'"
            )
        return np.sqrt(arg)
    return getattr(np, fn)(arg)


def _eval_pow(node, base, t, cplx):
    n = _int_literal_exponent(node.right)
    if n is not None:
        if n < 0 and np.any(base == 0):
            raise DomainError(f"zero base with negative exponent in '{_node_str(node)}'")
        return base ** n
    expo = _eval(node.right, t, cplx)
    if cplx:
        if np.any(base == 0):
            raise DomainError(f"zero base in '{_node_str(node)}'")
        return np.exp(expo * np.log(base))
    if np.any(base <= 0):
        worst = float(np.min(np.real(base)))
        raise DomainError(
            f"power with non-positive base ({worst:g}) and non-integer exponent "
            f"in '{_node_str(node)}'"
        )
    return np.power(base, expo)


# --- public wrapper -------------------------------------------------------


@dataclass(frozen=True)
class Expr:
    """A parsed expression; immutable, safe for concurrent evaluation."""

    root: object
    src: str

    def eval_real(self, t):
        """Evaluate at real t (scalar or ndarray).  Rejects non-finite results."""
        arr = np.asarray(t, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if not np.all(np.isfinite(arr)):
            raise DomainError("evaluation point is not finite")
        with np.errstate(all="ignore"):
            out = np.asarray(_eval(self.root, arr, False), dtype=float)
        if not np.all(np.isfinite(out)):
            raise OverflowEvalError(f"non-finite value while evaluating '{self.src}'")
        return float(out[0]) if scalar else out

    def eval_complex(self, z):
        """Evaluate at complex z (scalar or ndarray) using principal branches."""
        arr = np.asarray(z, dtype=complex)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if not np.all(np.isfinite(arr)):
            raise DomainError("evaluation point is not finite")
        with np.errstate(all="ignore"):
            out = np.asarray(_eval(self.root, arr, True), dtype=complex)
        if not np.all(np.isfinite(out)):
            raise OverflowEvalError(f"non-finite value while evaluating '{self.src}'")
        return complex(out[0]) if scalar else out

    def to_string(self):
        """Deterministic printed form; reparsing yields an identical tree."""
        return _node_str(self.root)

    def __str__(self):
        return self.to_string()


def parse(src):
    """Parse an expression string into an Expr.

    Raises ParseError with a 0-based character offset and a one-line reason
    on malformed input.
    """
    if not isinstance(src, str) or src.strip() == "":
        raise ParseError(0, "empty expression")
    root = _Parser(src).parse()
    return Expr(root=root, src=src)
