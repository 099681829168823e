"""Complex-valued potential expressions q(x).

Grammar
-------
    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, binds above unary minus
    atom   := NUMBER | 'i' | 'pi' | 'e' | 'x'
            | ('exp'|'log'|'sqrt'|'sin'|'cos') '(' expr ')'
            | '(' expr ')'

Exponents of '^' must be constants (no 'x'); they are folded to a single
complex number at parse time.  Exponentials of x go through exp(...).

All multivalued operations (sqrt, log, non-integer powers) use the
principal branch with arg in (-pi, pi]; an imaginary part that is exactly
-0.0 is pinned to +0.0 first so that negative reals sit on the upper edge
of the cut.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import DivisionByZero, DomainError, ParseError

FUNC_NAMES = ("exp", "log", "sqrt", "sin", "cos")

_CONST_NAMES = {"i": 1j, "pi": complex(np.pi), "e": complex(np.e)}


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

class ExprNode:
    """Immutable expression tree node."""

    __slots__ = ()

    def __str__(self):
        return format_expr(self)

    def __repr__(self):
        return f"{type(self).__name__}({format_expr(self)!r})"


@dataclass(frozen=True, repr=False)
class Const(ExprNode):
    value: complex


@dataclass(frozen=True, repr=False)
class Var(ExprNode):
    pass


@dataclass(frozen=True, repr=False)
class Neg(ExprNode):
    child: ExprNode


@dataclass(frozen=True, repr=False)
class Add(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True, repr=False)
class Sub(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True, repr=False)
class Mul(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True, repr=False)
class Div(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True, repr=False)
class Pow(ExprNode):
    base: ExprNode
    exponent: complex


@dataclass(frozen=True, repr=False)
class Func(ExprNode):
    name: str
    child: ExprNode


# ---------------------------------------------------------------------------
# Branch-aware primitives (shared by the tree walker and compiled closures)
# ---------------------------------------------------------------------------

def _canon(z):
    """Pin -0.0 imaginary parts to +0.0 so arg(negative reals) = +pi."""
    z = np.asarray(z, dtype=complex)
    return np.where(z.imag == 0.0, z.real + 0j, z)


def _sqrt(z):
    return np.sqrt(_canon(z))


def _log(z):
    z = _canon(z)
    if np.any(z == 0):
        raise DomainError("log of 0")
    return np.log(z)


def _exp(z):
    return np.exp(np.asarray(z, dtype=complex))


def _sin(z):
    return np.sin(np.asarray(z, dtype=complex))


def _cos(z):
    return np.cos(np.asarray(z, dtype=complex))


def _div(a, b):
    b = np.asarray(b, dtype=complex)
    if np.any(b == 0):
        xs = np.asarray(a, dtype=complex)
        raise DivisionByZero(None if xs.shape == b.shape else None)
    return np.asarray(a, dtype=complex) / b


def _pow(base, c):
    base = _canon(base)
    if c.imag == 0.0 and float(c.real).is_integer():
        n = int(c.real)
        if n < 0 and np.any(base == 0):
            raise DivisionByZero(None)
        return base ** n
    zero = base == 0
    if np.any(zero):
        if c.real > 0:
            out = np.where(zero, 0j, base)
            return np.where(zero, 0j, out ** c)
        raise DomainError(f"0 raised to non-positive power {c}")
    return base ** c


_NAMESPACE = {
    "_sqrt": _sqrt, "_log": _log, "_exp": _exp, "_sin": _sin, "_cos": _cos,
    "_div": _div, "_pow": _pow,
}

_FUNC_IMPL = {"exp": _exp, "log": _log, "sqrt": _sqrt, "sin": _sin, "cos": _cos}


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            at = len(text) - len(stripped)
            raise ParseError(at, "a number, name, operator or parenthesis")
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, op):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ParseError(off, f"'{op}'")
        return self.advance()

    def parse(self):
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(off, "end of input or an operator")
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                node = Add(node, rhs) if val == "+" else Sub(node, rhs)
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.unary()
                node = Mul(node, rhs) if val == "*" else Div(node, rhs)
            else:
                return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            _, _, exp_off = self.peek()
            exponent = self.unary()
            if _contains_var(exponent):
                raise ParseError(exp_off, "a constant exponent (no 'x')")
            try:
                c = evaluate(exponent, 0j)
            except (DomainError, DivisionByZero) as err:
                raise ParseError(exp_off, f"an evaluable constant exponent ({err})")
            return Pow(base, c)
        return base

    def atom(self):
        kind, val, off = self.advance()
        if kind == "num":
            return Const(complex(float(val)))
        if kind == "name":
            if val == "x":
                return Var()
            if val in _CONST_NAMES:
                return Const(_CONST_NAMES[val])
            if val in FUNC_NAMES:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Func(val, arg)
            raise ParseError(off, f"'x', a constant, or one of {', '.join(FUNC_NAMES)}")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(off, "a number, name, '-' or '('")


def _contains_var(node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Const,)):
        return False
    if isinstance(node, Neg):
        return _contains_var(node.child)
    if isinstance(node, Func):
        return _contains_var(node.child)
    if isinstance(node, Pow):
        return _contains_var(node.base)
    return _contains_var(node.left) or _contains_var(node.right)


def parse(text: str) -> ExprNode:
    """Parse an expression string into an AST."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(node: ExprNode, x) -> complex:
    """Tree-walking reference evaluation at a single point x."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return complex(x)
    if isinstance(node, Neg):
        return -evaluate(node.child, x)
    if isinstance(node, Add):
        return evaluate(node.left, x) + evaluate(node.right, x)
    if isinstance(node, Sub):
        return evaluate(node.left, x) - evaluate(node.right, x)
    if isinstance(node, Mul):
        return evaluate(node.left, x) * evaluate(node.right, x)
    if isinstance(node, Div):
        denom = evaluate(node.right, x)
        if denom == 0:
            raise DivisionByZero(x)
        return evaluate(node.left, x) / denom
    if isinstance(node, Pow):
        return complex(_pow(evaluate(node.base, x), node.exponent))
    if isinstance(node, Func):
        return complex(_FUNC_IMPL[node.name](evaluate(node.child, x)))
    raise TypeError(f"not an ExprNode: {node!r}")


def _fmt_const(c: complex) -> str:
    re_, im = c.real, c.imag
    if im == 0.0:
        return repr(re_) if re_ >= 0 else f"(-{re_ * -1!r})"
    if re_ == 0.0:
        if im == 1.0:
            return "i"
        if im == -1.0:
            return "(-i)"
        return f"({im!r}*i)" if im >= 0 else f"(-{-im!r}*i)"
    sign = "+" if im >= 0 else "-"
    return f"({re_!r}{sign}{abs(im)!r}*i)"


def format_expr(node: ExprNode) -> str:
    """Print an AST back into grammar text (round-trip parseable)."""
    if isinstance(node, Const):
        return _fmt_const(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{format_expr(node.child)})"
    if isinstance(node, Add):
        return f"({format_expr(node.left)}+{format_expr(node.right)})"
    if isinstance(node, Sub):
        return f"({format_expr(node.left)}-{format_expr(node.right)})"
    if isinstance(node, Mul):
        return f"({format_expr(node.left)}*{format_expr(node.right)})"
    if isinstance(node, Div):
        return f"({format_expr(node.left)}/{format_expr(node.right)})"
    if isinstance(node, Pow):
        return f"{format_expr(node.base)}^{_fmt_const(node.exponent)}"
    if isinstance(node, Func):
        return f"{node.name}({format_expr(node.child)})"
    raise TypeError(f"not an ExprNode: {node!r}")


def to_python(node: ExprNode) -> str:
    """Render an AST as a Python expression over the helper namespace."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{to_python(node.child)})"
    if isinstance(node, Add):
        return f"({to_python(node.left)}+{to_python(node.right)})"
    if isinstance(node, Sub):
        return f"({to_python(node.left)}-{to_python(node.right)})"
    if isinstance(node, Mul):
        return f"({to_python(node.left)}*{to_python(node.right)})"
    if isinstance(node, Div):
        return f"_div({to_python(node.left)},{to_python(node.right)})"
    if isinstance(node, Pow):
        return f"_pow({to_python(node.base)},{node.exponent!r})"
    if isinstance(node, Func):
        return f"_{node.name}({to_python(node.child)})"
    raise TypeError(f"not an ExprNode: {node!r}")


def compile_fn(node: ExprNode):
    """Compile an AST to a vectorized callable.

    The result accepts scalars (returns complex) or numpy arrays (returns
    a complex128 array) and agrees with evaluate() pointwise.
    """
    source = f"lambda x: {to_python(node)}"
    raw = eval(source, dict(_NAMESPACE))  # closed namespace, no builtins needed
    const = not _contains_var(node)

    def fn(x):
        r = raw(x)
        if np.ndim(x) == 0:
            return complex(r)
        if const:
            return np.full(np.shape(x), complex(r), dtype=complex)
        return np.asarray(r, dtype=complex)

    fn.source = source
    return fn


# ---------------------------------------------------------------------------
# Symbolic differentiation
# ---------------------------------------------------------------------------

def differentiate(node: ExprNode) -> ExprNode:
    """d/dx as a new AST.  No simplification beyond dropping trivial factors."""
    if isinstance(node, Const):
        return Const(0j)
    if isinstance(node, Var):
        return Const(1 + 0j)
    if isinstance(node, Neg):
        return Neg(differentiate(node.child))
    if isinstance(node, Add):
        return Add(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Sub):
        return Sub(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Mul):
        return Add(
            Mul(differentiate(node.left), node.right),
            Mul(node.left, differentiate(node.right)),
        )
    if isinstance(node, Div):
        num = Sub(
            Mul(differentiate(node.left), node.right),
            Mul(node.left, differentiate(node.right)),
        )
        return Div(num, Pow(node.right, 2 + 0j))
    if isinstance(node, Pow):
        c = node.exponent
        if c == 0:
            return Const(0j)
        du = differentiate(node.base)
        if c == 1:
            return du
        return Mul(Mul(Const(c), Pow(node.base, c - 1)), du)
    if isinstance(node, Func):
        du = differentiate(node.child)
        u = node.child
        if node.name == "exp":
            return Mul(Func("exp", u), du)
        if node.name == "log":
            return Div(du, u)
        if node.name == "sqrt":
            return Div(du, Mul(Const(2 + 0j), Func("sqrt", u)))
        if node.name == "sin":
            return Mul(Func("cos", u), du)
        if node.name == "cos":
            return Neg(Mul(Func("sin", u), du))
    raise TypeError(f"not an ExprNode: {node!r}")
