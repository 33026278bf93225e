"""Expression DAGs over ``x``, ``y`` and constants, plus their parser.

The same tree is evaluated on floats/arrays (pointwise map evaluation), on
:class:`~birkhoffmaps.jets.Jet2` seeds (Taylor expansion) and on exact
rational functions (for the finiteness certificates).

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom (('^' | '**') unary)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Exponents must fold to integer constants.  Named parameters are resolved
from a binding table at parse time; the only function is ``sqrt``.
"""

from __future__ import annotations

import re
from fractions import Fraction

import numpy as np

from .errors import (
    ExpressionError,
    ExpressionSyntaxError,
    JetArithmeticError,
    NonRationalConstruct,
)
from .exact import as_fraction
from .jets import Jet2, JetMap2

__all__ = [
    "Expr",
    "Const",
    "Var",
    "parse_expression",
    "compile_expression",
    "jet_of_expression",
    "sqrt",
]


class Expr:
    """Node of an expression DAG.  Operators build new nodes."""

    def __add__(self, o):
        return _binop("+", self, o)

    def __radd__(self, o):
        return _binop("+", o, self)

    def __sub__(self, o):
        return _binop("-", self, o)

    def __rsub__(self, o):
        return _binop("-", o, self)

    def __mul__(self, o):
        return _binop("*", self, o)

    def __rmul__(self, o):
        return _binop("*", o, self)

    def __truediv__(self, o):
        return _binop("/", self, o)

    def __rtruediv__(self, o):
        return _binop("/", o, self)

    def __neg__(self):
        if isinstance(self, Const):
            return Const(-self.value)
        return Neg(self)

    def __pow__(self, n):
        return Pow(self, int(n))

    def evaluate(self, env, exact=False):
        """Evaluate with ``env`` mapping variable names to values.

        ``exact=True`` feeds constants as :class:`fractions.Fraction`.
        """
        raise NotImplementedError

    def variables(self):
        raise NotImplementedError

    def diff(self, var):
        """Symbolic partial derivative (a new DAG)."""
        raise NotImplementedError

    def source(self):
        """Python/numpy source text of the node (``sqrt`` -> ``np.sqrt``)."""
        raise NotImplementedError


def _wrap(v):
    if isinstance(v, Expr):
        return v
    return Const(as_fraction(v))


def _is(e, v):
    return isinstance(e, Const) and e.value == v


def _binop(op, a, b):
    a, b = _wrap(a), _wrap(b)
    if op == "+":
        if _is(a, 0):
            return b
        if _is(b, 0):
            return a
    elif op == "-":
        if _is(b, 0):
            return a
        if _is(a, 0):
            return -b
    elif op == "*":
        if _is(a, 0) or _is(b, 0):
            return Const(0)
        if _is(a, 1):
            return b
        if _is(b, 1):
            return a
    elif op == "/" and _is(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        if op == "+":
            return Const(a.value + b.value)
        if op == "-":
            return Const(a.value - b.value)
        if op == "*":
            return Const(a.value * b.value)
        if b.value != 0:
            return Const(a.value / b.value)
    return BinOp(op, a, b)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = as_fraction(value)

    def evaluate(self, env, exact=False):
        return self.value if exact else float(self.value)

    def variables(self):
        return set()

    def diff(self, var):
        return Const(0)

    def source(self):
        return repr(float(self.value))

    def __str__(self):
        v = self.value
        return str(v) if v >= 0 else f"({v})"


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def evaluate(self, env, exact=False):
        try:
            return env[self.name]
        except KeyError:
            raise ExpressionError(f"unbound variable {self.name!r}", self) from None

    def variables(self):
        return {self.name}

    def diff(self, var):
        return Const(1 if var == self.name else 0)

    def source(self):
        return self.name

    def __str__(self):
        return self.name


class BinOp(Expr):
    __slots__ = ("op", "a", "b")

    def __init__(self, op, a, b):
        self.op, self.a, self.b = op, a, b

    def evaluate(self, env, exact=False):
        u = self.a.evaluate(env, exact)
        v = self.b.evaluate(env, exact)
        try:
            if self.op == "+":
                return u + v
            if self.op == "-":
                return u - v
            if self.op == "*":
                return u * v
            return u / v
        except (JetArithmeticError, ZeroDivisionError) as exc:
            raise ExpressionError(f"{exc} in sub-expression {self}", self) from exc

    def variables(self):
        return self.a.variables() | self.b.variables()

    def diff(self, var):
        a, b = self.a, self.b
        da, db = a.diff(var), b.diff(var)
        if self.op == "+":
            return da + db
        if self.op == "-":
            return da - db
        if self.op == "*":
            return da * b + a * db
        return (da * b - a * db) / Pow(b, 2)

    def source(self):
        return f"({self.a.source()} {self.op} {self.b.source()})"

    def __str__(self):
        return f"({self.a} {self.op} {self.b})"


class Neg(Expr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def evaluate(self, env, exact=False):
        return -self.a.evaluate(env, exact)

    def variables(self):
        return self.a.variables()

    def diff(self, var):
        return -self.a.diff(var)

    def source(self):
        return f"(-{self.a.source()})"

    def __str__(self):
        return f"(-{self.a})"


class Pow(Expr):
    __slots__ = ("a", "n")

    def __init__(self, a, n):
        self.a, self.n = a, int(n)

    def evaluate(self, env, exact=False):
        u = self.a.evaluate(env, exact)
        try:
            if isinstance(u, (float, np.floating, np.ndarray)) and self.n < 0:
                return 1.0 / u ** (-self.n)
            return u**self.n
        except (JetArithmeticError, ZeroDivisionError) as exc:
            raise ExpressionError(f"{exc} in sub-expression {self}", self) from exc

    def variables(self):
        return self.a.variables()

    def diff(self, var):
        if self.n == 0:
            return Const(0)
        inner = Const(1) if self.n == 1 else Pow(self.a, self.n - 1)
        return Const(self.n) * inner * self.a.diff(var)

    def source(self):
        if self.n < 0:
            return f"(1.0 / {self.a.source()} ** {-self.n})"
        return f"({self.a.source()} ** {self.n})"

    def __str__(self):
        return f"{self.a}^{self.n}" if self.n >= 0 else f"{self.a}^({self.n})"


class Sqrt(Expr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def evaluate(self, env, exact=False):
        u = self.a.evaluate(env, exact)
        if isinstance(u, Jet2):
            try:
                return u.sqrt()
            except JetArithmeticError as exc:
                raise ExpressionError(f"{exc} in sub-expression {self}", self) from exc
        if isinstance(u, (float, int, np.floating, np.ndarray)):
            return np.sqrt(u)
        if isinstance(u, Fraction) and not exact:
            return float(u) ** 0.5
        raise NonRationalConstruct(f"square root is not rational: {self}")

    def variables(self):
        return self.a.variables()

    def diff(self, var):
        return self.a.diff(var) / (Const(2) * self)

    def source(self):
        return f"np.sqrt({self.a.source()})"

    def __str__(self):
        return f"sqrt({self.a})"


def sqrt(e):
    return Sqrt(_wrap(e))


# ----------------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^(),]))"
)


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionSyntaxError("unexpected character", text, pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "op" and val == "**":
            val = "^"
        out.append((kind, val, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    FUNCTIONS = {"sqrt": sqrt}

    def __init__(self, text, variables, bindings):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = set(variables)
        self.bindings = dict(bindings or {})

    def peek(self):
        return self.toks[self.i]

    def take(self, val=None):
        tok = self.toks[self.i]
        if val is not None and tok[1] != val:
            raise ExpressionSyntaxError(f"expected {val!r}, found {tok[1]!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExpressionSyntaxError(f"unexpected token {tok[1]!r}", self.text, tok[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            e = e * rhs if op == "*" else _divide(e, rhs, self)
        return e

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            tok = self.take()
            exponent = self.unary()
            if not isinstance(exponent, Const) or exponent.value.denominator != 1:
                raise NonRationalConstruct(
                    f"exponent must be an integer constant at position {tok[2]}: {self.text!r}"
                )
            n = int(exponent.value)
            if isinstance(base, Const):
                if n < 0 and base.value == 0:
                    raise ExpressionSyntaxError("zero to a negative power", self.text, tok[2])
                return Const(base.value**n)
            return Pow(base, n)
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Const(Fraction(val))
        if kind == "name":
            self.take()
            if self.peek()[1] == "(":
                if val not in self.FUNCTIONS:
                    raise ExpressionSyntaxError(f"unknown function {val!r}", self.text, pos)
                self.take("(")
                arg = self.expr()
                self.take(")")
                return self.FUNCTIONS[val](arg)
            if val in self.variables:
                return Var(val)
            if val in self.bindings:
                return Const(as_fraction(self.bindings[val]))
            raise ExpressionSyntaxError(f"unknown name {val!r}", self.text, pos)
        if val == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        raise ExpressionSyntaxError(f"unexpected token {val!r}", self.text, pos)


def _divide(a, b, parser):
    if isinstance(b, Const) and b.value == 0:
        raise ExpressionSyntaxError("division by literal zero", parser.text, parser.peek()[2])
    return a / b


def parse_expression(text, variables=("x", "y"), bindings=None):
    """Parse ``text`` into an :class:`Expr` over the given variable names."""
    return _Parser(text, variables, bindings).parse()


def compile_expression(expr, args=("x", "y")):
    """Compile a DAG to a numpy-vectorised Python function of ``args``."""
    src = f"lambda {', '.join(args)}: {expr.source()}"
    fn = eval(src, {"np": np, "__builtins__": {}})  # source built from our own nodes only
    fn.__doc__ = str(expr)
    return fn


def jet_of_expression(expr, base, degree):
    """Taylor jet of ``expr`` at ``base`` with seeds ``x = x0 + X, y = y0 + Y``.

    ``expr`` may be a single :class:`Expr` or a pair, in which case a
    :class:`~birkhoffmaps.jets.JetMap2` is returned.
    """
    env = {
        "x": Jet2.variable("x", degree, base),
        "y": Jet2.variable("y", degree, base),
    }
    if isinstance(expr, (tuple, list)):
        return JetMap2(*(_as_jet(e.evaluate(env), degree, base) for e in expr))
    return _as_jet(expr.evaluate(env), degree, base)


def _as_jet(v, degree, base):
    if isinstance(v, Jet2):
        return v
    return Jet2.constant(complex(v), degree, base)
