"""Exact univariate rational functions ``f = P/Q`` in the variable ``y``."""

from __future__ import annotations

from fractions import Fraction

from .errors import ExpressionError, NonRationalConstruct
from .exact import (
    as_fraction,
    poly_add,
    poly_deriv,
    poly_divmod,
    poly_eval,
    poly_gcd,
    poly_is_zero,
    poly_mul,
    poly_scale,
    poly_sub,
    poly_trim,
)
from .expr import Const, Expr, Var, parse_expression

__all__ = ["RationalFunction", "parse_rational", "map_degree"]


class RationalFunction:
    """Reduced pair ``(P, Q)`` of ascending coefficient lists; ``Q`` monic."""

    __slots__ = ("P", "Q")

    def __init__(self, P, Q=(1,)):
        P, Q = poly_trim(P), poly_trim(Q)
        if poly_is_zero(Q):
            raise ZeroDivisionError("denominator is identically zero")
        if poly_is_zero(P):
            P, Q = [Fraction(0)], [Fraction(1)]
        else:
            g = poly_gcd(P, Q)
            if len(g) > 1:
                P = poly_divmod(P, g)[0]
                Q = poly_divmod(Q, g)[0]
            lead = Q[-1]
            P, Q = poly_scale(P, 1 / lead), poly_scale(Q, 1 / lead)
        self.P = tuple(P)
        self.Q = tuple(Q)

    @classmethod
    def y(cls):
        return cls([0, 1])

    @classmethod
    def const(cls, c):
        return cls([as_fraction(c)])

    @classmethod
    def lift(cls, v):
        return v if isinstance(v, RationalFunction) else cls.const(v)

    # algebra ---------------------------------------------------------------------

    def __add__(self, o):
        o = RationalFunction.lift(o)
        return RationalFunction(
            poly_add(poly_mul(self.P, o.Q), poly_mul(o.P, self.Q)), poly_mul(self.Q, o.Q)
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction([-c for c in self.P], self.Q)

    def __sub__(self, o):
        return self + (-RationalFunction.lift(o))

    def __rsub__(self, o):
        return RationalFunction.lift(o) - self

    def __mul__(self, o):
        o = RationalFunction.lift(o)
        return RationalFunction(poly_mul(self.P, o.P), poly_mul(self.Q, o.Q))

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = RationalFunction.lift(o)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(poly_mul(self.P, o.Q), poly_mul(self.Q, o.P))

    def __rtruediv__(self, o):
        return RationalFunction.lift(o) / self

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return RationalFunction(self.Q, self.P) ** (-n)
        out = RationalFunction.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, o):
        if not isinstance(o, RationalFunction):
            try:
                o = RationalFunction.lift(o)
            except TypeError:
                return NotImplemented
        return self.P == o.P and self.Q == o.Q

    def __hash__(self):
        return hash((self.P, self.Q))

    def is_zero(self):
        return poly_is_zero(self.P)

    # properties ------------------------------------------------------------------

    @property
    def deg_P(self):
        return -1 if self.is_zero() else len(self.P) - 1

    @property
    def deg_Q(self):
        return len(self.Q) - 1

    @property
    def degree(self):
        return map_degree(self)

    @property
    def leading_P(self):
        return self.P[-1]

    @property
    def leading_Q(self):
        return self.Q[-1]

    def __call__(self, y):
        return poly_eval([float(c) for c in self.P], y) / poly_eval(
            [float(c) for c in self.Q], y
        )

    def exact(self, y):
        y = as_fraction(y)
        return poly_eval(self.P, y) / poly_eval(self.Q, y)

    def derivative(self):
        num = poly_sub(
            poly_mul(poly_deriv(list(self.P)), self.Q),
            poly_mul(self.P, poly_deriv(list(self.Q))),
        )
        return RationalFunction(num, poly_mul(self.Q, self.Q))

    def to_expr(self, var="y"):
        """Horner-form DAG, for jets and pointwise evaluation."""
        v = Var(var)

        def horner(coeffs):
            acc = Const(coeffs[-1])
            for c in coeffs[-2::-1]:
                acc = acc * v + c
            return acc

        num = horner(self.P)
        if self.Q == (Fraction(1),):
            return num
        return num / horner(self.Q)

    # text ------------------------------------------------------------------------

    @staticmethod
    def _format_poly(p, var):
        parts = []
        for k, c in enumerate(p):
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
                continue
            mono = var if k == 1 else f"{var}^{k}"
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")

    def format(self, var="y"):
        num = self._format_poly(self.P, var)
        if self.Q == (Fraction(1),):
            return num
        return f"({num})/({self._format_poly(self.Q, var)})"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RationalFunction(P={[str(c) for c in self.P]}, Q={[str(c) for c in self.Q]})"


def expr_to_rational(expr, var="y"):
    """Exactly collapse an expression DAG in one variable to ``P/Q``."""
    if not isinstance(expr, Expr):
        return RationalFunction.const(expr)
    value = expr.evaluate({var: RationalFunction.y()}, exact=True)
    return RationalFunction.lift(value)


def parse_rational(text, bindings=None, var="y"):
    """Parse ``text`` as an exact rational function of ``var``.

    Named parameters are substituted from ``bindings``; square roots (or any
    non-rational construct) raise :class:`NonRationalConstruct`.
    """
    expr = parse_expression(text, variables=(var,), bindings=bindings)
    try:
        return expr_to_rational(expr, var)
    except NonRationalConstruct:
        raise
    except (ZeroDivisionError, ExpressionError) as exc:
        raise NonRationalConstruct(f"{text!r} is not a well-defined rational function") from exc


def map_degree(f):
    """``deg(P) - deg(Q)`` on the reduced pair."""
    return f.deg_P - f.deg_Q
