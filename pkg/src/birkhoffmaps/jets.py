"""Truncated bivariate power series (jets) with complex coefficients.

A :class:`Jet2` of degree ``d`` at base point ``(x0, y0)`` stores the
coefficients ``c[i, j]`` of ``X**i * Y**j`` for ``i + j <= d``, where
``X = x - x0`` and ``Y = y - y0``.  All arithmetic is truncated at ``d``.

Internally the coefficients live in a square ``(d+1, d+1)`` array whose
entries above the anti-diagonal are kept at zero; :attr:`Jet2.coeffs`
exposes the triangular part in graded order.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np
from scipy.special import binom

from .errors import BasePointMismatch, BranchPoint, DivisionByZeroJet

__all__ = [
    "Jet2",
    "JetMap2",
    "jet_arith",
    "jet_compose",
    "graded_indices",
]


def graded_indices(degree):
    """Monomial exponents ``(i, j)`` with ``i + j <= degree`` in graded order."""
    return [(k - j, j) for k in range(degree + 1) for j in range(k + 1)]


def _mask(degree):
    i, j = np.indices((degree + 1, degree + 1))
    return (i + j) <= degree


def _same_base(a, b, tol=1e-12):
    return all(abs(u - v) <= tol * max(1.0, abs(u), abs(v)) for u, v in zip(a, b))


class Jet2:
    """Immutable truncated bivariate power series."""

    __slots__ = ("_c", "degree", "base_point")

    def __init__(self, table, base_point=(0.0, 0.0), degree=None):
        table = np.asarray(table, dtype=complex)
        if degree is None:
            degree = table.shape[0] - 1
        if table.shape != (degree + 1, degree + 1):
            raise ValueError(f"coefficient table must be {(degree + 1, degree + 1)}")
        c = np.where(_mask(degree), table, 0)
        c.setflags(write=False)
        self._c = c
        self.degree = int(degree)
        self.base_point = (float(base_point[0]), float(base_point[1]))

    # construction -----------------------------------------------------------------

    @classmethod
    def constant(cls, value, degree, base_point=(0.0, 0.0)):
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        c[0, 0] = value
        return cls(c, base_point, degree)

    @classmethod
    def variable(cls, name, degree, base_point=(0.0, 0.0)):
        """Seed jet ``x = x0 + X`` (``name='x'``) or ``y = y0 + Y``."""
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        if name == "x":
            c[0, 0] = base_point[0]
            if degree >= 1:
                c[1, 0] = 1
        elif name == "y":
            c[0, 0] = base_point[1]
            if degree >= 1:
                c[0, 1] = 1
        else:
            raise ValueError(f"unknown jet variable {name!r}")
        return cls(c, base_point, degree)

    @classmethod
    def from_dict(cls, terms, degree, base_point=(0.0, 0.0)):
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        for (i, j), v in terms.items():
            if i + j <= degree:
                c[i, j] += v
        return cls(c, base_point, degree)

    @classmethod
    def from_coeffs(cls, coeffs, degree, base_point=(0.0, 0.0)):
        """Inverse of :attr:`coeffs` (flat graded triangle)."""
        idx = graded_indices(degree)
        if len(coeffs) != len(idx):
            raise ValueError(f"expected {len(idx)} coefficients, got {len(coeffs)}")
        c = np.zeros((degree + 1, degree + 1), dtype=complex)
        for (i, j), v in zip(idx, coeffs):
            c[i, j] = v
        return cls(c, base_point, degree)

    def _new(self, table):
        return Jet2(table, self.base_point, self.degree)

    # access -----------------------------------------------------------------------

    @property
    def table(self):
        """Square read-only coefficient array ``c[i, j]``."""
        return self._c

    @property
    def coeffs(self):
        """Flat graded triangle of ``(degree+1)(degree+2)/2`` coefficients."""
        return np.array([self._c[i, j] for i, j in graded_indices(self.degree)])

    def __getitem__(self, ij):
        i, j = ij
        if i < 0 or j < 0 or i + j > self.degree:
            return 0j
        return self._c[i, j]

    @property
    def const(self):
        return self._c[0, 0]

    def homogeneous(self, k):
        """Degree-``k`` part as a ``{(i, j): c}`` dict."""
        return {(k - j, j): self._c[k - j, j] for j in range(k + 1) if k <= self.degree}

    def truncate(self, degree):
        if degree > self.degree:
            raise ValueError("cannot raise the truncation order")
        return Jet2(self._c[: degree + 1, : degree + 1], self.base_point, degree)

    def rebase(self, base_point):
        """Same coefficients, relabelled expansion centre (for coordinate shifts)."""
        return Jet2(self._c, base_point, self.degree)

    def conj(self):
        return self._new(np.conj(self._c))

    def __call__(self, dx, dy):
        """Evaluate the truncated polynomial at offset ``(dx, dy)`` from the base."""
        d = self.degree
        px = np.array([dx**i for i in range(d + 1)], dtype=complex)
        py = np.array([dy**j for j in range(d + 1)], dtype=complex)
        return px @ self._c @ py

    def allclose(self, other, atol=1e-12):
        other = _as_jet(other, self)
        return bool(np.all(np.abs(self._c - other._c) <= atol))

    def max_abs_diff(self, other):
        other = _as_jet(other, self)
        return float(np.max(np.abs(self._c - other._c)))

    def __repr__(self):
        terms = [
            f"{v:.6g}*X^{i}Y^{j}"
            for (i, j), v in zip(graded_indices(self.degree), self.coeffs)
            if v != 0
        ]
        return f"Jet2(deg={self.degree}, base={self.base_point}, {' + '.join(terms) or '0'})"

    # arithmetic -------------------------------------------------------------------

    def _check(self, other):
        if other.degree != self.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        if not _same_base(self.base_point, other.base_point):
            raise BasePointMismatch(
                f"base points differ: {self.base_point} vs {other.base_point}"
            )

    def __add__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            return self._new(self._c + other._c)
        if isinstance(other, Number):
            c = self._c.copy()
            c[0, 0] += other
            return self._new(c)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self._c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (Jet2, Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Number):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Number):
            return self._new(self._c * other)
        if not isinstance(other, Jet2):
            return NotImplemented
        self._check(other)
        d = self.degree
        a, b = self._c, other._c
        out = np.zeros_like(a)
        for i, j in zip(*np.nonzero(a)):
            # shifted add of b, truncated to the triangle by the final mask
            out[i:, j:] += a[i, j] * b[: d + 1 - i, : d + 1 - j]
        return self._new(out)

    __rmul__ = __mul__

    def _series(self, coefficients):
        """``sum_k coefficients[k] * u**k`` with ``u = self - const`` (nilpotent)."""
        c = self._c.copy()
        c[0, 0] = 0
        u = self._new(c)
        acc = Jet2.constant(coefficients[-1], self.degree, self.base_point)
        for ck in coefficients[-2::-1]:
            acc = acc * u + ck
        return acc

    def reciprocal(self):
        a0 = self.const
        if a0 == 0:
            raise DivisionByZeroJet("reciprocal of a jet with zero constant term")
        d = self.degree
        return self._series([(-1) ** k / a0 ** (k + 1) for k in range(d + 1)])

    def __truediv__(self, other):
        if isinstance(other, Number):
            if other == 0:
                raise DivisionByZeroJet("division by zero scalar")
            return self._new(self._c / other)
        if isinstance(other, Jet2):
            self._check(other)
            return self * other.reciprocal()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            return NotImplemented
        n = int(n)
        if n < 0:
            return self.reciprocal() ** (-n)
        result = Jet2.constant(1.0, self.degree, self.base_point)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def sqrt(self):
        """Principal square root; the constant term must be nonzero."""
        a0 = complex(self.const)
        if a0 == 0:
            raise BranchPoint("square root of a jet with zero constant term")
        r0 = np.sqrt(a0)
        d = self.degree
        return self._series([binom(0.5, k) * r0 / a0**k for k in range(d + 1)])


def _as_jet(value, like):
    if isinstance(value, Jet2):
        return value
    return Jet2.constant(value, like.degree, like.base_point)


def jet_arith(op, a, b=None):
    """Functional front end: ``op`` in {add, sub, mul, div, sqrt, pow_int}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "sqrt":
        return a.sqrt()
    if op == "pow_int":
        return a ** int(b)
    raise ValueError(f"unknown jet operation {op!r}")


@dataclass(frozen=True)
class JetMap2:
    """The two components of a planar map expanded at ``base_point``."""

    fx: Jet2
    fy: Jet2

    def __post_init__(self):
        if self.fx.degree != self.fy.degree:
            raise ValueError("components must share the truncation degree")
        if not _same_base(self.fx.base_point, self.fy.base_point):
            raise BasePointMismatch("components expanded at different points")

    @property
    def degree(self):
        return self.fx.degree

    @property
    def base_point(self):
        return self.fx.base_point

    @property
    def image(self):
        """Constant terms, i.e. the image of the base point."""
        return (self.fx.const, self.fy.const)

    @classmethod
    def identity(cls, degree, base_point=(0.0, 0.0)):
        return cls(
            Jet2.variable("x", degree, base_point), Jet2.variable("y", degree, base_point)
        )

    @classmethod
    def affine(cls, matrix, degree, base_point=(0.0, 0.0), image=None):
        """Jet of ``q -> image + M (q - base)``; ``image`` defaults to ``M @ base``."""
        m = np.asarray(matrix, dtype=complex)
        if image is None:
            image = m @ np.asarray(base_point, dtype=complex)
        comps = []
        for r in range(2):
            c = np.zeros((degree + 1, degree + 1), dtype=complex)
            c[0, 0] = image[r]
            if degree >= 1:
                c[1, 0], c[0, 1] = m[r, 0], m[r, 1]
            comps.append(Jet2(c, base_point, degree))
        return cls(*comps)

    def jacobian(self):
        return np.array(
            [[self.fx[1, 0], self.fx[0, 1]], [self.fy[1, 0], self.fy[0, 1]]], dtype=complex
        )

    def truncate(self, degree):
        return JetMap2(self.fx.truncate(degree), self.fy.truncate(degree))

    def allclose(self, other, atol=1e-12):
        return self.fx.allclose(other.fx, atol) and self.fy.allclose(other.fy, atol)

    def max_abs_diff(self, other):
        return max(self.fx.max_abs_diff(other.fx), self.fy.max_abs_diff(other.fy))

    def linear_combination(self, matrix, shift=(0.0, 0.0)):
        """Componentwise ``M @ (fx, fy) + shift``."""
        m = np.asarray(matrix, dtype=complex)
        return JetMap2(
            self.fx * m[0, 0] + self.fy * m[0, 1] + shift[0],
            self.fx * m[1, 0] + self.fy * m[1, 1] + shift[1],
        )

    def __call__(self, dx, dy):
        return np.array([self.fx(dx, dy), self.fy(dx, dy)])

    def compose(self, inner):
        return jet_compose(self, inner)


def _compose_component(jet, powers_x, powers_y):
    d = jet.degree
    acc = None
    for i in range(d + 1):
        for j in range(d + 1 - i):
            c = jet.table[i, j]
            if c == 0:
                continue
            term = powers_x[i] * powers_y[j] * c
            acc = term if acc is None else acc + term
    if acc is None:
        acc = Jet2.constant(0.0, d, powers_x[0].base_point)
    return acc


def jet_compose(outer, inner, tol=1e-10):
    """Taylor expansion of ``outer o inner`` at ``inner.base_point``.

    ``inner``'s constant terms must coincide with ``outer.base_point``.
    """
    if outer.degree != inner.degree:
        raise ValueError("jet_compose requires equal degrees")
    ox, oy = outer.base_point
    ix, iy = inner.image
    scale = max(1.0, abs(ox), abs(oy))
    if abs(ix - ox) > tol * scale or abs(iy - oy) > tol * scale:
        raise BasePointMismatch(
            f"inner image {(complex(ix), complex(iy))} != outer base {outer.base_point}"
        )
    d = inner.degree
    dx = inner.fx - ix
    dy = inner.fy - iy
    one = Jet2.constant(1.0, d, inner.base_point)
    px, py = [one], [one]
    for _ in range(d):
        px.append(px[-1] * dx)
        py.append(py[-1] * dy)
    return JetMap2(_compose_component(outer.fx, px, py), _compose_component(outer.fy, px, py))
