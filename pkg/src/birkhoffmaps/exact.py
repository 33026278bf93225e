"""Exact arithmetic: univariate/multivariate rational polynomials, Gaussian
rationals, fraction-free determinants and Sturm real-root isolation."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd

__all__ = [
    "as_fraction",
    "QI",
    "MPoly",
    "poly_trim",
    "poly_add",
    "poly_sub",
    "poly_mul",
    "poly_divmod",
    "poly_gcd",
    "poly_deriv",
    "poly_eval",
    "bareiss_det",
    "rational_nullspace",
    "real_roots",
]


def as_fraction(value):
    """Exact rational for ``value``; floats go through their shortest repr
    so that ``0.1`` becomes ``1/10`` rather than its binary expansion."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        return Fraction(value.strip())
    try:
        return Fraction(repr(float(value)))
    except (TypeError, ValueError):
        raise TypeError(f"cannot convert {value!r} to an exact rational") from None


# --------------------------------------------------------------------------------------
# Gaussian rationals


class QI:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_fraction(re) if not isinstance(re, Fraction) else re
        self.im = as_fraction(im) if not isinstance(im, Fraction) else im

    @staticmethod
    def lift(v):
        return v if isinstance(v, QI) else QI(v, 0)

    def __add__(self, o):
        o = QI.lift(o)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-QI.lift(o))

    def __rsub__(self, o):
        return QI.lift(o) - self

    def __mul__(self, o):
        o = QI.lift(o)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = QI(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, o):
        try:
            o = QI.lift(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        return f"{self.re}+{self.im}i" if self.im > 0 else f"{self.re}{self.im}i"


# --------------------------------------------------------------------------------------
# univariate polynomials: coefficient lists, ascending powers, Fraction entries


def poly_trim(p):
    p = [as_fraction(c) for c in p]
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p or [Fraction(0)]


def poly_is_zero(p):
    return all(c == 0 for c in p)


def poly_degree(p):
    p = poly_trim(p)
    return -1 if poly_is_zero(p) else len(p) - 1


def poly_add(p, q):
    n = max(len(p), len(q))
    return poly_trim(
        [(p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0) for k in range(n)]
    )


def poly_sub(p, q):
    return poly_add(p, [-c for c in q])


def poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_scale(p, c):
    return poly_trim([c * a for a in p])


def poly_divmod(p, q):
    p, q = poly_trim(p), poly_trim(q)
    if poly_is_zero(q):
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq = len(q) - 1
    quot = [Fraction(0)] * max(1, len(p) - dq)
    while poly_degree(r) >= dq and not poly_is_zero(r):
        dr = len(r) - 1
        c = r[-1] / q[-1]
        quot[dr - dq] = c
        for k in range(dq + 1):
            r[dr - dq + k] -= c * q[k]
        r = poly_trim(r)
    return poly_trim(quot), r


def poly_gcd(p, q):
    """Monic gcd."""
    a, b = poly_trim(p), poly_trim(q)
    while not poly_is_zero(b):
        a, b = b, poly_divmod(a, b)[1]
    if poly_is_zero(a):
        return [Fraction(0)]
    return poly_scale(a, 1 / a[-1])


def poly_deriv(p):
    return poly_trim([k * p[k] for k in range(1, len(p))] or [0])


def poly_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_pow(p, n):
    out = [Fraction(1)]
    for _ in range(n):
        out = poly_mul(out, p)
    return out


# --------------------------------------------------------------------------------------
# multivariate polynomials


class MPoly:
    """Sparse polynomial in ``nvars`` variables with exact coefficients.

    ``terms`` maps exponent tuples to nonzero coefficients (Fraction or QI).
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        self.terms = {}
        for e, c in (terms or {}).items():
            if c:
                self.terms[tuple(e)] = c

    @classmethod
    def const(cls, nvars, c):
        c = as_fraction(c)
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars, k):
        e = [0] * nvars
        e[k] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def from_univariate(cls, coeffs, nvars, k):
        """``sum_j coeffs[j] * x_k**j``."""
        terms = {}
        for j, c in enumerate(coeffs):
            if c:
                e = [0] * nvars
                e[k] = j
                terms[tuple(e)] = as_fraction(c)
        return cls(nvars, terms)

    def _lift(self, o):
        if isinstance(o, MPoly):
            if o.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return o
        return MPoly(self.nvars, {(0,) * self.nvars: as_fraction(o)})

    def __add__(self, o):
        o = self._lift(o)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return MPoly(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return MPoly(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = MPoly.const(self.nvars, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, o):
        if not isinstance(o, MPoly):
            o = self._lift(o)
        return self.nvars == o.nvars and self.terms == o.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    @property
    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self):
        return not self.terms

    def homogeneous_part(self, d):
        return MPoly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def is_homogeneous(self, d):
        return all(sum(e) == d for e in self.terms)

    def substitute_vars(self, index_map, nvars_out):
        """Rename variable ``k`` to ``index_map[k]`` (merging collisions)."""
        t = {}
        for e, c in self.terms.items():
            out = [0] * nvars_out
            for k, p in enumerate(e):
                out[index_map[k]] += p
            out = tuple(out)
            t[out] = t.get(out, 0) + c
        return MPoly(nvars_out, t)

    def __call__(self, point):
        acc = 0
        for e, c in self.terms.items():
            term = c
            for v, p in zip(point, e):
                if p:
                    term = term * v**p
            acc = acc + term
        return acc

    def monomials(self):
        return sorted(self.terms.items())

    def __repr__(self):
        return f"MPoly({self.nvars}, {self.format()})"

    def format(self, names=None):
        if names is None:
            names = [f"x{k}" for k in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), t[0]), reverse=False):
            mono = "*".join(
                names[k] if p == 1 else f"{names[k]}^{p}" for k, p in enumerate(e) if p
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# --------------------------------------------------------------------------------------
# linear algebra over the integers / rationals


def bareiss_det(matrix):
    """Exact determinant of an integer matrix by fraction-free elimination."""
    a = [[int(v) for v in row] for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def bareiss_det_batch(stack):
    """Determinants of a stack of small integer matrices (int64, fraction-free).

    Intermediate Bareiss entries are minors of the input, so for the Cohen
    sign matrices (three unit entries per row) they are bounded by
    ``3**(n/2)`` and never overflow int64 for the supported sizes.
    """
    import numpy as np

    a = np.array(stack, dtype=np.int64, copy=True)
    m, n, _ = a.shape
    sign = np.ones(m, dtype=np.int64)
    prev = np.ones(m, dtype=np.int64)
    alive = np.ones(m, dtype=bool)
    rows = np.arange(m)
    for k in range(n - 1):
        col = a[:, k:, k]
        nz = col != 0
        has = nz.any(axis=1)
        alive &= has
        piv = k + np.argmax(nz, axis=1)
        swap = (piv != k) & alive
        if swap.any():
            r = rows[swap]
            tmp = a[r, k, :].copy()
            a[r, k, :] = a[r, piv[swap], :]
            a[r, piv[swap], :] = tmp
            sign[swap] *= -1
        akk = a[:, k, k].copy()
        akk[~alive] = 1
        aik = a[:, k + 1 :, k][:, :, None]
        sub = a[:, k + 1 :, k + 1 :] * akk[:, None, None] - aik * a[:, k, k + 1 :][:, None, :]
        a[:, k + 1 :, k + 1 :] = sub // prev[:, None, None]
        a[:, k + 1 :, k] = 0
        prev = akk
    det = sign * a[:, n - 1, n - 1]
    det[~alive] = 0
    return det


def rational_nullspace(matrix):
    """Basis of the right kernel of a rational matrix, as lists of Fractions."""
    a = [[as_fraction(v) for v in row] for row in matrix]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -a[row][fc]
        basis.append(v)
    return basis


def integer_vector(v):
    """Scale a rational vector to coprime integers with positive first nonzero."""
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    g = g or 1
    ints = [x // g for x in ints]
    first = next((x for x in ints if x), 1)
    return [x if first > 0 else -x for x in ints]


# --------------------------------------------------------------------------------------
# real root isolation


def _sturm_chain(p):
    chain = [poly_trim(p), poly_deriv(p)]
    while not poly_is_zero(chain[-1]):
        r = poly_divmod(chain[-2], chain[-1])[1]
        if poly_is_zero(r):
            break
        chain.append(poly_scale(r, -1))
    return chain


def _sign_changes(chain, x):
    signs = []
    for q in chain:
        v = poly_eval(q, x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def isolate_real_roots(p):
    """Disjoint rational intervals ``(lo, hi]`` each holding exactly one real
    root of the square-free part of ``p``."""
    p = poly_trim(p)
    if poly_degree(p) < 1:
        return [], p
    sqf = poly_divmod(p, poly_gcd(p, poly_deriv(p)))[0]
    chain = _sturm_chain(sqf)
    lead = abs(sqf[-1])
    bound = 1 + max(abs(c) for c in sqf[:-1]) / lead if len(sqf) > 1 else Fraction(1)
    out = []
    stack = [(-bound - 1, bound + 1)]
    while stack:
        lo, hi = stack.pop()
        n = _sign_changes(chain, lo) - _sign_changes(chain, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(out), sqf


def real_roots(p, xtol=1e-15):
    """Real roots of an exact polynomial, isolated by Sturm sequences and
    polished by bisection/Brent on the isolating interval."""
    from scipy.optimize import brentq

    intervals, sqf = isolate_real_roots(p)
    if not intervals:
        return []
    fl = [float(c) for c in sqf]

    def f(x):
        acc = 0.0
        for c in reversed(fl):
            acc = acc * x + c
        return acc

    roots = []
    for lo, hi in intervals:
        if poly_eval(sqf, hi) == 0:
            roots.append(float(hi))
            continue
        # shrink exactly until the float evaluation brackets the root
        for _ in range(200):
            flo, fhi = f(float(lo)), f(float(hi))
            if flo * fhi < 0 or hi - lo < Fraction(1, 10**30):
                break
            mid = (lo + hi) / 2
            vm = poly_eval(sqf, mid)
            if vm == 0:
                lo = hi = mid
                break
            if (vm > 0) == (poly_eval(sqf, hi) > 0):
                hi = mid
            else:
                lo = mid
        if lo == hi or not f(float(lo)) * f(float(hi)) < 0:
            roots.append(float((lo + hi) / 2))
        else:
            roots.append(brentq(f, float(lo), float(hi), xtol=xtol, rtol=1e-15))
    return sorted(roots)


def cartesian_signs(n):
    """All sign vectors in ``{-1, 1}^n`` in lexicographic order (-1 first)."""
    return product((-1, 1), repeat=n)
