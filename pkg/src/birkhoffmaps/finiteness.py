"""Finiteness certificates for N-periodic points.

An N-periodic orbit of a second-order recurrence ``g(x_n, x_{n+1}, x_{n+2}) = 0``
is a solution of the cyclic system ``g(x_i, x_{i+1}, x_{i+2}) = 0``,
``i mod N``.  If the system formed by the top-degree homogeneous parts has
only the trivial solution, the full system has finitely many solutions.  Only
structured shapes are recognized:

* all leading forms are monomials (rational families of high degree and their
  perturbations); the only-zero test is then combinatorial;
* the product identity for ``x_i x_{i+2} = C x_{i+1}^2``;
* the Cohen quadratic forms, which factor into the linear systems
  ``A_N(eps) x = 0`` and are decided by exact determinants.

Everything here is exact: integers, Fractions and Gaussian rationals.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegreeZeroRecurrence, NotPolynomializable, ScanLimitExceeded
from .exact import (
    QI,
    MPoly,
    as_fraction,
    bareiss_det,
    bareiss_det_batch,
    integer_vector,
    rational_nullspace,
)
from .rational import RationalFunction

__all__ = [
    "Recurrence",
    "HomogeneousSystem",
    "Status",
    "FinitenessCertificate",
    "CohenDeterminantLedger",
    "build_leading_system",
    "certify_finiteness",
    "cohen_matrix",
    "toeplitz_t",
    "cohen_toeplitz_sequences",
    "cohen_sign_scan",
    "fibonacci_parity",
    "smoke_check",
    "SIGN_SCAN_LIMIT",
]

SIGN_SCAN_LIMIT = 16
_BATCH = 4096


# --------------------------------------------------------------------------------------
# recurrences and leading systems


def _uni(coeffs, k):
    return MPoly.from_univariate(coeffs, 3, k)


@dataclass(frozen=True)
class Recurrence:
    """``g(x_n, x_{n+1}, x_{n+2}) = 0`` with exact coefficients (3 variables)."""

    g: MPoly
    kind: str = "generic"
    data: dict = field(default_factory=dict, hash=False, compare=False)
    order: int = 2

    @classmethod
    def fyx(cls, f: RationalFunction):
        P, Q = _uni(f.P, 1), _uni(f.Q, 1)
        x0, x2 = MPoly.var(3, 0), MPoly.var(3, 2)
        return cls(x2 * x0 * Q - P, "fyx", {"f": f})

    @classmethod
    def apm(cls, f: RationalFunction):
        P, Q = _uni(f.P, 1), _uni(f.Q, 1)
        x0, x2 = MPoly.var(3, 0), MPoly.var(3, 2)
        return cls((x0 + x2) * Q - P, "apm", {"f": f})

    @classmethod
    def cohen(cls):
        x0, x1, x2 = (MPoly.var(3, k) for k in range(3))
        return cls((x0 + x2) ** 2 - x1**2 - 1, "cohen")

    @classmethod
    def cohen_perturbed(cls, g: RationalFunction, h: RationalFunction, eps):
        """``(Q(x0+x2) - eps P)^2 S - Q^2 (x1^2 + 1) S - eps R Q^2`` at ``x1``."""
        eps = as_fraction(eps)
        if eps == 0 or (g.is_zero() and h.is_zero()):
            return cls.cohen()
        x0, x1, x2 = (MPoly.var(3, k) for k in range(3))
        P, Q = _uni(g.P, 1), _uni(g.Q, 1)
        R, S = _uni(h.P, 1), _uni(h.Q, 1)
        poly = (Q * (x0 + x2) - P * eps) ** 2 * S - Q * Q * (x1 * x1 + 1) * S - R * Q * Q * eps
        return cls(poly, "cohen_perturbed", {"g": g, "h": h, "eps": eps})

    @classmethod
    def from_map(cls, model):
        kind = model.kind
        if kind == "fyx":
            return cls.fyx(model.f)
        if kind == "apm":
            return cls.apm(model.f)
        if kind == "cohen":
            return cls.cohen()
        if kind == "cohen_perturbed":
            ex = model.extras
            return cls.cohen_perturbed(ex["g"], ex["h"], ex["eps"])
        raise NotPolynomializable(f"no polynomial recurrence known for family {model.family!r}")

    @property
    def degree(self):
        return self.g.degree

    def br_constant(self):
        """``C`` when the recurrence is ``x_{n+2} x_n = A + B x_{n+1} + C x_{n+1}^2``."""
        if self.kind != "fyx":
            return None
        f = self.data["f"]
        if f.deg_Q == 0 and f.deg_P == 2:
            return f.P[2] / f.Q[0]
        return None


@dataclass
class HomogeneousSystem:
    N: int
    d: int
    forms: list

    def evaluate(self, x):
        return [form(x) for form in self.forms]

    def residual(self, x):
        x = np.asarray(x, dtype=complex)
        return max(abs(complex(form(list(x)))) for form in self.forms)

    def is_monomial(self):
        return all(len(f.terms) == 1 for f in self.forms)

    def format(self):
        return [f.format() for f in self.forms]


def build_leading_system(rec, N):
    """The ``N`` cyclic top-degree forms ``g_d(x_i, x_{i+1}, x_{i+2})``."""
    rec = rec if isinstance(rec, Recurrence) else Recurrence(rec)
    if N < rec.order:
        raise ValueError(f"N = {N} is smaller than the recurrence order")
    d = rec.degree
    if d <= 0:
        raise DegreeZeroRecurrence("recurrence has no positive-degree part")
    top = rec.g.homogeneous_part(d)
    forms = [top.substitute_vars([i % N, (i + 1) % N, (i + 2) % N], N) for i in range(N)]
    return HomogeneousSystem(N, d, forms)


# --------------------------------------------------------------------------------------
# certificates


class Status(str, enum.Enum):
    CERTIFIED = "CERTIFIED"
    NONZERO_SOLUTION = "NONZERO_SOLUTION"
    INCONCLUSIVE = "INCONCLUSIVE"


def _exact_str(v):
    if isinstance(v, QI):
        return str(v) if v.im else str(v.re)
    f = as_fraction(v)
    return str(f)


@dataclass
class FinitenessCertificate:
    status: Status
    method: str
    N: int
    witness: list | None = None
    reason: str = ""
    n_independent: bool = False
    determinants: dict | None = None

    @property
    def certified(self):
        return self.status is Status.CERTIFIED

    def to_dict(self):
        out = {
            "status": self.status.value,
            "method": self.method,
            "N": self.N,
            "n_independent": self.n_independent,
        }
        if self.witness is not None:
            out["witness"] = [_exact_str(v) for v in self.witness]
        if self.reason:
            out["reason"] = self.reason
        if self.determinants is not None:
            out["determinants"] = self.determinants
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_witness(system, w):
    if not all(form(w) == 0 for form in system.forms):
        raise AssertionError("witness does not satisfy the leading system exactly")


def _monomial_certificate(system, method):
    """Monomial leading forms: only-zero iff each variable owns a pure power."""
    pure = set()
    for f in system.forms:
        (e,) = f.terms
        nz = [k for k, p in enumerate(e) if p]
        if len(nz) == 1:
            pure.add(nz[0])
    missing = [k for k in range(system.N) if k not in pure]
    if not missing:
        return FinitenessCertificate(Status.CERTIFIED, method, system.N, n_independent=True)
    # x_k owns no pure power: every monomial of the unit vector e_k vanishes
    w = [Fraction(int(k == missing[0])) for k in range(system.N)]
    _check_witness(system, w)
    return FinitenessCertificate(
        Status.NONZERO_SOLUTION, method, system.N, witness=w,
        reason="monomial leading forms vanish off the coordinate set",
    )


def _product_trick(C, N):
    """Forms ``x_i x_{i+2} - C x_{i+1}^2``.

    A zero coordinate propagates to all, and for nonzero solutions the product
    of all equations gives ``C^N = 1``; conversely ``C^N = 1`` admits a
    geometric solution with ratio sequence ``r_{i+1} = C r_i``.
    """
    C = as_fraction(C)
    x0, x1, x2 = (MPoly.var(3, k) for k in range(3))
    system = build_leading_system(Recurrence(x0 * x2 - x1 * x1 * C), N)
    if C == 0:
        return FinitenessCertificate(Status.INCONCLUSIVE, "product-trick", N,
                                     reason="C = 0 degrades the leading system"), system
    if C**N != 1:
        return FinitenessCertificate(Status.CERTIFIED, "product-trick", N,
                                     n_independent=abs(C) != 1), system
    # C = +-1 and C^N = 1: need r0^N * C^{N(N-1)/2} = 1
    need = C ** (N * (N - 1) // 2)
    r0 = QI(1) if need == 1 else QI(0, 1)
    if r0 ** N * need != 1:
        raise AssertionError("no Gaussian-rational ratio found")
    w, x, r = [], QI(1), r0
    for _ in range(N):
        w.append(x)
        x = x * r
        r = r * C
    if all(not v.im for v in w):
        w = [v.re for v in w]
    _check_witness(system, w)
    return FinitenessCertificate(Status.NONZERO_SOLUTION, "product-trick", N, witness=w,
                                 reason="C^N = 1 admits a geometric solution"), system


def cohen_matrix(eps):
    """``A_N(eps)``: row ``i`` has ``1, eps_i, 1`` in columns ``i, i+1, i+2 (mod N)``."""
    n = len(eps)
    a = np.zeros((n, n), dtype=np.int64)
    for i, e in enumerate(eps):
        a[i, i] += 1
        a[i, (i + 1) % n] += e
        a[i, (i + 2) % n] += 1
    return a


def _cohen_witness(matrix, N, system):
    (v, *_) = rational_nullspace(matrix.tolist())
    w = [Fraction(k) for k in integer_vector(v)]
    _check_witness(system, w)
    return w


def _cohen_certificate(N, sign_scan_limit=SIGN_SCAN_LIMIT):
    system = build_leading_system(Recurrence.cohen(), N)
    if N % 3 == 0:
        w = _cohen_witness(cohen_matrix([1] * N), N, system)
        return FinitenessCertificate(
            Status.NONZERO_SOLUTION, "sign-determinants", N, witness=w,
            reason="det A_N(1,...,1) = 0", determinants={"all_ones": 0},
        )
    if N <= sign_scan_limit:
        ledger = cohen_sign_scan(N, limit=sign_scan_limit)
        odd = bool(np.all(ledger.dets % 2 != 0))
        if not odd:
            raise AssertionError("even sign determinant for N not divisible by 3")
        return FinitenessCertificate(
            Status.CERTIFIED, "sign-determinants", N, n_independent=True,
            determinants={"count": int(ledger.dets.size), "all_odd": odd,
                          "min_abs": int(np.min(np.abs(ledger.dets)))},
        )
    return FinitenessCertificate(
        Status.CERTIFIED, "fibonacci-parity", N, n_independent=True,
        determinants={"parity": fibonacci_parity(N)},
    )


def certify_finiteness(obj, N, sign_scan_limit=SIGN_SCAN_LIMIT):
    """Certificate for the N-periodic points of a map model or a :class:`Recurrence`.

    Returns CERTIFIED, NONZERO_SOLUTION (an exact nonzero solution of the
    leading system, so this criterion cannot decide) or INCONCLUSIVE.  It
    never asserts that there are infinitely many periodic points.
    """
    rec = obj if isinstance(obj, Recurrence) else Recurrence.from_map(obj)
    if rec.kind == "cohen":
        return _cohen_certificate(N, sign_scan_limit)
    C = rec.br_constant()
    if C is not None:
        return _product_trick(C, N)[0]
    system = build_leading_system(rec, N)
    if rec.kind in ("fyx", "apm"):
        threshold = 2 if rec.kind == "fyx" else 1
        deg = rec.data["f"].degree
        if deg <= threshold:
            return FinitenessCertificate(
                Status.INCONCLUSIVE, "monomial-leading", N,
                reason=f"deg f = {deg} <= {threshold}: leading forms are not monomials "
                "in x_{i+1} alone and the criterion does not apply in general",
            )
        return _monomial_certificate(system, "monomial-leading")
    method = "perturbed-leading" if rec.kind == "cohen_perturbed" else "monomial-leading"
    if system.is_monomial():
        return _monomial_certificate(system, method)
    return FinitenessCertificate(
        Status.INCONCLUSIVE, method, N,
        reason="leading system is not of a recognized structured shape",
    )


def smoke_check(system, samples=1000, seed=0):
    """Smallest residual of the leading system on random unit complex vectors.

    A necessary-condition check of a CERTIFIED verdict: values near zero
    would indicate a nontrivial solution nearby.
    """
    rng = np.random.default_rng(seed)
    N = system.N
    best = np.inf
    terms = [[(np.array(e), complex(c)) for e, c in f.terms.items()] for f in system.forms]
    for _ in range(samples):
        x = rng.normal(size=N) + 1j * rng.normal(size=N)
        x /= np.linalg.norm(x)
        r = 0.0
        for form in terms:
            v = sum(c * np.prod(x**e) for e, c in form)
            r = max(r, abs(v))
        best = min(best, r)
    return float(best)


# --------------------------------------------------------------------------------------
# the Cohen determinant suite


@dataclass
class CohenDeterminantLedger:
    N: int
    signs: np.ndarray | None = None
    dets: np.ndarray | None = None
    t: list | None = None
    a: list | None = None
    fib_parity: list | None = None

    def parity_constant(self):
        return bool(np.all(self.dets % 2 == self.dets[0] % 2))

    def singular(self):
        """Index of the first zero determinant, or None."""
        zero = np.flatnonzero(self.dets == 0)
        return int(zero[0]) if zero.size else None

    def kernel_witness(self):
        k = self.singular()
        if k is None:
            return None
        eps = self.signs[k]
        system = build_leading_system(Recurrence.cohen(), self.N)
        return tuple(int(e) for e in eps), _cohen_witness(cohen_matrix(eps), self.N, system)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["N", *[f"eps{i}" for i in range(self.N)], "det", "parity"])
            for eps, d in zip(self.signs, self.dets):
                w.writerow([self.N, *map(int, eps), int(d), int(d) % 2])


def toeplitz_t(n):
    """Direct determinant of the n x n tridiagonal all-ones matrix."""
    if n == 0:
        return 1
    m = [[1 if abs(i - j) <= 1 else 0 for j in range(n)] for i in range(n)]
    return bareiss_det(m)


def cohen_toeplitz_sequences(n_max, check=True):
    """``t_n`` (n = 0..n_max) and ``a_n`` (n = 3..n_max, index-aligned, ``None`` below 3).

    ``t`` follows ``t_n = t_{n-1} - t_{n-2}`` with ``t_1 = 1, t_2 = 0`` (so the
    empty determinant ``t_0 = 1``); ``a_n`` uses the minor-expansion identity
    ``a_n = (-1)^{n-1} t_{n-1} + 2 (-1)^n t_{n-2} + 2``.  With ``check`` both
    are compared with direct exact determinants.
    """
    if n_max < 3:
        raise ValueError("n_max must be at least 3")
    t = [1, 1, 0]
    while len(t) <= n_max:
        t.append(t[-1] - t[-2])
    a = [None, None, None]
    for n in range(3, n_max + 1):
        a.append((-1) ** (n - 1) * t[n - 1] + 2 * (-1) ** n * t[n - 2] + 2)
    if check:
        for n in range(1, n_max + 1):
            if toeplitz_t(n) != t[n]:
                raise AssertionError(f"t_{n} recurrence disagrees with determinant")
        for n in range(3, n_max + 1):
            if bareiss_det(cohen_matrix([1] * n).tolist()) != a[n]:
                raise AssertionError(f"a_{n} formula disagrees with determinant")
    return CohenDeterminantLedger(
        N=n_max, t=t, a=a, fib_parity=[fibonacci_parity(n) for n in range(2, n_max + 1)]
    )


def _signs_block(N, start, stop):
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(N - 1, -1, -1)) & 1
    return (2 * bits - 1).astype(np.int64)


def cohen_sign_scan(N, limit=SIGN_SCAN_LIMIT):
    """Exact ``det A_N(eps)`` for all ``2^N`` sign vectors, lexicographic order.

    The enumeration is vectorized: blocks of sign vectors are stacked and
    eliminated together in int64 (entries stay far from overflow for
    ``N <= 16``).
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    if N > limit:
        raise ScanLimitExceeded(f"N = {N} exceeds the sign-scan limit {limit}")
    total = 1 << N
    base = cohen_matrix([0] * N)
    cols = (np.arange(N) + 1) % N
    signs, dets = [], []
    for start in range(0, total, _BATCH):
        eps = _signs_block(N, start, min(total, start + _BATCH))
        stack = np.broadcast_to(base, (len(eps), N, N)).copy()
        stack[:, np.arange(N), cols] += eps
        signs.append(eps)
        dets.append(bareiss_det_batch(stack))
    return CohenDeterminantLedger(N=N, signs=np.concatenate(signs), dets=np.concatenate(dets))


def fibonacci_parity(N):
    """``F_N mod 2`` (period 3: 1, 1, 0), which equals ``det A_N mod 2``."""
    if N < 1:
        raise ValueError("N must be positive")
    return 0 if N % 3 == 0 else 1
