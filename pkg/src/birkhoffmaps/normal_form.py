"""Birkhoff normal form of an elliptic fixed point.

Near an elliptic fixed point with eigenvalues ``lambda, 1/lambda`` the map is
conjugate, in complex coordinates ``(z, w)`` with ``w`` playing the role of
``conj(z)``, to

    z -> lambda z (1 + B_1 zw + B_2 (zw)^2 + ...)

and the coefficients ``B_n`` are the Birkhoff constants.  Two independent
routes are provided for ``B_1``: a closed formula in the quadratic and cubic
Taylor coefficients of the diagonalized map, and a degree-by-degree
elimination of nonresonant monomials by near-identity changes of variables.

Conventions.  ``lambda`` is the eigenvalue with positive imaginary part and
each eigenvector is scaled so that its second component equals one.  The
conjugating matrix is ``S = [v, conj(v)]`` so that ``q = p + S (z, w)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IllConditionedEigenbasis, NotElliptic, ResonanceObstruction, ThreeResonance
from .jets import Jet2, JetMap2, jet_compose

__all__ = [
    "DiagonalizedJet",
    "BirkhoffResult",
    "diagonalize",
    "b1_closed_form",
    "birkhoff_constants",
    "stability_from_bn",
    "q1_polynomial",
    "b1_br_reduced",
    "b1_mgm",
    "b1_cohen",
]

ELLIPTIC_TOL = 1e-9
RESONANCE_TOL = 1e-9
SMALL_DIVISOR = 1e-6
COND_LIMIT = 1e8


@dataclass
class DiagonalizedJet:
    lam: complex
    mu: complex
    jet: JetMap2
    S: np.ndarray
    S_inv: np.ndarray
    point: tuple
    linear_defect: float = 0.0

    @property
    def degree(self):
        return self.jet.degree

    def f(self, i, j):
        """Coefficient of ``z^i w^j`` in the first component."""
        return complex(self.jet.fx[i, j])

    def g(self, i, j):
        """Coefficient of ``z^i w^j`` in the second component."""
        return complex(self.jet.fy[i, j])

    def reconstruct(self):
        """The original jet at ``point``, i.e. ``A o K o A^{-1}`` with ``A = p + S``."""
        d = self.degree
        p = np.asarray(self.point, dtype=complex)
        a_inv = JetMap2.affine(self.S_inv, d, base_point=tuple(p.real), image=(0.0, 0.0))
        inner = jet_compose(self.jet, a_inv)
        return inner.linear_combination(self.S, shift=p)


def _eigvec(J, lam):
    a, b = J[0]
    c, d = J[1]
    cands = [np.array([b, lam - a]), np.array([lam - d, c])]
    v = max(cands, key=lambda u: np.linalg.norm(u))
    if np.linalg.norm(v) == 0:
        raise IllConditionedEigenbasis("degenerate eigenvector")
    if abs(v[1]) > 1e-14 * np.linalg.norm(v):
        return v / v[1]
    return v / v[0]


def diagonalize(jet, tol=ELLIPTIC_TOL):
    """Rewrite ``jet`` (expanded at a fixed point) in eigen-coordinates."""
    p = tuple(np.asarray(jet.base_point, dtype=complex))
    image = np.asarray(jet.image, dtype=complex)
    if np.linalg.norm(image - np.asarray(p)) > 1e-8 * max(1.0, np.linalg.norm(p)):
        raise NotElliptic("jet is not expanded at a fixed point")
    J = jet.jacobian()
    if np.max(np.abs(J.imag)) > 1e-12:
        raise NotElliptic("linear part is not real")
    J = J.real
    ev = np.linalg.eigvals(J)
    if max(abs(e.imag) for e in ev) <= 1e-14:
        raise NotElliptic(f"real eigenvalues {ev}")
    lam = complex(ev[0] if ev[0].imag > 0 else ev[1])
    if abs(abs(lam) - 1) > tol:
        raise NotElliptic(f"|lambda| = {abs(lam)!r} is not 1")
    v = _eigvec(J.astype(complex), lam)
    S = np.column_stack([v, v.conj()])
    if np.linalg.cond(S) > COND_LIMIT:
        raise IllConditionedEigenbasis(f"cond(S) = {np.linalg.cond(S):.3e}")
    S_inv = np.linalg.inv(S)
    mu = lam.conjugate()
    d = jet.degree
    A = JetMap2.affine(S, d, base_point=(0.0, 0.0), image=p)
    K = jet_compose(jet, A).linear_combination(S_inv, shift=-(S_inv @ np.asarray(p)))
    tx, ty = K.fx.table.copy(), K.fy.table.copy()
    defect = max(abs(tx[1, 0] - lam), abs(tx[0, 1]), abs(ty[1, 0]), abs(ty[0, 1] - mu))
    tx[0, 0] = ty[0, 0] = 0
    tx[1, 0], tx[0, 1], ty[1, 0], ty[0, 1] = lam, 0, 0, mu
    K = JetMap2(Jet2(tx, (0.0, 0.0), d), Jet2(ty, (0.0, 0.0), d))
    return DiagonalizedJet(lam, mu, K, S, S_inv, p, float(defect))


def b1_closed_form(dj, tol=RESONANCE_TOL):
    """``B_1`` from the quadratic and cubic coefficients of a diagonalized jet."""
    if dj.degree < 3:
        raise ValueError("B_1 needs a jet of degree >= 3")
    lam = dj.lam
    if abs(lam - 1) <= tol or abs(lam**2 + lam + 1) <= 3 * tol:
        raise ThreeResonance("lambda^3 = 1: B_1 is not defined")
    f11, f20, f02, f21 = dj.f(1, 1), dj.f(2, 0), dj.f(0, 2), dj.f(2, 1)
    g11, g20 = dj.g(1, 1), dj.g(2, 0)
    num = (
        (f11 * g11 + f21) * lam**4
        - f11 * (2 * f20 - g11) * lam**3
        + (2 * f02 * g20 - f11 * f20 + f11 * g11) * lam**2
        - (f11 * f20 + f21) * lam
        + f11 * f20
    )
    return num / (lam**2 * (lam - 1) * (lam**2 + lam + 1))


@dataclass
class BirkhoffResult:
    lam: complex
    constants: list
    normal_form: JetMap2
    small_divisors: list = field(default_factory=list)
    obstruction: ResonanceObstruction | None = None
    closed_form_b1: complex | None = None

    def b(self, n):
        for k, v in self.constants:
            if k == n:
                return v
        raise KeyError(n)

    @property
    def imaginary_purity(self):
        return [(n, abs(v.real)) for n, v in self.constants]

    def first_nonzero(self, tol=1e-8):
        for n, v in self.constants:
            if abs(v) > tol:
                return n, v
        return None


def _near_identity_inverse(h):
    """Jet inverse of ``id + h`` where ``h`` has no constant or linear part."""
    d = h.fx.degree
    ident = JetMap2.identity(d)
    inv = JetMap2(ident.fx - h.fx, ident.fy - h.fy)
    for _ in range(d):
        hh = jet_compose(h, inv)
        inv = JetMap2(ident.fx - hh.fx, ident.fy - hh.fy)
    return inv


def birkhoff_constants(jet, p=None, n_max=1, tol_res=RESONANCE_TOL):
    """Constants ``B_1..B_{n_max}`` by successive elimination of monomials.

    At degree ``k`` the coefficient of ``z^i w^j`` in the first component is
    removed with divisor ``lambda^i mu^j - lambda`` (symmetrically for the
    second).  Monomials ``z^{m+1} w^m`` are always resonant and kept.  A
    vanishing divisor at degree ``k`` makes every ``B_n`` with ``k <= n + 1``
    ill-defined; if that already happens for ``B_1`` the obstruction is
    raised, otherwise the constants are truncated before the obstructed one.
    """
    if p is not None and np.linalg.norm(np.asarray(jet.base_point) - np.asarray(p)) > 1e-12:
        raise ValueError("jet is not expanded at p")
    D = 2 * n_max + 1
    if jet.degree < D:
        raise ValueError(f"B_{n_max} needs a jet of degree >= {D}")
    dj = diagonalize(jet.truncate(D))
    lam, mu = dj.lam, dj.mu
    G = dj.jet
    small, n_ok, obstruction = [], n_max, None
    for k in range(2, D):
        hx = np.zeros((D + 1, D + 1), dtype=complex)
        hy = np.zeros_like(hx)
        for i in range(k + 1):
            j = k - i
            base = lam**i * mu**j
            for comp, target, table, skip in (
                (G.fx, lam, hx, i == j + 1),
                (G.fy, mu, hy, j == i + 1),
            ):
                if skip:
                    continue
                div = base - target
                order = abs(i - j - 1) if table is hx else abs(j - i - 1)
                if abs(div) <= max(order, 1) * tol_res:
                    if k - 1 <= n_ok:
                        n_ok = k - 2
                        obstruction = ResonanceObstruction(order, k, abs(div))
                    continue
                if abs(div) < SMALL_DIVISOR:
                    small.append((k, (i, j), complex(div)))
                table[i, j] = comp[i, j] / div
        if not (hx.any() or hy.any()):
            continue
        h = JetMap2(Jet2(hx, (0.0, 0.0), D), Jet2(hy, (0.0, 0.0), D))
        ident = JetMap2.identity(D)
        H = JetMap2(ident.fx + h.fx, ident.fy + h.fy)
        G = jet_compose(_near_identity_inverse(h), jet_compose(G, H))
    if n_ok < 1:
        raise obstruction
    constants = [(n, complex(G.fx[n + 1, n] / lam)) for n in range(1, n_ok + 1)]
    try:
        closed = b1_closed_form(dj)
    except ThreeResonance:
        closed = None
    return BirkhoffResult(lam, constants, G, small, obstruction, closed)


def stability_from_bn(result, tol=1e-8):
    """Local dynamics from the first nonzero ``B_n``.

    ``Re B_n < 0`` makes the point an attractor and ``Re B_n > 0`` a repeller
    (in both cases the map is not even C^2 locally integrable).  A purely
    imaginary constant decides nothing; all constants zero gives
    ``none-computed``.
    """
    first = result.first_nonzero(tol)
    if first is None:
        return "none-computed"
    _, b = first
    if b.real < -tol:
        return "attractor"
    if b.real > tol:
        return "repeller"
    return "inconclusive-from-Bn"


# closed forms for the reference families -------------------------------------------


def q1_polynomial(a, c):
    return (
        a**4 - 3 * a**3 * c + 3 * a**2 * c**2 - a * c**3 - 4 * a**3 + 5 * a**2 * c
        - 2 * a * c**2 + c**3 + 4 * a**2 + 4 * a * c - 2 * c**2 - a + c
    )


def b1_br_reduced(a, c):
    """``B_1`` at ``(1, 1)`` for ``x' = y, y' = (a + (1-a-c) y + c y^2)/x``."""
    r = np.sqrt((3 - a + c) / (a + 1 - c))
    return 1j * q1_polynomial(a, c) * (1 + r**2) ** 3 / (16 * r * (1 - 3 * r**2))


def b1_mgm(a):
    """``B_1`` for the map ``x' = y, y' = -x + a y/(1 + y^2)``.

    For ``|a| < 2`` at the origin; for ``a > 2`` at the symmetric pair.
    """
    if abs(a) < 2:
        return 3j * a / np.sqrt(4 - a**2)
    return -4j * np.sqrt(2) * (a + 4) / (a**2 * np.sqrt(a - 2))


def b1_cohen():
    return 135j / 256
