"""Fixed points, elliptic classification and resonance detection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NoConvergence, NotAFixedPoint

__all__ = [
    "EllipticReport",
    "find_fixed_points",
    "classify_elliptic",
    "resonance_orders",
    "newton_fixed_point",
]

FIXED_TOL = 1e-12
RESONANCE_TOL = 1e-9
NEAR_RESONANCE = 1e-4


@dataclass
class EllipticReport:
    point: tuple
    eigenvalues: tuple
    modulus_defect: float
    theta: float
    resonance_orders: list
    is_elliptic: bool
    near_resonances: list = field(default_factory=list)
    det: float = float("nan")
    birkhoff: list | None = None
    stability: str = "none-computed"
    criterion: dict | None = None

    @property
    def lam(self):
        return self.eigenvalues[0]

    def is_resonant(self, k):
        """True if ``lambda**l == 1`` for some ``l <= k``."""
        return any(l <= k for l in self.resonance_orders)


def _residual(model, p):
    return float(np.linalg.norm(model(p) - p))


def newton_fixed_point(model, seed, tol=FIXED_TOL, max_iter=60):
    """Newton iteration on ``F(q) - q`` with the exact Jacobian."""
    q = np.asarray(seed, dtype=float)
    for _ in range(max_iter):
        if not model.in_domain(q[0], q[1]):
            raise NoConvergence(f"left the domain at {q}")
        r = model(q) - q
        if np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(q)):
            r2 = np.linalg.norm(model(q) - q)
            if r2 <= tol:
                return q
        J = model.jacobian(q) - np.eye(2)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -r, rcond=None)[0]
        q = q + step
        if not np.all(np.isfinite(q)):
            break
    if np.all(np.isfinite(q)) and _residual(model, q) <= tol:
        return q
    raise NoConvergence(f"Newton from {tuple(seed)} did not reach residual {tol}")


def find_fixed_points(model, seeds=None, failures=None, tol=FIXED_TOL):
    """Deduplicated fixed points with ``||F(p) - p|| <= tol``.

    Closed-form families use their own formula (polished by one Newton pass);
    otherwise Newton runs from ``seeds`` (default: the model's stored seeds).
    Seeds that fail are appended to ``failures`` as ``(seed, message)``.
    """
    candidates = model.closed_form_fixed_points()
    if candidates is None:
        candidates = list(seeds if seeds is not None else model.seeds)
        if not candidates:
            raise ValueError(f"{model.family}: no closed form and no seeds supplied")
    elif seeds is not None:
        candidates = list(candidates) + list(seeds)
    found = []
    for c in candidates:
        try:
            p = newton_fixed_point(model, c, tol=tol)
        except NoConvergence as exc:
            if failures is not None:
                failures.append((tuple(np.asarray(c, dtype=float)), str(exc)))
            continue
        if not any(np.linalg.norm(p - q) <= 1e-8 * max(1.0, np.linalg.norm(q)) for q in found):
            found.append(p)
    found.sort(key=lambda q: (round(q[0], 12), round(q[1], 12)))
    return found


def _convergent_denominators(x, k_max):
    """Denominators of continued-fraction convergents of ``x`` up to ``k_max``."""
    out = []
    frac = Fraction(x).limit_denominator(10**12)
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    y = frac
    while True:
        a = math.floor(y)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > k_max:
            break
        out.append(k1)
        rem = y - a
        if rem == 0:
            break
        y = 1 / rem
    return out


def resonance_orders(lam, k_max, tol=RESONANCE_TOL, near=NEAR_RESONANCE):
    """Orders ``l <= k_max`` with ``|lam**l - 1| <= l*tol``, and the near band.

    Candidates are the continued-fraction denominators of ``arg(lam)/2pi`` and
    their multiples.
    """
    x = (np.angle(lam) / (2 * np.pi)) % 1.0
    cands = set()
    for q in _convergent_denominators(x, k_max):
        cands.update(range(q, k_max + 1, q))
    exact, close = [], []
    for l in sorted(cands):
        defect = abs(lam**l - 1)
        if defect <= l * tol:
            exact.append(l)
        elif defect <= near:
            close.append((l, float(defect)))
    return exact, close


def _family_criterion(model, p, is_elliptic):
    f = model.f
    if f is None or model.kind not in ("fyx", "apm"):
        return None
    xb = float(p[0])
    fp = float(f.derivative()(xb))
    if model.kind == "fyx":
        value, name = abs(fp / xb), "|f'(x)/x| < 2"
    else:
        value, name = abs(fp), "|f'(x)| < 2"
    ok = value < 2
    return {"name": name, "value": value, "elliptic": ok, "agrees": ok == is_elliptic}


def classify_elliptic(model, p, k_max=3, tol=RESONANCE_TOL):
    """Linear classification of the fixed point ``p``.

    The reported eigenvalue ``lambda`` is the one with nonnegative imaginary
    part, so ``theta = arg(lambda)`` lies in ``[0, pi]`` for complex pairs.
    """
    p = np.asarray(p, dtype=float)
    res = _residual(model, p)
    if res > 1e-9 * max(1.0, np.linalg.norm(p)):
        raise NotAFixedPoint(f"||F(p) - p|| = {res:.3e} at {tuple(p)}")
    J = model.jet_jacobian(p)
    ev = np.linalg.eigvals(J)
    if abs(ev[0].imag) > 1e-14 or abs(ev[1].imag) > 1e-14:
        lam = ev[0] if ev[0].imag > 0 else ev[1]
        complex_pair = True
    else:
        lam = complex(max(ev, key=abs))
        complex_pair = False
    lam = complex(lam)
    defect = abs(abs(lam) - 1)
    is_ell = bool(
        complex_pair and defect <= tol and abs(lam - 1) > tol and abs(lam + 1) > tol
    )
    orders, near = resonance_orders(lam, k_max, tol) if is_ell else ([], [])
    return EllipticReport(
        point=(float(p[0]), float(p[1])),
        eigenvalues=(lam, lam.conjugate() if complex_pair else complex(min(ev, key=abs))),
        modulus_defect=float(defect),
        theta=float(np.angle(lam)),
        resonance_orders=orders,
        near_resonances=near,
        is_elliptic=is_ell,
        det=float(np.linalg.det(J)),
        criterion=_family_criterion(model, p, is_ell),
    )
