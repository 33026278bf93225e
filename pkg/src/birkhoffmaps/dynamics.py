"""Numerical layer: periodic orbits, Lie symmetries, period and rotation functions.

A first integral ``V`` and an invariant density ``nu`` of a map ``F`` give the
vector field ``X = (1/nu) (-V_y, V_x)``, which satisfies
``X(F(q)) = DF(q) X(q)``.  On each closed level curve ``F`` acts as the flow
of ``X`` for a time ``tau``; with ``T`` the period of the curve,
``theta = tau / T`` is the rotation number.  Rescaling by ``T`` gives a field
``Y = T X`` of constant period one, and averaging its flow against
``exp(-DY(p) s)`` gives the conjugating map ``Phi``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.optimize import brentq

from .errors import DensityVanishes, FlowMissesImage, HitSingularLine, NoConvergence, NotClosedOrbit
from .expr import compile_expression, parse_expression

__all__ = [
    "FirstIntegral",
    "LieSymmetryField",
    "LevelCurveSample",
    "IsochronousField",
    "PeriodicOrbit",
    "newton_periodic",
    "lie_symmetry_field",
    "check_lie_symmetry",
    "period",
    "level_curve_sample",
    "isochronous_rescale",
    "bochner_map",
    "bochner_residual",
    "verify_first_integral",
    "measure_residual",
    "annulus_samples",
    "write_samples_csv",
    "write_orbit_csv",
]

RTOL = 1e-11
ATOL = 1e-13


# --------------------------------------------------------------------------------------
# first integrals and the symmetry field


class FirstIntegral:
    """Evaluator of ``V`` with gradient.

    Built from an expression (symbolic gradient) or from a plain callable, in
    which case the gradient uses central differences with step
    ``eps^(1/3) * max(1, |q_k|)`` unless ``grad`` is supplied.
    """

    def __init__(self, fn, grad=None, name="V"):
        self._fn = fn
        self._grad = grad
        self.name = name

    @classmethod
    def from_expr(cls, expr):
        if isinstance(expr, str):
            expr = parse_expression(expr)
        v = compile_expression(expr)
        gx, gy = compile_expression(expr.diff("x")), compile_expression(expr.diff("y"))

        def grad(x, y):
            return np.array([gx(x, y) + 0 * x, gy(x, y) + 0 * x], dtype=float)

        return cls(v, grad, str(expr))

    @classmethod
    def of_model(cls, model):
        if model.integral is None:
            raise ValueError(f"{model.family}: no first integral known")
        return cls.from_expr(model.integral)

    def __call__(self, q):
        return float(self._fn(float(q[0]), float(q[1])))

    def values(self, x, y):
        return self._fn(x, y) + 0 * x

    def gradient(self, q):
        x, y = float(q[0]), float(q[1])
        if self._grad is not None:
            return np.asarray(self._grad(x, y), dtype=float)
        h = np.finfo(float).eps ** (1 / 3)
        hx, hy = h * max(1.0, abs(x)), h * max(1.0, abs(y))
        return np.array(
            [
                (self._fn(x + hx, y) - self._fn(x - hx, y)) / (2 * hx),
                (self._fn(x, y + hy) - self._fn(x, y - hy)) / (2 * hy),
            ]
        )


@dataclass
class LieSymmetryField:
    V: FirstIntegral
    nu: object
    orientation: float = 1.0

    def mu(self, q):
        try:
            n = float(self.nu(float(q[0]), float(q[1])))
        except ZeroDivisionError:
            n = np.inf
        if n == 0 or not np.isfinite(n):
            raise DensityVanishes(f"density is {n} at {tuple(q)}")
        return 1.0 / n

    def __call__(self, q):
        gx, gy = self.V.gradient(q)
        return self.orientation * self.mu(q) * np.array([-gy, gx])

    def jacobian(self, q, h=1e-6):
        q = np.asarray(q, dtype=float)
        cols = []
        for k in range(2):
            e = np.zeros(2)
            e[k] = h * max(1.0, abs(q[k]))
            cols.append((self(q + e) - self(q - e)) / (2 * e[k]))
        return np.column_stack(cols)

    def reversed(self):
        return LieSymmetryField(self.V, self.nu, -self.orientation)

    def flow(self, q, t, scale=1.0, **kw):
        """``phi(t, q)`` for the field ``scale * X``."""
        return _integrate(lambda _, z: scale * self(z), q, t, **kw)


def lie_symmetry_field(V, nu=None, model=None, p=None):
    """Field ``mu * (-V_y, V_x)`` with ``mu = 1/nu``.

    With ``model`` and its elliptic point ``p`` the orientation is fixed so
    that the flow turns in the same sense as ``DF(p)`` acts on the eigenvector
    of the eigenvalue with positive imaginary part; the rotation number at
    ``p`` is then ``arg(lambda)/2pi`` in ``(0, 1/2)``.
    """
    if isinstance(V, str):
        V = FirstIntegral.from_expr(V)
    elif not isinstance(V, FirstIntegral):
        V = FirstIntegral(V)
    if nu is None:
        nu = model.nu if model is not None else (lambda x, y: 1.0)
    field = LieSymmetryField(V, nu)
    if model is not None and p is not None:
        field = orient(field, model, p)
    return field


def orient(field, model, p):
    J = model.jacobian(p)
    ev, vecs = np.linalg.eig(J)
    k = int(np.argmax(ev.imag))
    v = vecs[:, k]
    DX = field.jacobian(p)
    w = DX @ v
    if (w / v)[np.argmax(np.abs(v))].imag < 0:
        return field.reversed()
    return field


def check_lie_symmetry(field, model, samples):
    """Max of ``||X(F(q)) - DF(q) X(q)|| / (1 + ||X(F(q))||)`` over ``samples``."""
    worst = 0.0
    for q in samples:
        q = np.asarray(q, dtype=float)
        lhs = field(model(q))
        rhs = model.jacobian(q) @ field(q)
        worst = max(worst, float(np.linalg.norm(lhs - rhs) / (1 + np.linalg.norm(lhs))))
    return worst


def verify_first_integral(model, V, samples):
    """``max |V(F(q)) - V(q)| / (1 + |V(q)|)``."""
    if isinstance(V, str):
        V = FirstIntegral.from_expr(V)
    pts = np.asarray(samples, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    fx, fy = model.eval(x, y)
    if isinstance(V, FirstIntegral):
        v0, v1 = V.values(x, y), V.values(fx, fy)
    else:
        v0, v1 = np.array([V(q) for q in pts]), np.array([V(q) for q in zip(fx, fy)])
    return float(np.max(np.abs(v1 - v0) / (1 + np.abs(v0))))


def measure_residual(model, samples):
    """Max relative defect of ``det DF(q) * nu(F(q)) = nu(q)``."""
    worst = 0.0
    for q in samples:
        q = np.asarray(q, dtype=float)
        lhs = np.linalg.det(model.jacobian(q)) * model.nu(*model(q))
        rhs = model.nu(*q)
        worst = max(worst, abs(lhs - rhs) / (abs(rhs) + 1e-300))
    return float(worst)


# --------------------------------------------------------------------------------------
# periodic orbits


@dataclass
class PeriodicOrbit:
    point: np.ndarray
    N: int
    minimal_period: int
    isolated: bool
    det: float
    residual: float
    orbit: np.ndarray


def _power_jacobian(model, q, N):
    J = np.eye(2)
    z = np.asarray(q, dtype=float)
    for _ in range(N):
        if not model.in_domain(z[0], z[1]):
            raise HitSingularLine(f"orbit reaches the singular set at {tuple(z)}")
        J = model.jacobian(z) @ J
        z = model(z)
    return z, J


def newton_periodic(model, N, seed, tol=1e-11, max_iter=50, iso_tol=1e-8):
    """Gauss-Newton (least-squares steps) on ``F^N(q) - q = 0``.

    Least-squares steps keep the iteration well defined when ``DF^N - I`` is
    singular, as on continua of periodic points.
    """
    q = np.asarray(seed, dtype=float)
    for _ in range(max_iter):
        z, J = _power_jacobian(model, q, N)
        r = z - q
        if not np.all(np.isfinite(r)):
            raise NoConvergence("orbit diverged")
        if np.linalg.norm(r) <= tol:
            break
        step = np.linalg.lstsq(J - np.eye(2), -r, rcond=1e-12)[0]
        q = q + step
    else:
        z, J = _power_jacobian(model, q, N)
        if np.linalg.norm(z - q) > tol:
            raise NoConvergence(f"no {N}-periodic point from {tuple(seed)}")
    z, J = _power_jacobian(model, q, N)
    res = float(np.linalg.norm(z - q))
    if res > tol:
        raise NoConvergence(f"residual {res:.2e} above {tol}")
    minimal = N
    for d in range(1, N):
        if N % d == 0 and np.linalg.norm(model.iterate(q, d) - q) <= 1e-9:
            minimal = d
            break
    det = float(np.linalg.det(J - np.eye(2)))
    return PeriodicOrbit(q, N, minimal, abs(det) > iso_tol, det, res, model.orbit(q, N))


# --------------------------------------------------------------------------------------
# integration, period and rotation number


def _integrate(rhs, q, t, dense=False, rtol=RTOL, atol=ATOL, events=None):
    sol = solve_ivp(
        rhs, (0.0, t), np.asarray(q, dtype=float), method="DOP853",
        rtol=rtol, atol=atol, dense_output=dense, events=events,
    )
    if not sol.success:
        raise NoConvergence(sol.message)
    return sol if (dense or events is not None) else sol.y[:, -1]


@dataclass
class _Return:
    T: float
    sol: object


def _first_return(rhs, q, t_guess, t_max, rtol=RTOL, atol=ATOL):
    """Time of first return of the trajectory to the section through ``q``.

    The section is the line through ``q`` normal to the field at ``q``;
    crossings in the forward direction close to ``q`` count as returns.
    """
    q = np.asarray(q, dtype=float)
    n = rhs(0.0, q)
    if np.linalg.norm(n) == 0:
        raise NotClosedOrbit(f"equilibrium at {tuple(q)}")
    horizon = max(t_guess, 1e-6)
    while horizon <= t_max:
        sol = solve_ivp(rhs, (0.0, horizon), q, method="DOP853", rtol=rtol, atol=atol,
                        dense_output=True)
        if not sol.success:
            raise NoConvergence(sol.message)
        ts = sol.t
        ys = sol.y.T
        g = (ys - q) @ n
        reach = np.max(np.linalg.norm(ys - q, axis=1))
        for k in range(1, len(ts)):
            if g[k - 1] < 0 <= g[k] and np.linalg.norm(ys[k] - q) < 0.25 * reach:
                t = brentq(lambda s: (sol.sol(s) - q) @ n, ts[k - 1], ts[k], xtol=1e-15,
                           rtol=1e-15)
                return _Return(t, sol)
        horizon *= 2
    raise NotClosedOrbit(f"no return to the section within t = {t_max}")


def period(field, q, t_guess=None, t_max=1e4, scale=1.0):
    """Period of the closed orbit of ``scale * field`` through ``q``."""
    rhs = lambda _, z: scale * field(z)  # noqa: E731
    if t_guess is None:
        t_guess = 8.0
    return _first_return(rhs, q, t_guess, t_max).T


@dataclass
class LevelCurveSample:
    q: tuple
    h: float
    T: float
    tau: float
    theta: float
    energy_drift: float = 0.0


def _match_image(sol, T, target, field):
    """Time ``t`` in ``[0, T)`` with ``phi(t) = target``."""
    n = field(target)
    grid = np.linspace(0.0, T, 2049)
    pts = sol.sol(grid).T
    dist = np.linalg.norm(pts - target, axis=1)
    g = (pts - target) @ n
    best = None
    for k in range(1, len(grid)):
        if g[k - 1] <= 0 < g[k] or (g[k - 1] < 0 <= g[k]):
            t = brentq(lambda s: (sol.sol(s) - target) @ n, grid[k - 1], grid[k],
                       xtol=1e-15, rtol=1e-15)
            d = np.linalg.norm(sol.sol(t) - target)
            if best is None or d < best[1]:
                best = (t, d)
    k = int(np.argmin(dist))
    if best is None or dist[k] < best[1] * 1e-3:
        best = (grid[k], dist[k])
    return best


def level_curve_sample(field, model, q, t_guess=None, tol=1e-9):
    """``h = V(q)``, period ``T``, map time ``tau`` and ``theta = tau/T mod 1``."""
    q = np.asarray(q, dtype=float)
    Fq = model(q)
    h, h1 = field.V(q), field.V(Fq)
    if abs(h1 - h) > 1e-8 * (1 + abs(h)):
        raise FlowMissesImage(f"V(F(q)) - V(q) = {h1 - h:.3e}: V is not invariant")
    rhs = lambda _, z: field(z)  # noqa: E731
    ret = _first_return(rhs, q, t_guess or 8.0, 1e4)
    T = ret.T
    # re-integrate over exactly one period for dense lookups
    sol = solve_ivp(rhs, (0.0, T), q, method="DOP853", rtol=RTOL, atol=ATOL, dense_output=True)
    tau, d = _match_image(sol, T, Fq, field)
    if d > max(tol, 1e-7 * (1 + np.linalg.norm(q))):
        raise FlowMissesImage(f"flow misses F(q) by {d:.3e}")
    drift = abs(field.V(sol.y[:, -1]) - h) / (1 + abs(h))
    return LevelCurveSample(tuple(q), float(h), float(T), float(tau), float((tau / T) % 1.0),
                            float(drift))


# --------------------------------------------------------------------------------------
# isochronous rescale and the averaging map


class IsochronousField:
    """``Y(q) = T(q) X(q)``: every closed orbit has period one.

    Flows are computed by reusing the flow of ``X`` with time scaled by
    ``T(q)``, which is constant along orbits; ``Y(q)`` itself costs one period
    computation.
    """

    def __init__(self, field, t_guess=None):
        self.X = field
        self.t_guess = t_guess
        self._cache = {}

    def T(self, q):
        key = (round(float(q[0]), 15), round(float(q[1]), 15))
        if key not in self._cache:
            self._cache[key] = period(self.X, q, self.t_guess)
        return self._cache[key]

    def __call__(self, q):
        return self.T(q) * self.X(q)

    def measured_period(self, q):
        """Period obtained by integrating ``T(q) X`` around the orbit of ``q``."""
        return period(self.X, q, t_guess=1.0, scale=self.T(q))

    def flow_dense(self, q, s_max=1.0, scale=None):
        c = self.T(q) if scale is None else scale
        return solve_ivp(lambda _, z: c * self.X(z), (0.0, s_max), np.asarray(q, float),
                         method="DOP853", rtol=RTOL, atol=ATOL, dense_output=True)

    def DY(self, p, T_p=None):
        """``DY(p) = T_p DX(p)`` with ``T_p = 2pi/omega`` the limiting period."""
        DX = self.X.jacobian(p)
        w = np.linalg.eigvals(DX)
        if T_p is None:
            T_p = 2 * np.pi / float(np.max(np.abs(w.imag)))
        return T_p * DX


def isochronous_rescale(field, t_guess=None):
    return IsochronousField(field, t_guess)


def bochner_map(Y, p, q, nodes=64, DY=None, scale=None):
    """``Phi(q) = int_0^1 exp(-DY(p) s) (phi_Y(s, q) - p) ds`` by Gauss-Legendre."""
    p = np.asarray(p, dtype=float)
    A = Y.DY(p) if DY is None else DY
    x, w = leggauss(nodes)
    s = 0.5 * (x + 1)
    w = 0.5 * w
    sol = Y.flow_dense(q, 1.0, scale=scale)
    pts = sol.sol(s).T - p
    acc = np.zeros(2)
    for sk, wk, zk in zip(s, w, pts):
        acc += wk * (expm(-A * sk) @ zk)
    return acc


@dataclass
class BochnerStats:
    max_residual: float
    mean_residual: float
    max_curve_residual: float
    samples: int


def bochner_residual(Y, model, p, q_samples, nodes=64, scale=None):
    """``max ||Phi(F(q)) - DF(p) Phi(q)||`` over the samples.

    ``max_curve_residual`` compares instead with ``exp(DY(p) theta(q))``,
    the linear map with the rotation number of the level curve of ``q``.
    ``scale`` overrides the time rescale (negative control).
    """
    p = np.asarray(p, dtype=float)
    A = Y.DY(p)
    L = model.jacobian(p)
    res, curve = [], []
    for q in q_samples:
        q = np.asarray(q, dtype=float)
        Fq = model(q)
        sc = None if scale is None else scale
        phi_q = bochner_map(Y, p, q, nodes, A, sc)
        phi_f = bochner_map(Y, p, Fq, nodes, A, sc)
        res.append(float(np.linalg.norm(phi_f - L @ phi_q)))
        s = level_curve_sample(Y.X, model, q)
        curve.append(float(np.linalg.norm(phi_f - expm(A * s.theta) @ phi_q)))
    return BochnerStats(max(res), float(np.mean(res)), max(curve), len(res))


# --------------------------------------------------------------------------------------
# sampling and export


def annulus_samples(p, r_min, r_max, n, seed=0):
    """``n`` points uniformly in angle and radius in an annulus around ``p``."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(r_min, r_max, n)
    a = rng.uniform(0, 2 * np.pi, n)
    return np.column_stack([p[0] + r * np.cos(a), p[1] + r * np.sin(a)])


def write_samples_csv(path, samples):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "x", "y", "h", "T", "tau", "theta"])
        for k, s in enumerate(samples):
            w.writerow([k, repr(s.q[0]), repr(s.q[1]), repr(s.h), repr(s.T), repr(s.tau),
                        repr(s.theta)])


def write_orbit_csv(path, orbit, V=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "x", "y", "h", "T", "tau", "theta"])
        for k, q in enumerate(orbit):
            h = repr(V(q)) if V is not None else ""
            w.writerow([k, repr(float(q[0])), repr(float(q[1])), h, "", "", ""])
