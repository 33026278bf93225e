"""Catalog of planar map families, their invariant densities and spec files.

Every model is built from expression DAGs for the two components, so the
same object gives pointwise evaluation, exact Jacobians (symbolic
derivatives), and Taylor jets of any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType

import numpy as np

from .errors import (
    ExpressionSyntaxError,
    NonRationalConstruct,
    ParamDomainError,
    SingularBasePoint,
    SpecFileError,
)
from .exact import as_fraction, poly_mul, poly_sub, poly_eval, real_roots
from .expr import Const, Expr, Var, compile_expression, jet_of_expression, parse_expression, sqrt
from .rational import RationalFunction, parse_rational

__all__ = [
    "PlanarMapModel",
    "build_map",
    "FAMILIES",
    "read_map_spec",
    "parse_map_spec",
    "model_from_spec",
]

GUARD_TOL = 1e-9

X, Y = Var("x"), Var("y")


@dataclass(frozen=True, eq=False)
class Guard:
    """``|expr| > tol`` (kind ``nonzero``) or ``expr > tol`` (kind ``positive``)."""

    expr: Expr
    kind: str = "nonzero"


@dataclass(frozen=True, eq=False)
class PlanarMapModel:
    family: str
    params: MappingProxyType
    fx: Expr
    fy: Expr
    density: str = "unity"
    density_expr: Expr = field(default_factory=lambda: Const(1))
    guards: tuple = ()
    f: RationalFunction | None = None
    extras: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    integral: Expr | None = None
    seeds: tuple = ()

    def __post_init__(self):
        fns = {
            "_fx": compile_expression(self.fx),
            "_fy": compile_expression(self.fy),
            "_nu": compile_expression(self.density_expr),
            "_dfx": (compile_expression(self.fx.diff("x")), compile_expression(self.fx.diff("y"))),
            "_dfy": (compile_expression(self.fy.diff("x")), compile_expression(self.fy.diff("y"))),
            "_guards": tuple((compile_expression(g.expr), g.kind) for g in self.guards),
        }
        for k, v in fns.items():
            object.__setattr__(self, k, v)

    # evaluation ------------------------------------------------------------------

    def eval(self, x, y):
        """Image of ``(x, y)``; accepts scalars or arrays."""
        return _bcast(self._fx(x, y), x), _bcast(self._fy(x, y), x)

    def __call__(self, q):
        return np.array(self.eval(q[0], q[1]), dtype=float)

    def nu(self, x, y):
        return _bcast(self._nu(x, y), x)

    def in_domain(self, x, y, tol=GUARD_TOL):
        ok = np.ones(np.shape(x), dtype=bool)
        with np.errstate(all="ignore"):
            for fn, kind in self._guards:
                v = _bcast(fn(x, y), x)
                ok &= (np.abs(v) > tol) if kind == "nonzero" else (v > tol)
        return ok if np.ndim(ok) else bool(ok)

    def jacobian(self, q):
        """``DF(q)`` from the exact symbolic derivatives."""
        x, y = float(q[0]), float(q[1])
        return np.array(
            [[self._dfx[0](x, y), self._dfx[1](x, y)], [self._dfy[0](x, y), self._dfy[1](x, y)]],
            dtype=float,
        )

    def jet(self, p, degree):
        """:class:`~birkhoffmaps.jets.JetMap2` of the map at ``p``."""
        if not self.in_domain(p[0], p[1]):
            raise SingularBasePoint(f"{self.family}: jet requested on the guard set at {tuple(p)}")
        return jet_of_expression((self.fx, self.fy), (float(p[0]), float(p[1])), degree)

    def jet_jacobian(self, p):
        """``DF(p)`` read off the degree-1 jet."""
        return self.jet(p, 1).jacobian().real

    def orbit(self, q, n):
        pts = [np.asarray(q, dtype=float)]
        for _ in range(n):
            pts.append(self(pts[-1]))
        return np.array(pts)

    def iterate(self, q, n):
        q = np.asarray(q, dtype=float)
        for _ in range(n):
            q = self(q)
        return q

    # closed-form fixed points ----------------------------------------------------

    def closed_form_fixed_points(self):
        """Fixed points from the family's closed form, or ``None`` if none exists."""
        fam = self.family
        if fam == "cohen":
            s = 1 / math.sqrt(3)
            return [np.array([s, s])]
        if fam == "rotation":
            return [np.zeros(2)]
        if self.f is None or fam in ("cohen_perturbed", "custom"):
            return None
        P, Q = list(self.f.P), list(self.f.Q)
        if self.kind == "fyx":
            # f(x) = x^2 with x != 0
            poly = poly_sub(P, poly_mul([0, 0, 1], Q))
        else:
            # apm: 2x = f(x)
            poly = poly_sub(P, poly_mul([0, 2], Q))
        if all(c == 0 for c in poly):
            # a curve of fixed points: nothing isolated to report
            return [np.asarray(s, dtype=float) for s in self.seeds]
        pts = []
        for r in real_roots(poly):
            if self.kind == "fyx" and abs(r) <= GUARD_TOL:
                continue
            if abs(poly_eval([float(c) for c in Q], r)) <= GUARD_TOL:
                continue
            pts.append(np.array([r, r]))
        return pts

    @property
    def kind(self):
        """Structural shape: ``fyx``, ``apm``, ``cohen``, ``cohen_perturbed``, or ``other``."""
        return self.extras.get("kind", "other")

    def describe(self):
        out = {"family": self.family, "params": {k: _fmt_param(v) for k, v in self.params.items()}}
        if self.f is not None:
            out["f"] = str(self.f)
        for k in ("g", "h"):
            if k in self.extras:
                out[k] = str(self.extras[k])
        if self.family == "custom":
            out["fx"], out["fy"] = str(self.fx), str(self.fy)
        out["density"] = self.density if self.density != "user" else str(self.density_expr)
        return out


def _bcast(v, like):
    if np.ndim(like) and not np.ndim(v):
        return np.full(np.shape(like), v, dtype=float)
    return v


def _fmt_param(v):
    if isinstance(v, Fraction):
        return str(v)
    return v


# ----------------------------------------------------------------------------------
# family constructors


def _rational_arg(value, bindings, name="f"):
    if isinstance(value, RationalFunction):
        return value
    if value is None:
        raise ParamDomainError(f"missing rational function {name!r}")
    try:
        return parse_rational(str(value), bindings=bindings)
    except NonRationalConstruct as exc:
        raise ParamDomainError(f"{name} must be rational: {exc}") from exc


def _fyx(family, f, params, integral=None):
    fexpr = f.to_expr("y")
    guards = [Guard(X), Guard(Y)]
    if f.deg_Q > 0:
        guards.append(Guard(RationalFunction(f.Q).to_expr("y")))
    return PlanarMapModel(
        family=family,
        params=MappingProxyType(dict(params)),
        fx=Y,
        fy=fexpr / X,
        density="one_over_xy",
        density_expr=Const(1) / (X * Y),
        guards=tuple(guards),
        f=f,
        extras=MappingProxyType({"kind": "fyx"}),
        integral=integral,
    )


def _apm(family, f, params, integral=None):
    guards = []
    if f.deg_Q > 0:
        guards.append(Guard(RationalFunction(f.Q).to_expr("y")))
    return PlanarMapModel(
        family=family,
        params=MappingProxyType(dict(params)),
        fx=Y,
        fy=-X + f.to_expr("y"),
        guards=tuple(guards),
        f=f,
        extras=MappingProxyType({"kind": "apm"}),
        integral=integral,
    )


def _num(params, name, default=None):
    if name in params:
        return params[name]
    if default is not None:
        return default
    raise ParamDomainError(f"missing parameter {name!r}")


def _cohen(params):
    return PlanarMapModel(
        family="cohen",
        params=MappingProxyType({}),
        fx=Y,
        fy=-X + sqrt(Y * Y + 1),
        extras=MappingProxyType({"kind": "cohen"}),
    )


def _mgm(params):
    a = as_fraction(_num(params, "a"))
    f = RationalFunction([0, a], [1, 0, 1])
    V = X * X * Y * Y + X * X + Y * Y - Const(a) * X * Y
    return _apm("mgm", f, {"a": params["a"]}, integral=V)


def _lyness(params):
    a = as_fraction(_num(params, "a"))
    f = RationalFunction([a, 1])
    V = (X + 1) * (Y + 1) * (X + Y + Const(a)) / (X * Y)
    return _fyx("lyness", f, {"a": params["a"]}, integral=V)


def _br(params):
    A, B, C = (as_fraction(_num(params, k)) for k in ("A", "B", "C"))
    if C == 0:
        raise ParamDomainError("br family requires C != 0")
    f = RationalFunction([A, B, C])
    V = None
    if C == 1:
        V = (X * X + Y * Y + Const(B) * (X + Y) + Const(A)) / (X * Y)
    return _fyx("br", f, {k: params[k] for k in ("A", "B", "C")}, integral=V)


def _br_reduced(params):
    a, c = as_fraction(_num(params, "a")), as_fraction(_num(params, "c"))
    if c == 0:
        raise ParamDomainError("reduced br family requires c != 0")
    f = RationalFunction([a, 1 - a - c, c])
    V = None
    if c == 1:
        # same first integral with A = a, B = 1 - a - c = -a
        V = (X * X + Y * Y + Const(-a) * (X + Y) + Const(a)) / (X * Y)
    return _fyx("br_reduced", f, {"a": params["a"], "c": params["c"]}, integral=V)


def _bindings(params):
    return {k: v for k, v in params.items() if k not in ("f", "g", "h", "fx", "fy", "density", "integral", "seeds")}


def _integral_arg(params):
    text = params.get("integral")
    if text is None:
        return None
    if isinstance(text, Expr):
        return text
    return parse_expression(str(text), ("x", "y"), _bindings(params))


def _fyx_family(params):
    f = _rational_arg(params.get("f"), _bindings(params))
    return _fyx("fyx", f, _bindings(params), integral=_integral_arg(params))


def _apm_family(params):
    f = _rational_arg(params.get("f"), _bindings(params))
    return _apm("apm", f, _bindings(params), integral=_integral_arg(params))


def _cohen_perturbed(params):
    b = _bindings(params)
    g = _rational_arg(params.get("g", "0"), b, "g")
    h = _rational_arg(params.get("h", "0"), b, "h")
    eps = as_fraction(_num(params, "eps"))
    radicand = Y * Y + 1 + Const(eps) * h.to_expr("y")
    fy = -X + sqrt(radicand) + Const(eps) * g.to_expr("y")
    guards = [Guard(radicand, "positive")]
    for r in (g, h):
        if r.deg_Q > 0:
            guards.append(Guard(RationalFunction(r.Q).to_expr("y")))
    s = 1 / math.sqrt(3)
    return PlanarMapModel(
        family="cohen_perturbed",
        params=MappingProxyType(b),
        fx=Y,
        fy=fy,
        guards=tuple(guards),
        extras=MappingProxyType({"kind": "cohen_perturbed", "g": g, "h": h, "eps": eps}),
        seeds=((s, s),),
    )


def _rotation(params):
    theta = float(_num(params, "theta"))
    c, s = Const(math.cos(theta)), Const(math.sin(theta))
    return PlanarMapModel(
        family="rotation",
        params=MappingProxyType({"theta": params["theta"]}),
        fx=c * X - s * Y,
        fy=s * X + c * Y,
        extras=MappingProxyType({"kind": "linear"}),
        integral=X * X + Y * Y,
    )


def _custom(params):
    b = _bindings(params)
    try:
        fx = params["fx"] if isinstance(params.get("fx"), Expr) else parse_expression(str(params["fx"]), ("x", "y"), b)
        fy = params["fy"] if isinstance(params.get("fy"), Expr) else parse_expression(str(params["fy"]), ("x", "y"), b)
    except KeyError as exc:
        raise ParamDomainError(f"custom family needs {exc.args[0]!r}") from None
    dens = params.get("density", "unity")
    guards = []
    if dens == "unity":
        dexpr = Const(1)
    elif dens == "one_over_xy":
        dexpr = Const(1) / (X * Y)
        guards += [Guard(X), Guard(Y)]
    else:
        dexpr = dens if isinstance(dens, Expr) else parse_expression(str(dens), ("x", "y"), b)
        guards.append(Guard(dexpr))
        dens = "user"
    seeds = params.get("seeds", ())
    if isinstance(seeds, str):
        seeds = _parse_seeds(seeds)
    return PlanarMapModel(
        family="custom",
        params=MappingProxyType(b),
        fx=fx,
        fy=fy,
        density=dens,
        density_expr=dexpr,
        guards=tuple(guards),
        integral=_integral_arg(params),
        seeds=tuple(tuple(map(float, s)) for s in seeds),
    )


FAMILIES = {
    "cohen": _cohen,
    "mgm": _mgm,
    "lyness": _lyness,
    "br": _br,
    "br_reduced": _br_reduced,
    "fyx": _fyx_family,
    "apm": _apm_family,
    "cohen_perturbed": _cohen_perturbed,
    "rotation": _rotation,
    "custom": _custom,
}


def build_map(family, **params):
    """Build a :class:`PlanarMapModel`.

    >>> build_map("cohen").eval(0.0, 0.0)
    (0.0, 1.0)
    """
    try:
        ctor = FAMILIES[family]
    except KeyError:
        raise ParamDomainError(f"unknown family {family!r}; known: {sorted(FAMILIES)}") from None
    return ctor(params)


# ----------------------------------------------------------------------------------
# map spec files


_TEXT_KEYS = {"family", "f", "g", "h", "fx", "fy", "density", "integral", "seeds"}


def _parse_seeds(text):
    """``x1, y1; x2, y2; ...`` with optional parentheses around each pair."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip().removeprefix("(").removesuffix(")")
        if not chunk:
            continue
        try:
            x, y = chunk.split(",")
            out.append((float(x), float(y)))
        except ValueError:
            raise SpecFileError(f"bad seed {chunk!r}: expected 'x, y'") from None
    return out


def _parse_value(key, text, lineno):
    if key in _TEXT_KEYS:
        return text
    try:
        if "/" in text or ("." not in text and "e" not in text.lower()):
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise SpecFileError(f"line {lineno}: bad numeric value for {key!r}: {text!r}") from None


def parse_map_spec(text):
    """Parse ``key = value`` lines into a dict (``#`` starts a comment)."""
    spec = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecFileError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key.isidentifier():
            raise SpecFileError(f"line {lineno}: invalid key {key!r}")
        if key in spec:
            raise SpecFileError(f"line {lineno}: duplicate key {key!r}")
        spec[key] = _parse_value(key, value, lineno)
    if "family" not in spec:
        raise SpecFileError("spec file must declare 'family'")
    return spec


def read_map_spec(path):
    with open(path) as fh:
        return parse_map_spec(fh.read())


def model_from_spec(spec, **overrides):
    """Build the model described by a parsed spec dict (overrides win)."""
    params = {**spec, **overrides}
    family = params.pop("family")
    try:
        return build_map(family, **params)
    except ExpressionSyntaxError as exc:
        raise SpecFileError(str(exc)) from exc


def format_map_spec(spec):
    lines = []
    for k, v in spec.items():
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"
