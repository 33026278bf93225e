"""``birkhoffmaps`` command line: ``analyze`` and ``sweep``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import report
from .errors import (
    BirkhoffMapsError,
    ExpressionSyntaxError,
    NonRationalConstruct,
    ParamDomainError,
    SpecFileError,
)
from .maps import FAMILIES, model_from_spec, parse_map_spec, read_map_spec

EXIT_SPEC = 2
EXIT_NUMERIC = 3
SPEC_ERRORS = (SpecFileError, ExpressionSyntaxError, NonRationalConstruct, ParamDomainError)


def _number(text):
    text = text.strip()
    try:
        if "/" in text or ("." not in text and "e" not in text.lower()):
            return Fraction(text)
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise SpecFileError(f"bad number {text!r}") from None


def load_spec(target, params=()):
    """Spec dict from a file path, or a family name plus ``key=value`` params."""
    if os.path.exists(target):
        spec = read_map_spec(target)
    elif target in FAMILIES:
        spec = {"family": target}
    else:
        raise SpecFileError(f"{target!r} is neither a spec file nor a known family")
    extra = "\n".join(params)
    if extra:
        more = parse_map_spec(f"family = {spec['family']}\n{extra}")
        more.pop("family")
        spec.update(more)
    return spec


def parse_periods(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            lo, hi = part.split(":")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 2:
        raise SpecFileError(f"bad period list {text!r}")
    return sorted(set(out))


def parse_sweep(text):
    """``name=lo:hi:steps`` or ``name=v1,v2,...`` to ``(name, values)``."""
    if "=" not in text:
        raise SpecFileError(f"bad sweep {text!r}: expected name=...")
    name, rng = (s.strip() for s in text.split("=", 1))
    if rng.count(":") == 2:
        lo, hi, steps = rng.split(":")
        vals = [float(v) for v in np.linspace(float(lo), float(hi), int(steps))]
    else:
        vals = [_number(v) for v in rng.split(",") if v.strip()]
    if not vals:
        raise SpecFileError(f"empty sweep {text!r}")
    return name, vals


def _options(ns):
    return {
        "n_max": ns.n_max,
        "tol_resonance": ns.tol_resonance,
        "periods": tuple(parse_periods(ns.periods)) if ns.periods else report.DEFAULT_PERIODS,
        "seed": ns.seed,
    }


def _emit(obj, path):
    text = json.dumps(obj, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _numeric_failure(rep):
    return any(f.get("stage") in ("classify", "birkhoff") for f in rep.get("failures", []))


def cmd_analyze(ns):
    try:
        spec = load_spec(ns.target, ns.param)
        model = model_from_spec(spec)
        opts = _options(ns)
    except SPEC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    try:
        rep = report.analyze(model, orbits_csv=ns.orbits_csv, **opts)
    except BirkhoffMapsError as exc:
        rep = {"schema": report.SCHEMA, "map": model.describe(),
               "failures": [{"stage": "pipeline", "error": f"{type(exc).__name__}: {exc}"}]}
        _emit(rep, ns.output)
        return EXIT_NUMERIC
    _emit(rep, ns.output)
    return EXIT_NUMERIC if _numeric_failure(rep) else 0


def _sweep_point(args):
    spec, name, value, opts = args
    try:
        model = model_from_spec(spec, **{name: value})
        rep = report.analyze(model, **opts)
    except (BirkhoffMapsError, ValueError, ZeroDivisionError) as exc:
        rep = {"schema": report.SCHEMA, "failures": [
            {"stage": "pipeline", "error": f"{type(exc).__name__}: {exc}"}]}
    rep["sweep"] = {"param": name, "value": report.jsonable(value)}
    return rep


def _summary_row(rep):
    v = rep.get("verdict", {})
    b1 = None
    for fp in rep.get("fixed_points", []):
        consts = fp.get("birkhoff", {}).get("constants")
        if consts:
            b1 = consts[0][1]
            break
    return {
        "param": rep["sweep"]["param"],
        "value": rep["sweep"]["value"],
        "verdict": v.get("status", "ERROR"),
        "B1_re": "" if b1 is None else repr(b1[0]),
        "B1_im": "" if b1 is None else repr(b1[1]),
        "integral_verified": rep.get("first_integral", {}).get("verified", False),
        "failures": len(rep.get("failures", [])),
    }


def cmd_sweep(ns):
    try:
        spec = load_spec(ns.target, ns.param)
        name, values = parse_sweep(ns.sweep)
        opts = _options(ns)
        model_from_spec(spec, **{name: values[0]})
    except SPEC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    jobs = [(spec, name, v, opts) for v in values]
    if ns.workers > 1:
        with ProcessPoolExecutor(max_workers=ns.workers) as pool:
            reports = list(pool.map(_sweep_point, jobs))
    else:
        reports = [_sweep_point(j) for j in jobs]
    rows = [_summary_row(r) for r in reports]
    _emit({"schema": report.SCHEMA, "points": reports, "summary": rows}, ns.output)
    if ns.summary_csv:
        with open(ns.summary_csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="birkhoffmaps", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("target", help="map spec file, or a family name")
        p.add_argument("-p", "--param", action="append", default=[], metavar="KEY=VALUE",
                       help="set or override a spec entry (repeatable)")
        p.add_argument("--n-max", type=int, choices=(1, 2), default=1)
        p.add_argument("--tol-resonance", type=float, default=1e-9)
        p.add_argument("--periods", default=None, help="e.g. 3,4,5 or 3:12")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("-o", "--output", default=None, help="write JSON here instead of stdout")

    a = sub.add_parser("analyze", help="full local analysis of one map")
    common(a)
    a.add_argument("--orbits-csv", default=None, help="export level-curve samples")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="analyze a parameter grid")
    common(s)
    s.add_argument("--sweep", required=True, help="name=lo:hi:steps or name=v1,v2,...")
    s.add_argument("--summary-csv", default=None)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None):
    ns = build_parser().parse_args(argv)
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
