"""Analysis pipeline and JSON-ready report assembly."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import dynamics, finiteness, normal_form, spectral
from .errors import BirkhoffMapsError, NotPolynomializable
from .exact import QI

SCHEMA = 1
DEFAULT_PERIODS = tuple(range(3, 13))
PURITY_TOL = 1e-8


def cplx(z):
    z = complex(z)
    return [z.real, z.imag]


def jsonable(v):
    """Complex as ``[re, im]``, rationals as ``"p/q"``, arrays as lists."""
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return jsonable(v.tolist())
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, QI):
        return [str(v.re), str(v.im)]
    if isinstance(v, (complex, np.complexfloating)):
        return cplx(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return v


def _birkhoff_entry(model, p, n_max, tol_res):
    jet = model.jet(p, 2 * n_max + 1)
    res = normal_form.birkhoff_constants(jet, p, n_max, tol_res)
    entry = {
        "constants": [[n, cplx(b)] for n, b in res.constants],
        "provenance": {f"B{n}": "algorithmic" for n, _ in res.constants},
        "imaginary_purity": [[n, v] for n, v in res.imaginary_purity],
        "small_divisors": [[k, list(ij), cplx(d)] for k, ij, d in res.small_divisors],
    }
    if res.closed_form_b1 is not None:
        entry["b1_closed_form"] = cplx(res.closed_form_b1)
        entry["provenance"]["b1_closed_form"] = "closed-form"
        entry["b1_agreement"] = abs(res.closed_form_b1 - res.b(1)) if res.constants else None
    if res.obstruction is not None:
        entry["obstruction"] = str(res.obstruction)
    return res, entry


def _samples_near(model, p, radius, n, rng):
    out = []
    tries = 0
    while len(out) < n and tries < 50 * n:
        tries += 1
        q = np.asarray(p) + rng.uniform(-radius, radius, 2)
        if model.in_domain(q[0], q[1]) and model.in_domain(*model(q)):
            out.append(q)
    return np.array(out)


def _finiteness(model, periods):
    certs = []
    for N in periods:
        try:
            c = finiteness.certify_finiteness(model, N)
        except NotPolynomializable as exc:
            c = finiteness.FinitenessCertificate(
                finiteness.Status.INCONCLUSIVE, "none", N, reason=str(exc)
            )
        certs.append(c)
    return certs


def _finiteness_ok(certs):
    """An N-independent certificate must cover infinitely many periods."""
    good = [c for c in certs if c.certified]
    return bool(good) and all(c.n_independent for c in good)


def analyze(model, n_max=1, tol_resonance=spectral.RESONANCE_TOL, periods=DEFAULT_PERIODS,
            seed=0, orbits_csv=None):
    """Run the full pipeline and return ``(report_dict, failures)``."""
    rng = np.random.default_rng(seed)
    k_max = 2 * n_max + 1
    report = {
        "schema": SCHEMA,
        "map": model.describe(),
        "options": {"n_max": n_max, "tol_resonance": tol_resonance, "periods": list(periods),
                    "seed": seed},
        "fixed_points": [],
    }
    failures = []
    seed_failures = []
    points = spectral.find_fixed_points(model, failures=seed_failures)
    for s, msg in seed_failures:
        failures.append({"stage": "fixed_points", "seed": list(s), "error": msg})

    certs = _finiteness(model, periods)
    report["finiteness"] = [c.to_dict() for c in certs]
    fin_ok = _finiteness_ok(certs)

    notes = []
    integral = None
    if model.integral is not None:
        V = dynamics.FirstIntegral.of_model(model)
        centre = points[0] if points else np.zeros(2)
        qs = _samples_near(model, centre, 0.5, 1000, rng)
        resid = dynamics.verify_first_integral(model, V, qs) if len(qs) else float("nan")
        integral = {"expression": str(model.integral), "residual": resid,
                    "verified": bool(resid < 1e-10)}
        report["first_integral"] = integral
        if integral["verified"]:
            notes.append("first integral verified")

    candidates = []
    for p in points:
        entry = {"point": [float(p[0]), float(p[1])]}
        try:
            rep = spectral.classify_elliptic(model, p, k_max=k_max, tol=tol_resonance)
        except BirkhoffMapsError as exc:
            failures.append({"stage": "classify", "point": entry["point"], "error": str(exc)})
            report["fixed_points"].append(entry)
            continue
        entry.update({
            "eigenvalues": [cplx(e) for e in rep.eigenvalues],
            "modulus_defect": rep.modulus_defect,
            "theta": rep.theta,
            "is_elliptic": rep.is_elliptic,
            "resonance_orders": rep.resonance_orders,
            "near_resonances": [[l, d] for l, d in rep.near_resonances],
            "det": rep.det,
        })
        if rep.criterion is not None:
            entry["criterion"] = rep.criterion
        qs = _samples_near(model, p, 0.3, 50, rng)
        if len(qs):
            entry["measure_residual"] = dynamics.measure_residual(model, qs)
        stability = "none-computed"
        if rep.is_elliptic and not rep.is_resonant(k_max):
            try:
                res, b = _birkhoff_entry(model, p, n_max, tol_resonance)
                entry["birkhoff"] = b
                stability = normal_form.stability_from_bn(res)
                first = res.first_nonzero()
                if first is not None:
                    candidates.append((p, first, entry))
            except BirkhoffMapsError as exc:
                failures.append({"stage": "birkhoff", "point": entry["point"], "error": str(exc)})
        elif rep.is_elliptic:
            entry["note"] = f"{k_max}-resonant: Birkhoff constants not computed"
        entry["stability"] = stability
        report["fixed_points"].append(entry)

    verdict = {"status": "INCONCLUSIVE", "notes": list(notes)}
    if not fin_ok:
        verdict["notes"].append("finiteness not certified by an N-independent argument")
    for p, (n, b), entry in candidates:
        pure = abs(b.real) <= PURITY_TOL * max(1.0, abs(b))
        measure = entry.get("measure_residual", 0.0) <= 1e-8
        if not pure:
            verdict["notes"].append(
                f"B_{n} has nonzero real part at {entry['point']}: {entry['stability']}")
            continue
        if not measure:
            verdict["notes"].append(f"invariant density not confirmed at {entry['point']}")
            continue
        if fin_ok:
            m = 2 * n + 4
            verdict = {"status": f"NOT_C{m}_INTEGRABLE", "m": m, "n": n,
                       "point": entry["point"], "B": cplx(b), "notes": list(notes)}
            break
    if not candidates:
        verdict["notes"].append("no elliptic non-resonant point with a nonzero Birkhoff constant")
    report["verdict"] = verdict

    if orbits_csv:
        _write_level_samples(model, points, orbits_csv, failures)
    report["failures"] = failures
    return jsonable(report)


def _write_level_samples(model, points, path, failures):
    samples = []
    if model.integral is not None:
        V = dynamics.FirstIntegral.of_model(model)
        for p in points:
            try:
                rep = spectral.classify_elliptic(model, p)
                if not rep.is_elliptic:
                    continue
                X = dynamics.lie_symmetry_field(V, model=model, p=p)
                for r in np.linspace(0.01, 0.1, 10):
                    samples.append(dynamics.level_curve_sample(X, model, (p[0] + r, p[1])))
            except BirkhoffMapsError as exc:
                failures.append({"stage": "orbits_csv", "error": str(exc)})
    if samples:
        dynamics.write_samples_csv(path, samples)
    else:
        orbit = model.orbit(points[0] + 0.05, 200) if points else model.orbit((0.1, 0.1), 200)
        dynamics.write_orbit_csv(path, orbit)
