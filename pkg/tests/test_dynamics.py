import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from birkhoffmaps.dynamics import (
    FirstIntegral,
    annulus_samples,
    bochner_residual,
    check_lie_symmetry,
    isochronous_rescale,
    level_curve_sample,
    lie_symmetry_field,
    measure_residual,
    newton_periodic,
    period,
    verify_first_integral,
    write_orbit_csv,
    write_samples_csv,
)
from birkhoffmaps.errors import DensityVanishes, FlowMissesImage, HitSingularLine
from birkhoffmaps.maps import build_map


def domain_points(model, centre, radius, n, rng):
    out = []
    while len(out) < n:
        q = np.asarray(centre) + rng.uniform(-radius, radius, 2)
        if model.in_domain(*q) and model.in_domain(*model(q)):
            out.append(q)
    return np.array(out)


CASES = [
    ("mgm", {"a": 1}, (0.0, 0.0), 0.8),
    ("lyness", {"a": 2}, (2.0, 2.0), 1.0),
    ("br", {"A": 1, "B": 2, "C": 1}, None, 0.3),
    ("rotation", {"theta": 0.7}, (0.0, 0.0), 1.0),
]


@pytest.mark.parametrize("family,params,p,radius", CASES)
def test_integral_and_symmetry(family, params, p, radius, rng):
    m = build_map(family, **params)
    if p is None:
        from birkhoffmaps.spectral import find_fixed_points
        p = find_fixed_points(m)[0]
    V = FirstIntegral.of_model(m)
    qs = domain_points(m, p, radius, 200, rng)
    assert verify_first_integral(m, V, qs) < 1e-12
    X = lie_symmetry_field(V, model=m, p=p)
    assert check_lie_symmetry(X, m, qs[:50]) < 1e-7


def test_br_c1_integral_on_wide_domain(rng):
    m = build_map("br", A=0, B=0, C=1)
    qs = domain_points(m, (0.0, 0.0), 5.0, 1000, rng)
    assert verify_first_integral(m, "(x^2 + y^2)/(x*y)", qs) < 1e-12


def test_cohen_negative_control(rng):
    m = build_map("cohen")
    qs = domain_points(m, (0.5, 0.5), 0.5, 200, rng)
    assert verify_first_integral(m, "x^2 + y^2 - x*y", qs) > 1e-3
    assert measure_residual(m, qs) < 1e-12


def test_density_vanishes():
    m = build_map("lyness", a=2)
    X = lie_symmetry_field(FirstIntegral.of_model(m), model=m)
    with pytest.raises(DensityVanishes):
        X.mu((0.0, 1.0))


def test_orientation_is_consistent():
    m = build_map("mgm", a=1)
    X = lie_symmetry_field(FirstIntegral.of_model(m), model=m, p=(0.0, 0.0))
    s = level_curve_sample(X, m, (0.05, 0.0))
    assert 0 < s.theta < 0.5
    s_rev = level_curve_sample(X.reversed(), m, (0.05, 0.0))
    assert abs(s.theta + s_rev.theta - 1) < 1e-8


def test_flow_misses_image():
    m = build_map("mgm", a=1)
    wrong = lie_symmetry_field("x^2 + y^2")
    with pytest.raises(FlowMissesImage):
        level_curve_sample(wrong, m, (0.2, 0.1))


def test_lyness_a1_every_orbit_period_five():
    m = build_map("lyness", a=1)
    po = newton_periodic(m, 5, (1.3, 0.7))
    assert po.residual <= 1e-11 and po.minimal_period == 5 and not po.isolated


def test_lyness_fixed_point_has_minimal_period_one():
    m = build_map("lyness", a=1)
    g = (1 + np.sqrt(5)) / 2
    po = newton_periodic(m, 5, (g, g))
    assert po.minimal_period == 1


def test_rotation_seven():
    m = build_map("rotation", theta=2 * np.pi / 7)
    po = newton_periodic(m, 7, (0.3, -0.2))
    assert po.residual <= 1e-11 and not po.isolated


def test_cohen_fourteen_isolated():
    m = build_map("cohen")
    s = 1 / np.sqrt(3)
    orbits = []
    for dx in np.linspace(-1.5, 1.5, 9):
        for dy in np.linspace(-1.5, 1.5, 9):
            try:
                po = newton_periodic(m, 14, (s + dx, s + dy))
            except Exception:
                continue
            if po.minimal_period == 14:
                assert po.isolated
                orbits.append(po.orbit)
    assert orbits
    reps = {tuple(np.round(min(o.tolist()), 6)) for o in orbits}
    assert 0 < len(reps) < len(orbits)


def test_singular_line():
    with pytest.raises(HitSingularLine):
        newton_periodic(build_map("lyness", a=2), 3, (0.0, 1.0))


def radial_field(a):
    def X(q):
        r2 = q[0] ** 2 + q[1] ** 2
        return (1 + r2**a) * np.array([-q[1], q[0]])

    return X


@settings(max_examples=6)
@given(st.sampled_from([0.5, 1.0, 1.5]), st.floats(0.1, 1.2), st.floats(0, 2 * np.pi))
def test_period_oracle(a, r, phi):
    q = (r * np.cos(phi), r * np.sin(phi))
    T = period(radial_field(a), q)
    assert abs(T - 2 * np.pi / (1 + r ** (2 * a))) < 1e-6


def test_linear_center_isochronous():
    X = lambda q: 2.0 * np.array([-q[1], q[0]])  # noqa: E731
    Y = isochronous_rescale(X)
    for r in (0.1, 0.5, 2.0):
        assert abs(Y.T((r, 0.0)) - np.pi) < 1e-9
        assert abs(Y.measured_period((r, 0.0)) - 1) < 1e-9


def test_mgm_isochronous_and_drift():
    m = build_map("mgm", a=1)
    X = lie_symmetry_field(FirstIntegral.of_model(m), model=m, p=(0.0, 0.0))
    Y = isochronous_rescale(X)
    for r in np.linspace(0.02, 0.2, 10):
        assert abs(Y.measured_period((r, 0.0)) - 1) < 1e-6
        assert level_curve_sample(X, m, (r, 0.0)).energy_drift < 1e-9


def test_mgm_theta_tends_to_one_sixth():
    m = build_map("mgm", a=1)
    X = lie_symmetry_field(FirstIntegral.of_model(m), model=m, p=(0.0, 0.0))
    th = [level_curve_sample(X, m, (r, 0.0)).theta for r in (0.2, 0.1, 0.05, 0.02)]
    gaps = [abs(t - 1 / 6) for t in th]
    assert gaps == sorted(gaps, reverse=True) and gaps[-1] < 1e-4


def test_bochner_rotation_exact():
    theta = 2 * np.pi * 0.1234
    m = build_map("rotation", theta=theta)
    X = lie_symmetry_field(FirstIntegral.of_model(m), model=m, p=(0.0, 0.0))
    Y = isochronous_rescale(X)
    qs = annulus_samples((0.0, 0.0), 0.05, 0.5, 5, seed=1)
    st_ = bochner_residual(Y, m, (0.0, 0.0), qs)
    assert st_.max_residual < 1e-10


def test_bochner_wrong_time_negative_control():
    # for a linear rotation Phi is linear and commutes with DF for any time
    # scale, so the control uses mgm and the curve-wise conjugacy target
    m = build_map("mgm", a=1)
    X = lie_symmetry_field(FirstIntegral.of_model(m), model=m, p=(0.0, 0.0))
    Y = isochronous_rescale(X)
    qs = annulus_samples((0.0, 0.0), 0.3, 0.5, 3, seed=1)
    good = bochner_residual(Y, m, (0.0, 0.0), qs)
    bad = bochner_residual(Y, m, (0.0, 0.0), qs, scale=0.5 * Y.T(qs[0]))
    assert good.max_curve_residual < 1e-10
    assert bad.max_curve_residual > 1e-2


def test_exports(tmp_path):
    m = build_map("mgm", a=1)
    X = lie_symmetry_field(FirstIntegral.of_model(m), model=m, p=(0.0, 0.0))
    samples = [level_curve_sample(X, m, (r, 0.0)) for r in (0.05, 0.1)]
    p1, p2 = tmp_path / "s.csv", tmp_path / "o.csv"
    write_samples_csv(p1, samples)
    write_orbit_csv(p2, m.orbit((0.1, 0.0), 10), FirstIntegral.of_model(m))
    assert len(list(csv.reader(open(p1)))) == 3
    assert len(list(csv.reader(open(p2)))) == 12
