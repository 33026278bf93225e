import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from birkhoffmaps.errors import NotElliptic, ResonanceObstruction, ThreeResonance
from birkhoffmaps.jets import Jet2, JetMap2, graded_indices, jet_compose
from birkhoffmaps.maps import build_map
from birkhoffmaps.normal_form import (
    BirkhoffResult,
    b1_br_reduced,
    b1_closed_form,
    b1_mgm,
    birkhoff_constants,
    diagonalize,
    q1_polynomial,
    stability_from_bn,
)

COHEN_P = (1 / np.sqrt(3), 1 / np.sqrt(3))
# independent sympy series expansion + closed formula, same eigenvector scaling
COHEN_B1 = 1j * np.sqrt(15) / 32


def real_jet_map(seed, degree, theta, scale=0.3):
    """Real polynomial jet at the origin with linear part a rotation by ``theta``."""
    r = np.random.default_rng(seed)
    comps = []
    for row in range(2):
        t = np.zeros((degree + 1, degree + 1), dtype=complex)
        for i, j in graded_indices(degree):
            if i + j >= 2:
                t[i, j] = scale * r.normal()
        comps.append(t)
    c, s = np.cos(theta), np.sin(theta)
    comps[0][1, 0], comps[0][0, 1] = c, -s
    comps[1][1, 0], comps[1][0, 1] = s, c
    return JetMap2(Jet2(comps[0], (0.0, 0.0), degree), Jet2(comps[1], (0.0, 0.0), degree))


def test_rotation_is_already_normal():
    theta = 2 * np.pi * (np.sqrt(2) - 1)
    jet = build_map("rotation", theta=theta).jet((0.0, 0.0), 5)
    d = diagonalize(jet)
    assert abs(d.lam - np.exp(1j * theta)) < 1e-14
    assert np.max(np.abs(d.jet.fx.coeffs[3:])) == 0
    res = birkhoff_constants(jet, (0, 0), 2)
    assert [abs(b) for _, b in res.constants] == [0, 0]


def test_mgm_lambda_matches_angle():
    theta = 1.1
    d = diagonalize(build_map("mgm", a=2 * np.cos(theta)).jet((0.0, 0.0), 3))
    assert abs(d.lam - np.exp(1j * theta)) < 1e-14


@pytest.mark.parametrize("family,params,p", [
    ("cohen", {}, COHEN_P),
    ("mgm", {"a": 0.7}, (0.0, 0.0)),
    ("lyness", {"a": 2}, (2.0, 2.0)),
])
def test_round_trip_and_reality(family, params, p):
    jet = build_map(family, **params).jet(p, 5)
    d = diagonalize(jet)
    assert d.reconstruct().max_abs_diff(jet) < 1e-10
    for i, j in graded_indices(5):
        assert abs(d.g(i, j) - np.conj(d.f(j, i))) < 1e-12


def test_cohen_b1_routes_agree_with_oracle():
    jet = build_map("cohen").jet(COHEN_P, 3)
    closed = b1_closed_form(diagonalize(jet))
    algo = birkhoff_constants(jet, COHEN_P, 1).b(1)
    assert abs(closed - COHEN_B1) < 1e-12
    assert abs(algo - COHEN_B1) < 1e-12


@pytest.mark.parametrize("a", [-1.5, -0.5, 0.5, 1.0, 1.9])
def test_mgm_origin(a):
    jet = build_map("mgm", a=a).jet((0.0, 0.0), 3)
    assert abs(b1_closed_form(diagonalize(jet)) - 3j * a / np.sqrt(4 - a * a)) < 1e-8
    assert abs(birkhoff_constants(jet, None, 1).b(1) - b1_mgm(a)) < 1e-8


@pytest.mark.parametrize("a", [2.5, 3.0, 5.0])
def test_mgm_symmetric_pair(a):
    z = np.sqrt((a - 2) / 2)
    for p in [(z, z), (-z, -z)]:
        jet = build_map("mgm", a=a).jet(p, 3)
        assert abs(birkhoff_constants(jet, p, 1).b(1) - b1_mgm(a)) < 1e-8
    assert abs(b1_mgm(3.0) + 28j * np.sqrt(2) / 9) < 1e-14


@pytest.mark.parametrize("a,c", [(0.3, 0.2), (1.0, 1.0), (-0.5, 0.1), (2.0, 1.5), (0.5, -0.3)])
def test_br_reduced_formula(a, c):
    jet = build_map("br_reduced", a=a, c=c).jet((1.0, 1.0), 3)
    b1 = birkhoff_constants(jet, (1.0, 1.0), 1).b(1)
    assert abs(b1 - b1_br_reduced(a, c)) < 1e-8 * max(1.0, abs(b1))


def test_q1_variety():
    for a in (0.2, 0.9, 1.7):
        # Q1(a, c) as a cubic in c
        c = np.poly1d([1.0, 0.0])
        cs = (a**4 - 3 * a**3 * c + 3 * a**2 * c**2 - a * c**3 - 4 * a**3 + 5 * a**2 * c
              - 2 * a * c**2 + c**3 + 4 * a**2 + 4 * a * c - 2 * c**2 - a + c)
        roots = [r.real for r in cs.roots if abs(r.imag) < 1e-12 and -1 < a - r.real < 3]
        roots = [r for r in roots if abs(1 - 3 * (3 - a + r) / (a + 1 - r)) > 1e-3]
        for r in roots:
            assert abs(q1_polynomial(a, r)) < 1e-12
            jet = build_map("br_reduced", a=a, c=r).jet((1.0, 1.0), 3)
            assert abs(birkhoff_constants(jet, None, 1).b(1)) < 1e-8
        off = birkhoff_constants(build_map("br_reduced", a=a, c=0.05).jet((1.0, 1.0), 3), None, 1)
        assert abs(off.b(1)) > 1e-4


def test_q1_exact_arithmetic():
    from fractions import Fraction as F

    assert q1_polynomial(F(2), F(2)) == 6 * 4
    assert q1_polynomial(F(0), F(0)) == 0


@given(st.integers(0, 5000), st.floats(0.3, 2.8))
def test_closed_form_matches_reduction(seed, theta):
    if min(abs(np.exp(1j * theta * k) - 1) for k in (1, 2, 3, 4)) < 1e-2:
        return
    jet = real_jet_map(seed, 3, theta)
    closed = b1_closed_form(diagonalize(jet))
    algo = birkhoff_constants(jet, None, 1).b(1)
    assert abs(closed - algo) <= 1e-8 * max(1.0, abs(closed))


@given(st.integers(0, 5000))
def test_b1_conjugation_invariance(seed):
    F = build_map("cohen").jet(COHEN_P, 3)
    r = np.random.default_rng(seed)
    # real near-identity change H of the shifted coordinates, fixing the base point
    tx = np.zeros((4, 4), dtype=complex)
    ty = np.zeros((4, 4), dtype=complex)
    for i, j in graded_indices(3):
        if i + j >= 2:
            tx[i, j], ty[i, j] = 0.5 * r.normal(), 0.5 * r.normal()
    tx[0, 0], ty[0, 0] = COHEN_P
    tx[1, 0] = ty[0, 1] = 1.0
    H = JetMap2(Jet2(tx, COHEN_P, 3), Jet2(ty, COHEN_P, 3))
    # H^{-1} by fixed-point iteration on jets
    ident = JetMap2.identity(3, COHEN_P)
    Hinv = ident
    for _ in range(4):
        HH = jet_compose(H, Hinv)
        Hinv = JetMap2(Hinv.fx - (HH.fx - ident.fx), Hinv.fy - (HH.fy - ident.fy))
    G = jet_compose(Hinv, jet_compose(F, H))
    b_F = birkhoff_constants(F, None, 1).b(1)
    b_G = birkhoff_constants(G, None, 1).b(1)
    assert abs(b_F - b_G) < 1e-8


def test_modulus_preservation_constraints():
    for a in (-1.7, -0.3, 0.8, 1.6):
        assert abs(birkhoff_constants(build_map("mgm", a=a).jet((0, 0), 5), None, 2).b(1).real) < 1e-12
    # |1 + B1 s + B2 s^2| = 1 + O(s^3) forces Re B2 = -|B1|^2 / 2
    res = birkhoff_constants(build_map("lyness", a=2).jet((2.0, 2.0), 5), None, 2)
    b1, b2 = res.b(1), res.b(2)
    assert abs(b1.real) < 1e-12
    assert abs(b2.real + abs(b1) ** 2 / 2) < 1e-12


def test_b2_on_five_resonance_is_computed():
    res = birkhoff_constants(build_map("rotation", theta=2 * np.pi / 5).jet((0, 0), 5), None, 2)
    assert [n for n, _ in res.constants] == [1, 2] and res.obstruction is None


def test_b2_obstructed_at_quarter_turn():
    res = birkhoff_constants(build_map("mgm", a=0.0).jet((0, 0), 5), None, 2)
    assert [n for n, _ in res.constants] == [1]
    assert res.obstruction.order == 4 and res.obstruction.degree == 3


def test_three_resonance():
    jet = build_map("br_reduced", a=2.5, c=0.5).jet((1.0, 1.0), 3)
    with pytest.raises(ThreeResonance):
        b1_closed_form(diagonalize(jet))
    with pytest.raises(ResonanceObstruction) as e:
        birkhoff_constants(jet, None, 1)
    assert e.value.order == 3


def test_not_elliptic():
    with pytest.raises(NotElliptic):
        diagonalize(build_map("mgm", a=3).jet((0.0, 0.0), 3))


def fake(*bs):
    return BirkhoffResult(1j, [(n + 1, b) for n, b in enumerate(bs)], None)


def test_stability_verdicts():
    assert stability_from_bn(fake(-0.3 + 0j)) == "attractor"
    assert stability_from_bn(fake(0.2 + 1j)) == "repeller"
    assert stability_from_bn(fake(135j / 256)) == "inconclusive-from-Bn"
    assert stability_from_bn(fake(0j, 0j)) == "none-computed"
    assert stability_from_bn(fake(0j, -0.1 + 0.5j)) == "attractor"
