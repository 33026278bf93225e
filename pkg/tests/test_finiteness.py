import csv
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from birkhoffmaps.errors import DegreeZeroRecurrence, NotPolynomializable, ScanLimitExceeded
from birkhoffmaps.exact import MPoly, QI, bareiss_det
from birkhoffmaps.finiteness import (
    Recurrence,
    Status,
    build_leading_system,
    certify_finiteness,
    cohen_matrix,
    cohen_sign_scan,
    cohen_toeplitz_sequences,
    fibonacci_parity,
    smoke_check,
    toeplitz_t,
)
from birkhoffmaps.maps import build_map
from birkhoffmaps.rational import RationalFunction


def br(C, A=0, B=0):
    return build_map("br", A=A, B=B, C=C)


def exact_zero(system, w):
    return all(form(w) == 0 for form in system.forms)


@pytest.mark.parametrize("C", [2, Fraction(1, 2), 3, Fraction(-5, 2)])
@pytest.mark.parametrize("N", range(3, 11))
def test_br_certified_off_unit_circle(C, N):
    c = certify_finiteness(br(C), N)
    assert c.status is Status.CERTIFIED and c.method == "product-trick" and c.n_independent


@pytest.mark.parametrize("N", range(3, 11))
def test_br_c1_all_ones(N):
    c = certify_finiteness(br(1), N)
    assert c.status is Status.NONZERO_SOLUTION
    assert c.witness == [Fraction(1)] * N


@pytest.mark.parametrize("N", range(3, 11))
def test_br_c_minus_one(N):
    c = certify_finiteness(br(-1), N)
    if N % 2:
        assert c.status is Status.CERTIFIED
    else:
        assert c.status is Status.NONZERO_SOLUTION
        x0, x1, x2 = (MPoly.var(3, k) for k in range(3))
        system = build_leading_system(Recurrence(x0 * x2 + x1 * x1), N)
        assert exact_zero(system, c.witness)
        assert any(v != 0 for v in c.witness)


def test_br_degenerate_constant():
    c = certify_finiteness(Recurrence.fyx(RationalFunction([1, 1, 0])), 5)
    assert c.status is Status.INCONCLUSIVE


def test_fyx_and_apm_monomial():
    cube = build_map("fyx", f="y^3 + 1")
    square = build_map("apm", f="y^2")
    for N in range(3, 13):
        for m in (cube, square):
            c = certify_finiteness(m, N)
            assert c.status is Status.CERTIFIED and c.method == "monomial-leading"
    assert certify_finiteness(build_map("fyx", f="a + y", a=2), 5).status is Status.INCONCLUSIVE
    assert certify_finiteness(build_map("mgm", a=1), 5).status is Status.INCONCLUSIVE


def test_monomial_gap_gives_witness():
    # g = x0 x1 x2 - 1: the leading monomial owns no pure power
    x0, x1, x2 = (MPoly.var(3, k) for k in range(3))
    rec = Recurrence(x0 * x1 * x2 - 1)
    c = certify_finiteness(rec, 4)
    assert c.status is Status.NONZERO_SOLUTION
    assert exact_zero(build_leading_system(rec, 4), c.witness)


def test_errors():
    with pytest.raises(NotPolynomializable):
        certify_finiteness(build_map("rotation", theta=1.0), 5)
    with pytest.raises(DegreeZeroRecurrence):
        build_leading_system(Recurrence(MPoly.const(3, 1)), 4)
    with pytest.raises(ScanLimitExceeded):
        cohen_sign_scan(17)


def test_leading_system_shapes():
    s = build_leading_system(Recurrence.cohen(), 5)
    assert s.N == 5 and s.d == 2 and len(s.forms) == 5
    # (x0 + x2)^2 - x1^2 = (x0 - x1 + x2)(x0 + x1 + x2)
    x = [Fraction(1), Fraction(1), Fraction(0), Fraction(-1), Fraction(-1)]
    assert s.evaluate(x)[0] == (x[0] + x[2]) ** 2 - x[1] ** 2


@pytest.mark.parametrize("N", range(3, 21))
def test_cohen_all_ones_determinant(N):
    d = bareiss_det(cohen_matrix([1] * N).tolist())
    assert d == (0 if N % 3 == 0 else 3)


def test_toeplitz_sequences():
    led = cohen_toeplitz_sequences(60)
    cycle = [1, 0, -1, -1, 0, 1]
    assert led.t[1:] == [cycle[(n - 1) % 6] for n in range(1, 61)]
    assert led.t[0] == 1
    assert led.a[3:9] == [0, 3, 3, 0, 3, 3]
    assert [toeplitz_t(n) for n in range(1, 13)] == led.t[1:13]


@given(st.integers(3, 20))
def test_cohen_certificate_dichotomy(N):
    c = certify_finiteness(build_map("cohen"), N)
    if N % 3 == 0:
        assert c.status is Status.NONZERO_SOLUTION
        system = build_leading_system(Recurrence.cohen(), N)
        assert exact_zero(system, c.witness) and any(c.witness)
    else:
        assert c.status is Status.CERTIFIED and c.n_independent
        assert c.method == ("sign-determinants" if N <= 16 else "fibonacci-parity")


@pytest.mark.parametrize("N", range(3, 13))
def test_sign_scan_parity(N):
    led = cohen_sign_scan(N)
    assert led.dets.shape == (2**N,)
    assert led.parity_constant()
    assert int(led.dets[0]) % 2 == fibonacci_parity(N)
    if N % 3:
        assert led.singular() is None
    else:
        eps, w = led.kernel_witness()
        assert any(w)
        A = cohen_matrix(eps)
        assert not np.any(A @ np.array([int(v) for v in w]))


def test_sign_scan_matches_direct(rng):
    led = cohen_sign_scan(7)
    for k in rng.choice(2**7, size=20, replace=False):
        assert bareiss_det(cohen_matrix(led.signs[k]).tolist()) == led.dets[k]


def test_perturbed_cohen():
    g, h = RationalFunction([0, 0, 0, 1]), RationalFunction([0])
    rec = Recurrence.cohen_perturbed(g, h, Fraction(1, 10))
    assert rec.kind == "cohen_perturbed"
    assert Recurrence.cohen_perturbed(g, h, 0).kind == "cohen"
    c = certify_finiteness(rec, 6)
    assert c.method == "perturbed-leading"
    assert c.status is Status.CERTIFIED


def test_smoke_check_separates():
    cert = build_leading_system(Recurrence.fyx(RationalFunction([0, 0, 0, 1])), 5)
    x0, x1, x2 = (MPoly.var(3, k) for k in range(3))
    bad = build_leading_system(Recurrence(x0 * x2 - x1 * x1), 5)
    assert smoke_check(cert, 300) > 1e-3
    # all-ones is a solution, so the smoke residual at (1,...,1)/sqrt(5) is zero
    assert bad.residual(np.ones(5) / np.sqrt(5)) == 0


def test_gaussian_witness():
    # N = 6: r0^6 (-1)^15 = 1 has no real root r0, so the witness is Gaussian
    w6 = certify_finiteness(br(-1), 6).witness
    assert any(isinstance(v, QI) and v.im for v in w6)
    w4 = certify_finiteness(br(-1), 4).witness
    assert all(isinstance(v, Fraction) for v in w4)


def test_serialization(tmp_path):
    c = certify_finiteness(br(1), 4)
    d = json.loads(c.to_json())
    assert d["status"] == "NONZERO_SOLUTION" and d["witness"] == ["1"] * 4
    led = cohen_sign_scan(4)
    p = tmp_path / "dets.csv"
    led.to_csv(p)
    rows = list(csv.reader(open(p)))
    assert rows[0][-2:] == ["det", "parity"] and len(rows) == 17
