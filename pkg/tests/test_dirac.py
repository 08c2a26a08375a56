import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pencilspec import DiracPotential, Form, GridFunction, Which, dirac_char, dirac_spectrum, integrate_dirac
from pencilspec.dirac import Spectrum, prufer_angle
from pencilspec.errors import IntegrationOverflow

N = 513


def zero():
    return DiracPotential.scalar(0.0, N)


def sample_q(seed=0, n=N, h=0.0):
    rng = np.random.default_rng(seed)
    a, b, c, d = rng.uniform(-0.5, 0.5, 4)
    q1 = GridFunction.from_callable(lambda x: a * np.sin(2 * np.pi * x) + b * x, n)
    q2 = GridFunction.from_callable(lambda x: c * np.cos(np.pi * x) + d, n)
    return DiracPotential.akns(q1, q2, h)


def test_integrate_free():
    _, end = integrate_dirac(zero(), np.pi, (1.0, 0.0))
    np.testing.assert_allclose(end, [-1.0, 0.0], atol=1e-12)
    _, end = integrate_dirac(zero(), np.pi / 2, (1.0, 0.0))
    np.testing.assert_allclose(end, [0.0, 1.0], atol=1e-12)
    (u1, u2), _ = integrate_dirac(zero(), 2.0, (1.0, 0.0))
    np.testing.assert_allclose(u1.values, np.cos(2 * u1.x), atol=1e-12)
    np.testing.assert_allclose(u2.values, np.sin(2 * u1.x), atol=1e-12)


@pytest.mark.parametrize("h,lam", [(0.7, 1.3), (-2.0, 5.0), (0.3, -4.1)])
def test_integrate_scalar_shift(h, lam):
    _, end = integrate_dirac(DiracPotential.scalar(h, N), lam, (1.0, 0.0))
    np.testing.assert_allclose(end, [np.cos(lam - h), np.sin(lam - h)], atol=1e-12)


def test_char_examples():
    assert abs(dirac_char(zero(), np.pi, "D2")) < 1e-12
    assert abs(dirac_char(zero(), np.pi / 2, "D1")) < 1e-12
    assert dirac_char(zero(), np.pi / 2, Which.D2) == pytest.approx(1.0, abs=1e-12)


def test_overflow_guard():
    big = DiracPotential(GridFunction.constant(400.0, 9), GridFunction.constant(0.0, 9),
                         GridFunction.constant(-400.0, 9))
    with pytest.raises(IntegrationOverflow):
        integrate_dirac(big, 0.0)


def test_free_spectra():
    n = np.arange(-3, 4)
    s2 = dirac_spectrum(zero(), "D2", -3, 3)
    s1 = dirac_spectrum(zero(), "D1", -3, 3)
    np.testing.assert_allclose(s2.values, np.pi * n, atol=1e-10)
    np.testing.assert_allclose(s1.values, np.pi * (n - 0.5), atol=1e-10)
    s = dirac_spectrum(DiracPotential.scalar(0.7, N), "D2", -3, 3)
    np.testing.assert_allclose(s.values, np.pi * n + 0.7, atol=1e-10)


def test_index_cap():
    with pytest.raises(ValueError):
        dirac_spectrum(zero(), "D2", -300, 300)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6), st.floats(-3, 3))
def test_shift_covariance(seed, h):
    Q0 = sample_q(seed)
    for which in ("D1", "D2"):
        a = dirac_spectrum(Q0, which, -6, 6).values
        b = dirac_spectrum(sample_q(seed, h=h), which, -6, 6).values
        assert np.max(np.abs(b - a - h)) <= 2e-10


@pytest.mark.parametrize("seed", range(3))
def test_interlacing_and_asymptotics(seed):
    Q = sample_q(seed)
    mu = dirac_spectrum(Q, "D1", -15, 16)
    lam = dirac_spectrum(Q, "D2", -15, 15)
    assert np.all(np.diff(lam.values) > 0) and np.all(np.diff(mu.values) > 0)
    assert np.all(mu.values[:-1] < lam.values) and np.all(lam.values < mu.values[1:])
    rem = lam.values - np.pi * lam.indices - lam.trace_half
    assert np.max(np.abs(rem)) < Q.traceless_bound() + 1e-12
    assert abs(rem[-1]) < abs(rem).max() or abs(rem).max() < 1e-3


def test_prufer_monotone():
    Q = sample_q(4)
    lams = np.linspace(-30, 30, 2001)
    phi = prufer_angle(Q, lams)
    assert np.all(np.diff(phi) > 0)


def test_count_by_sign_changes():
    Q = sample_q(5)
    for which in ("D1", "D2"):
        s = dirac_spectrum(Q, which, -8, 8)
        lo, hi = s[-6], s[6]
        lams = np.linspace(lo + 1e-6, hi - 1e-6, 4000)
        vals = np.array([dirac_char(Q, l, which) for l in lams])
        changes = np.count_nonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))
        assert changes == 6 - (-6) - 1


def test_richardson():
    # grid halving: the Magnus scheme is exact for the interpolant, so the
    # difference is the second-order potential-interpolation error
    def q(n):
        return DiracPotential.akns(GridFunction.from_callable(lambda x: 0.4 * np.sin(3 * x), n),
                                   GridFunction.from_callable(lambda x: 0.3 * np.cos(5 * x), n))
    e = [dirac_spectrum(q(n), "D2", -5, 5).values for n in (129, 257, 513)]
    d1, d2 = np.max(np.abs(e[0] - e[1])), np.max(np.abs(e[1] - e[2]))
    assert 3.0 < d1 / d2 < 5.0


def test_forms_checked():
    g = GridFunction.constant(0.0, 9)
    with pytest.raises(ValueError):
        DiracPotential(GridFunction.constant(1.0, 9), g, g, Form.P_MU, 0.5)
    with pytest.raises(ValueError):
        DiracPotential(GridFunction.constant(1.0, 9), g, g, Form.AKNS_SHIFTED, 0.0)


def test_json_roundtrip():
    Q = sample_q(1, n=17, h=0.25)
    d = json.loads(json.dumps(Q.to_dict()))
    assert d["form"] == "AKNS_SHIFTED" and d["h"] == 0.25
    Q2 = DiracPotential.from_dict(d)
    assert np.array_equal(Q2.p12.values, Q.p12.values)
    s = dirac_spectrum(Q, "D1", -2, 2)
    d = json.loads(json.dumps(s.to_dict()))
    assert d["which"] == "D1" and len(d["entries"]) == 5
    assert Spectrum.from_dict(d).entries == s.entries
