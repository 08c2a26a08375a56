import json

import numpy as np
import pytest

from conftest import const_pair
from pencilspec import (GridFunction, Pencil, PencilPotentials, PencilSpectralPair, check_hyperbolic,
                        integrate_pencil, pencil_char, pencil_spectrum, spectral_pair)
from pencilspec.errors import NotHyperbolic


def test_integrate_free(free_pp):
    y, yq = integrate_pencil(free_pp, np.pi, 0.0, 1.0)
    assert abs(y) < 1e-12 and yq == pytest.approx(-1.0, abs=1e-12)
    y, yq = integrate_pencil(free_pp, np.pi / 2, 0.0, 1.0)
    assert y == pytest.approx(2 / np.pi, abs=1e-12) and abs(yq) < 1e-12


@pytest.mark.parametrize("c", [0.5, -1.2, 2.0])
def test_integrate_constant_p(c):
    pp = PencilPotentials(GridFunction.constant(c, 1025), GridFunction.constant(0.0, 1025))
    lam = c + np.sqrt(c * c + np.pi**2)
    y, _ = integrate_pencil(pp, lam, 0.0, 1.0)
    assert abs(y) < 1e-10


def test_char_examples(free_pp):
    assert abs(pencil_char(free_pp, 2 * np.pi, "T2")) < 1e-12
    assert abs(pencil_char(free_pp, 1.5 * np.pi, Pencil.T1)) < 1e-12
    pp = const_pair(0.8)
    for n in (-3, -1, 1, 4):
        assert abs(pencil_char(pp, 0.8 + np.pi * n, "T2")) < 1e-10


def test_free_spectra(free_pp):
    pair = spectral_pair(free_pp, 5)
    for n in range(-5, 6):
        if n:
            assert pair.lam(n) == pytest.approx(np.pi * n, abs=1e-10)
        assert pair.mu(n) == pytest.approx(np.pi * (n - 0.5), abs=1e-10)
    assert 0 not in dict(pair.lambda_entries)


def test_constant_p_closed_form():
    pp = PencilPotentials(GridFunction.constant(1.0, 1025), GridFunction.constant(0.0, 1025))
    lam = dict(pencil_spectrum(pp, "T2", [-3, -2, -1, 1, 2, 3]))
    for n, v in lam.items():
        assert v == pytest.approx(1 + np.sign(n) * np.sqrt(1 + np.pi**2 * n**2), abs=1e-9)
    assert lam[1] == pytest.approx(4.296908, abs=1e-6)


@pytest.mark.parametrize("c", [0.7, -0.4])
def test_shifted_pair(c):
    pair = spectral_pair(const_pair(c), 6)
    for n, v in pair.lambda_entries:
        assert v == pytest.approx(c + np.pi * n, abs=1e-9)
    for n, v in pair.mu_entries:
        assert v == pytest.approx(c + np.pi * (n - 0.5), abs=1e-9)


def test_check_hyperbolic_examples(free_pp):
    ok, (m0, m1) = check_hyperbolic(free_pp)
    assert ok and m0 == pytest.approx(-np.pi / 2, abs=1e-10) and m1 == pytest.approx(np.pi / 2, abs=1e-10)
    ok, (m0, m1) = check_hyperbolic(const_pair(0.7))
    assert ok and m0 == pytest.approx(0.7 - np.pi / 2, abs=1e-9) and m1 == pytest.approx(0.7 + np.pi / 2, abs=1e-9)


def test_not_hyperbolic():
    # r = 4(1-x): the first pair of mixed-condition eigenvalues has left the real axis
    x = np.linspace(0, 1, 513)
    pp = PencilPotentials(GridFunction.constant(0.0, 513), GridFunction(4 * (1 - x)))
    ok, _ = check_hyperbolic(pp)
    assert not ok
    with pytest.raises(NotHyperbolic):
        spectral_pair(pp, 3)


def test_ensemble_interlacing_and_asymptotics(ensemble):
    for pp in ensemble:
        pair = spectral_pair(pp, 12)
        lam, mu = dict(pair.lambda_entries), dict(pair.mu_entries)
        for k in lam:
            assert mu[k] < lam[k] < mu[k + 1] if k + 1 in mu else mu[k] < lam[k]
        rem = np.array([lam[n] - np.pi * n - pp.p0 for n in lam])
        ns = np.array(list(lam))
        # tails bounded by C/|n|
        C = np.max(np.abs(rem) * np.abs(ns))
        assert C < 2.0
        assert np.max(np.abs(rem[np.abs(ns) > 8])) < np.max(np.abs(rem[np.abs(ns) <= 2]))
        ok, _ = check_hyperbolic(pp)
        assert ok


def test_json_csv():
    pair = spectral_pair(const_pair(0.3, 129), 2)
    d = json.loads(json.dumps(pair.to_dict()))
    assert set(d) == {"p0", "lambda", "mu"}
    assert [n for n, _ in d["lambda"]] == [-2, -1, 1, 2]
    assert PencilSpectralPair.from_dict(d).mu_entries == pair.mu_entries
    csv = pair.to_csv().splitlines()
    assert csv[0] == "n,lambda,mu" and csv[3].startswith("0,,")
    pp = const_pair(0.3, 9)
    d = json.loads(json.dumps(pp.to_dict()))
    assert d["p"]["n_points"] == 9
    assert np.array_equal(PencilPotentials.from_dict(d).r.values, pp.r.values)
    bare = PencilPotentials.from_dict({"p": [0.0] * 9, "r": list(pp.r.values)})
    assert np.array_equal(bare.r.values, pp.r.values)
    assert pp.to_csv().splitlines()[0] == "x,p,r"
