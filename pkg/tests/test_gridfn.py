import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pencilspec.gridfn import (GridFunction, GridMismatchError, cumulative_from_right, eval_at, grid,
                               integrate)


def test_integrate_examples():
    assert integrate(GridFunction.constant(1.0, 65)) == pytest.approx(1.0, abs=1e-15)
    assert integrate(GridFunction.from_callable(lambda x: x, 65)) == pytest.approx(0.5, abs=1e-15)
    f = GridFunction.from_callable(lambda x: np.sin(np.pi * x), 1025)
    assert abs(integrate(f) - 2 / np.pi) < 1e-6


def test_eval_examples():
    f = GridFunction.from_callable(lambda x: x, 33)
    assert eval_at(f, 0.3) == pytest.approx(0.3, abs=1e-15)
    g = GridFunction.from_callable(lambda x: x**2, 3)
    assert eval_at(g, 0.25) == pytest.approx(0.125)  # linear between 0 and 0.25
    with pytest.raises(ValueError):
        eval_at(f, 1.5)


def test_eval_at_nodes_exact():
    rng = np.random.default_rng(0)
    f = GridFunction(rng.normal(size=129))
    assert np.array_equal(f(f.x), f.values)


def test_cumulative_examples():
    n = 257
    x = grid(n)
    np.testing.assert_allclose(cumulative_from_right(GridFunction.constant(1.0, n)).values, 1 - x, atol=1e-14)
    assert np.all(cumulative_from_right(GridFunction.constant(0.0, n)).values == 0)
    g = cumulative_from_right(GridFunction(2 * x))
    np.testing.assert_allclose(g.values, 1 - x**2, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(3, 300))
def test_cumulative_matches_integral(seed, n):
    f = GridFunction(np.random.default_rng(seed).normal(size=n))
    g = cumulative_from_right(f)
    assert g.values[-1] == 0.0
    assert abs(g.values[0] - integrate(f)) < 1e-12 * (1 + f.sup_norm())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.floats(-10, 10), st.floats(-10, 10))
def test_integrate_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    f, g = GridFunction(rng.normal(size=101)), GridFunction(rng.normal(size=101))
    lhs = integrate(a * f + b * g)
    assert abs(lhs - (a * integrate(f) + b * integrate(g))) < 1e-12 * (1 + abs(a) + abs(b))


def test_grid_mismatch():
    with pytest.raises(GridMismatchError):
        GridFunction.constant(1.0, 10) + GridFunction.constant(1.0, 11)


def test_immutable():
    f = GridFunction.constant(1.0, 5)
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_json_csv():
    f = GridFunction.from_callable(lambda x: x**2, 5)
    d = json.loads(f.to_json())
    assert set(d) == {"n_points", "values"} and d["n_points"] == 5
    assert np.array_equal(GridFunction.from_dict(d).values, f.values)
    rows = f.to_csv().strip().splitlines()
    assert rows[0] == "x,value" and len(rows) == 6
    assert rows[-1].split(",") == ["1", "1"]
