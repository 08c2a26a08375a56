"""Real functions sampled on a uniform grid over [0, 1].

A :class:`GridFunction` stands for the piecewise-linear interpolant of its
node values.  Quadrature is the composite trapezoid rule, which integrates
that interpolant exactly, so ``integrate`` and ``cumulative_from_right``
agree to rounding.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DEFAULT_N_POINTS = 1025


class GridMismatchError(ValueError):
    """Binary operation between grid functions with different grids."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    values: np.ndarray
    n_points: int = field(init=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("a grid function needs a 1-d array of at least 2 values")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "n_points", vals.size)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_callable(cls, func: Callable[[np.ndarray], np.ndarray],
                      n_points: int = DEFAULT_N_POINTS) -> "GridFunction":
        x = grid(n_points)
        return cls(np.broadcast_to(np.asarray(func(x), dtype=float), x.shape))

    @classmethod
    def constant(cls, c: float, n_points: int = DEFAULT_N_POINTS) -> "GridFunction":
        return cls(np.full(n_points, float(c)))

    @property
    def x(self) -> np.ndarray:
        return grid(self.n_points)

    @property
    def step(self) -> float:
        return 1.0 / (self.n_points - 1)

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x):
        return eval_at(self, x)

    # -- arithmetic ---------------------------------------------------------
    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.n_points != self.n_points:
                raise GridMismatchError(
                    f"grid sizes differ: {self.n_points} vs {other.n_points}")
            return other.values
        return float(other)

    def __add__(self, other):
        return GridFunction(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.values / self._other(other))

    def __neg__(self):
        return GridFunction(-self.values)

    def __pow__(self, k):
        return GridFunction(self.values ** k)

    def __repr__(self):
        return f"GridFunction(n_points={self.n_points}, range=[{self.values.min():.6g}, {self.values.max():.6g}])"

    # -- norms ----------------------------------------------------------------
    def l2_norm(self) -> float:
        return float(np.sqrt(integrate(self * self)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        return {"n_points": self.n_points, "values": [float(v) for v in self.values]}

    @classmethod
    def from_dict(cls, d: dict) -> "GridFunction":
        vals = np.asarray(d["values"], dtype=float)
        if "n_points" in d and int(d["n_points"]) != vals.size:
            raise ValueError(f"n_points={d['n_points']} but {vals.size} values given")
        return cls(vals)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        return "x,value\n" + "".join(f"{x:.12g},{v:.12g}\n" for x, v in zip(self.x, self.values))


def grid(n_points: int) -> np.ndarray:
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    return np.linspace(0.0, 1.0, n_points)


def eval_at(f: GridFunction, x):
    """Piecewise-linear interpolant of ``f`` at ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0) or not np.all(np.isfinite(xa)):
        raise ValueError(f"evaluation point outside [0, 1]: {x!r}")
    out = np.interp(xa, f.x, f.values)
    return float(out) if out.ndim == 0 else out


def integrate(f: GridFunction) -> float:
    return float(np.trapezoid(f.values, dx=f.step))


def cumulative_from_right(f: GridFunction) -> GridFunction:
    """g(x) = integral of f over [x, 1], trapezoid rule on each cell."""
    cells = 0.5 * f.step * (f.values[1:] + f.values[:-1])
    g = np.zeros_like(f.values)
    g[:-1] = np.cumsum(cells[::-1])[::-1]
    return GridFunction(g)


def check_same_grid(*fs: GridFunction) -> int:
    n = fs[0].n_points
    for f in fs[1:]:
        if f.n_points != n:
            raise GridMismatchError(f"grid sizes differ: {n} vs {f.n_points}")
    return n
