"""Seeded random smooth potentials used by the tests and the round-trip command."""
from __future__ import annotations

import numpy as np

from .gridfn import DEFAULT_N_POINTS, GridFunction, grid
from .pencil import PencilPotentials


def smooth_function(rng: np.random.Generator, n_points: int, amplitude: float, degree: int) -> GridFunction:
    """Random trigonometric polynomial in cos/sin(pi k x), k <= degree, scaled to sup norm ``amplitude``."""
    x = grid(n_points)
    k = np.arange(degree + 1)[:, None]
    a = rng.normal(size=(degree + 1, 1)) / (1.0 + k)
    b = rng.normal(size=(degree + 1, 1)) / (1.0 + k)
    y = (a * np.cos(np.pi * k * x) + b * np.sin(np.pi * k * x)).sum(axis=0)
    return GridFunction(amplitude * y / np.max(np.abs(y)))


def random_pair(seed: int, n_points: int = DEFAULT_N_POINTS, amplitude: float = 0.5,
                degree: int = 3) -> PencilPotentials:
    rng = np.random.default_rng(seed)
    amp_p, amp_r = amplitude * rng.uniform(0.5, 1.0, size=2)
    return PencilPotentials(smooth_function(rng, n_points, amp_p, degree),
                            smooth_function(rng, n_points, amp_r, degree))
