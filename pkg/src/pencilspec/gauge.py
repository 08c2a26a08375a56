"""Isospectral gauge from a shifted AKNS potential to the mu-form.

For ``Q = [[q1 + h, q2], [q2, -q1 + h]]`` and a target ``mu`` the rotation
``R = exp(theta2 J)`` with

    theta2' = q1 cos(2 theta2) - q2 sin(2 theta2) + h - mu,   theta2(0) = 0,

conjugates ``l(Q)`` into ``l(P)`` with ``P`` having constant (1,1)-entry mu.
``P`` shares both spectra with ``Q`` exactly when ``theta2(1)`` is a
multiple of pi, which holds when mu is a Dirichlet eigenvalue of Q.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import DiracPotential, Form
from .errors import QuantizationError
from .gridfn import GridFunction, eval_at
from .integrators import rk4_scalar

DEFAULT_QUANTIZATION_THRESHOLD = 1e-4


@dataclass(frozen=True)
class GaugeAngle:
    theta2: GridFunction
    mu: float
    h: float
    quantization_defect: float
    winding_n: int


def _rhs_parts(Q: DiracPotential, mu: float):
    if Q.form is not Form.AKNS_SHIFTED:
        raise ValueError("the gauge needs a potential in shifted AKNS form")
    q1, q2 = Q.q1.values, Q.q2.values
    return q1, q2, Q.param - float(mu)


def solve_theta2(Q: DiracPotential, mu: float) -> GaugeAngle:
    q1, q2, shift = _rhs_parts(Q, mu)
    q1_mid = 0.5 * (q1[1:] + q1[:-1])
    q2_mid = 0.5 * (q2[1:] + q2[:-1])
    cos, sin = np.cos, np.sin

    def rhs(t, frac, k, h):
        if frac == 0.0:
            a, b = q1[k], q2[k]
        elif frac == 1.0:
            a, b = q1[k + 1], q2[k + 1]
        else:
            a, b = q1_mid[k], q2_mid[k]
        return a * cos(2.0 * t) - b * sin(2.0 * t) + shift

    theta = rk4_scalar(rhs, Q.n_points - 1, 0.0)
    n = int(np.rint(theta[-1] / np.pi))
    return GaugeAngle(GridFunction(theta), float(mu), float(Q.param),
                      float(abs(theta[-1] - n * np.pi)), n)


def assemble_P(Q: DiracPotential, ga: GaugeAngle,
               threshold: float = DEFAULT_QUANTIZATION_THRESHOLD) -> DiracPotential:
    """P = R^{-1} J R' + R^{-1} Q R with theta1 = 0, evaluated at the nodes."""
    if ga.quantization_defect > threshold:
        raise QuantizationError(ga.quantization_defect, threshold)
    q1, q2, _ = _rhs_parts(Q, ga.mu)
    th = ga.theta2.values
    c, s = np.cos(2.0 * th), np.sin(2.0 * th)
    rot11 = q1 * c - q2 * s
    dtheta = rot11 + ga.h - ga.mu
    scalar = ga.h - dtheta
    p11 = scalar + rot11
    if np.max(np.abs(p11 - ga.mu)) > 1e-10 * max(1.0, abs(ga.mu)):
        raise AssertionError("assembled potential left the mu-form")
    p12 = q1 * s + q2 * c
    p22 = scalar - rot11
    return DiracPotential(GridFunction.constant(ga.mu, Q.n_points), GridFunction(p12), GridFunction(p22),
                          Form.P_MU, ga.mu)


def rotation_matrix(ga: GaugeAngle, x: float) -> np.ndarray:
    t = eval_at(ga.theta2, x)
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, s], [-s, c]])
