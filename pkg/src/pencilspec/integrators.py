"""Numerical kernels shared by the Dirac and pencil solvers.

Both direct problems are traceless 2x2 linear systems ``u' = A(x, lam) u``
whose coefficients are piecewise linear on the grid.  Each grid cell is
advanced by the fourth-order Magnus exponential built from the two Gauss
points of the cell; the 2x2 exponential of a traceless matrix has a closed
form, so a whole batch of spectral parameters is propagated with plain
array arithmetic.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

OVERFLOW_LIMIT = 1e150

_G1 = 0.5 - np.sqrt(3.0) / 6.0
_G2 = 0.5 + np.sqrt(3.0) / 6.0


class IntegrationOverflow(ArithmeticError):
    """Solution norm exceeded the overflow guard during integration."""


def gauss_nodes(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values of the piecewise-linear interpolant at the two Gauss points of every cell."""
    left, right = values[:-1], values[1:]
    return left + _G1 * (right - left), left + _G2 * (right - left)


def magnus_steps(c1, c2, h: float):
    """Cell propagators for ``A = [[a, b], [c, -a]]`` sampled at the Gauss points.

    ``c1`` and ``c2`` are ``(a, b, c)`` triples of broadcastable arrays.
    Returns the four entries ``(m11, m12, m21, m22)`` of ``exp(Omega)`` with
    ``Omega = h/2 (A1 + A2) + sqrt(3) h^2 / 12 [A2, A1]``.
    """
    a1, b1, g1 = c1
    a2, b2, g2 = c2
    k = np.sqrt(3.0) * h * h / 12.0
    oa = 0.5 * h * (a1 + a2) + k * (b2 * g1 - g2 * b1)
    ob = 0.5 * h * (b1 + b2) + k * 2.0 * (a2 * b1 - b2 * a1)
    og = 0.5 * h * (g1 + g2) + k * 2.0 * (g2 * a1 - a2 * g1)
    oa, ob, og = np.broadcast_arrays(oa, ob, og)
    d = oa * oa + ob * og
    w = np.sqrt(np.abs(d))
    small = w < 1e-6
    ws = np.where(small, 1.0, w)
    osc = d < 0
    cosh_like = np.where(osc, np.cos(ws), np.cosh(np.minimum(ws, 700.0)))
    sinh_like = np.where(osc, np.sin(ws), np.sinh(np.minimum(ws, 700.0))) / ws
    C = np.where(small, 1.0 + 0.5 * d + d * d / 24.0, cosh_like)
    S = np.where(small, 1.0 + d / 6.0 + d * d / 120.0, sinh_like)
    return C + S * oa, S * ob, S * og, C - S * oa


def prefix_products(m11, m12, m21, m22):
    """Cumulative products ``M_k ... M_1 M_0`` along the last axis (log-depth scan)."""
    m11, m12, m21, m22 = (np.array(m, dtype=float, copy=True) for m in (m11, m12, m21, m22))
    n = m11.shape[-1]
    s = 1
    while s < n:
        # later cells on the left, earlier on the right
        a2, b2, c2, d2 = m11[..., s:], m12[..., s:], m21[..., s:], m22[..., s:]
        a1, b1, c1, d1 = m11[..., :-s], m12[..., :-s], m21[..., :-s], m22[..., :-s]
        na = a2 * a1 + b2 * c1
        nb = a2 * b1 + b2 * d1
        nc = c2 * a1 + d2 * c1
        nd = c2 * b1 + d2 * d1
        m11[..., s:], m12[..., s:], m21[..., s:], m22[..., s:] = na, nb, nc, nd
        s *= 2
    return m11, m12, m21, m22


def propagate(steps, u0) -> tuple[np.ndarray, np.ndarray]:
    """Node values of the solution for every batch row; shape ``(..., n_cells + 1)``."""
    p11, p12, p21, p22 = prefix_products(*steps)
    u10, u20 = (np.asarray(u, dtype=float)[..., None] for u in u0)
    u1 = p11 * u10 + p12 * u20
    u2 = p21 * u10 + p22 * u20
    shape = np.broadcast_shapes(u1.shape[:-1], u10.shape[:-1])
    u1 = np.concatenate([np.broadcast_to(u10, shape + (1,)), np.broadcast_to(u1, shape + u1.shape[-1:])], axis=-1)
    u2 = np.concatenate([np.broadcast_to(u20, shape + (1,)), np.broadcast_to(u2, shape + u2.shape[-1:])], axis=-1)
    big = np.max(np.abs(u1) + np.abs(u2))
    if not np.isfinite(big) or big > OVERFLOW_LIMIT:
        raise IntegrationOverflow(f"solution norm {big:.3g} exceeds {OVERFLOW_LIMIT:.0e}")
    return u1, u2


def winding_angle(first: np.ndarray, second: np.ndarray, start: np.ndarray | float) -> np.ndarray:
    """Continuous polar angle of the node vectors ``(first, second)``.

    The angle of every cell increment is taken in (-pi, pi], which is exact as
    long as the solution turns by less than pi per cell.
    """
    cross = first[..., :-1] * second[..., 1:] - second[..., :-1] * first[..., 1:]
    dot = first[..., :-1] * first[..., 1:] + second[..., :-1] * second[..., 1:]
    inc = np.arctan2(cross, dot)
    out = np.empty(first.shape, dtype=float)
    out[..., 0] = start
    np.cumsum(inc, axis=-1, out=out[..., 1:])
    out[..., 1:] += out[..., :1]
    return out


def rk4_scalar(rhs: Callable[[float, float, int, float], float], n_cells: int, y0: float) -> np.ndarray:
    """Classical RK4 on a uniform grid over [0, 1].

    ``rhs(y, frac, k, h)`` evaluates the right-hand side at ``x = (k + frac) h``
    for ``frac`` in {0, 0.5, 1}.
    """
    h = 1.0 / n_cells
    y = np.empty(n_cells + 1)
    y[0] = y0
    for k in range(n_cells):
        yk = y[k]
        k1 = rhs(yk, 0.0, k, h)
        k2 = rhs(yk + 0.5 * h * k1, 0.5, k, h)
        k3 = rhs(yk + 0.5 * h * k2, 0.5, k, h)
        k4 = rhs(yk + h * k3, 1.0, k, h)
        y[k + 1] = yk + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return y


class BracketError(RuntimeError):
    """A root was not enclosed by its bracket."""


def bracketed_roots(f: Callable[[np.ndarray, np.ndarray], np.ndarray], lo, hi, tol: float,
                    max_iter: int = 200) -> np.ndarray:
    """Batched Illinois iteration for increasing crossings ``f(lo) <= 0 <= f(hi)``.

    ``f(x, pos)`` evaluates the functions of the brackets at positions ``pos``
    at abscissae ``x``; every call handles all still-active brackets at once.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    everything = np.arange(lo.size)
    flo, fhi = f(lo, everything), f(hi, everything)
    bad = ~((flo <= 0.0) & (fhi >= 0.0))
    if np.any(bad):
        idx = np.flatnonzero(bad)
        raise BracketError(f"{idx.size} root(s) not bracketed, first at position {idx[0]}: "
                           f"f({lo[idx[0]]:.10g})={flo[idx[0]]:.3g}, f({hi[idx[0]]:.10g})={fhi[idx[0]]:.3g}")
    last = np.zeros(lo.shape, dtype=int)   # -1: lo moved last, +1: hi moved last
    stall = np.zeros(lo.shape, dtype=int)
    for _ in range(max_iter):
        active = (hi - lo) > tol
        if not active.any():
            break
        ia = np.flatnonzero(active)
        l, r, fl, fr = lo[ia], hi[ia], flo[ia], fhi[ia]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (l * fr - r * fl) / (fr - fl)
        mid = 0.5 * (l + r)
        x = np.where(~np.isfinite(x) | (x <= l) | (x >= r) | (stall[ia] >= 2), mid, x)
        fx = f(x, ia)
        width_before = r - l
        go_lo = fx < 0.0
        go_hi = fx > 0.0
        hit = fx == 0.0
        # Illinois: halve the retained endpoint value when the same side moves twice
        fr_new = np.where(go_lo & (last[ia] == -1), 0.5 * fr, fr)
        fl_new = np.where(go_hi & (last[ia] == 1), 0.5 * fl, fl)
        lo[ia] = np.where(go_lo | hit, x, l)
        hi[ia] = np.where(go_hi | hit, x, r)
        flo[ia] = np.where(go_lo, fx, np.where(hit, 0.0, fl_new))
        fhi[ia] = np.where(go_hi, fx, np.where(hit, 0.0, fr_new))
        last[ia] = np.where(go_lo, -1, np.where(go_hi, 1, 0))
        shrunk = (hi[ia] - lo[ia]) <= 0.5 * width_before
        stall[ia] = np.where(shrunk, 0, stall[ia] + 1)
    return 0.5 * (lo + hi)
