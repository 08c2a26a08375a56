"""Direct spectral problem for the quadratic pencils T1(p, r) and T2(p, r).

The equation ``-y'' + r' y + 2 lam p y = lam^2 y`` is handled through the
quasi-derivative ``y[1] = y' - r y``:

    y' = r y + y[1],    y[1]' = (2 lam p - lam^2 - r^2) y - r y[1],

so the distribution ``r'`` never appears.  With ``y(0) = 0, y[1](0) = 1``
the zeros of ``y(1; lam)`` are the Dirichlet eigenvalues (T2) and the zeros
of ``y[1](1; lam)`` the mixed ones (T1).

The pencil is not self-adjoint in ``lam``, so eigenvalues are indexed by
oscillation count instead of a monotone angle.  With
``y = rho sin(theta), y[1] = rho cos(theta)`` and ``theta(0) = 0``, the
angle only crosses multiples of pi upwards.  For a hyperbolic pencil the
set where ``theta(1; lam) < pi/2`` is exactly the window ``(mu_0, mu_1)``
on which T1 is negative; to the right of it the n-th Dirichlet eigenvalue
is the crossing ``theta(1) = n pi`` and the n-th mixed one the crossing
``theta(1) = (n - 1/2) pi``, and symmetrically to the left.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import integrators as _int
from .errors import NotHyperbolic
from .gridfn import GridFunction, check_same_grid, integrate
from .parallel import run_all

DEFAULT_TOL = 1e-10
MAX_INDICES = 512

# lam-grid density used to bracket crossings, in points per unit of lam
_SCAN_DENSITY = 8.0 / np.pi


class Pencil(enum.Enum):
    T1 = "T1"
    T2 = "T2"


@dataclass(frozen=True, eq=False)
class PencilPotentials:
    p: GridFunction
    r: GridFunction

    def __post_init__(self):
        check_same_grid(self.p, self.r)

    @property
    def n_points(self) -> int:
        return self.p.n_points

    @property
    def p0(self) -> float:
        return integrate(self.p)

    @classmethod
    def zero(cls, n_points: int) -> "PencilPotentials":
        z = GridFunction.constant(0.0, n_points)
        return cls(z, z)

    def to_dict(self) -> dict:
        return {"p": self.p.to_dict(), "r": self.r.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "PencilPotentials":
        """Accepts grid-function objects or bare value lists for ``p`` and ``r``."""
        def load(item):
            return GridFunction.from_dict(item) if isinstance(item, dict) else GridFunction(item)
        return cls(load(d["p"]), load(d["r"]))

    def to_csv(self) -> str:
        x = self.p.x
        rows = "".join(f"{a:.12g},{b:.12g},{c:.12g}\n" for a, b, c in zip(x, self.p.values, self.r.values))
        return "x,p,r\n" + rows


@dataclass(frozen=True)
class PencilSpectralPair:
    """Indexed eigenvalues: ``lambda_entries`` for T2 (n != 0), ``mu_entries`` for T1."""
    lambda_entries: list[tuple[int, float]]
    mu_entries: list[tuple[int, float]]
    p0: float

    def lam(self, n: int) -> float:
        return dict(self.lambda_entries)[n]

    def mu(self, n: int) -> float:
        return dict(self.mu_entries)[n]

    def to_dict(self) -> dict:
        return {"p0": self.p0,
                "lambda": [[int(n), float(v)] for n, v in self.lambda_entries],
                "mu": [[int(n), float(v)] for n, v in self.mu_entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "PencilSpectralPair":
        lam = [(int(n), float(v)) for n, v in d["lambda"]]
        mu = [(int(n), float(v)) for n, v in d["mu"]]
        return cls(lam, mu, float(d.get("p0", float("nan"))))

    def to_csv(self) -> str:
        lam, mu = dict(self.lambda_entries), dict(self.mu_entries)
        rows = []
        for n in sorted(set(lam) | set(mu)):
            a = f"{lam[n]:.12g}" if n in lam else ""
            b = f"{mu[n]:.12g}" if n in mu else ""
            rows.append(f"{n},{a},{b}\n")
        return "n,lambda,mu\n" + "".join(rows)


def _cell_steps(pp: PencilPotentials, lams: np.ndarray):
    lam = np.asarray(lams, dtype=float)[..., None]
    r1, r2 = _int.gauss_nodes(pp.r.values)
    p1, p2 = _int.gauss_nodes(pp.p.values)
    c1 = (r1, np.ones_like(r1), 2.0 * lam * p1 - lam * lam - r1 * r1)
    c2 = (r2, np.ones_like(r2), 2.0 * lam * p2 - lam * lam - r2 * r2)
    return _int.magnus_steps(c1, c2, 1.0 / (pp.n_points - 1))


def solve_nodes(pp: PencilPotentials, lams, y0: float = 0.0, yq0: float = 1.0):
    """Node values ``(y, y[1])`` for a batch of spectral parameters."""
    lams = np.asarray(lams, dtype=float)
    return _int.propagate(_cell_steps(pp, lams), (np.full(lams.shape, y0), np.full(lams.shape, yq0)))


def integrate_pencil(pp: PencilPotentials, lam: float, y0: float, yq0: float) -> tuple[float, float]:
    """(y(1), y[1](1)) for the solution with y(0) = y0, y[1](0) = yq0."""
    y, yq = solve_nodes(pp, np.array(float(lam)), y0, yq0)
    return float(y[-1]), float(yq[-1])


def pencil_char(pp: PencilPotentials, lam: float, which: Pencil | str) -> float:
    which = Pencil(which)
    y1, yq1 = integrate_pencil(pp, lam, 0.0, 1.0)
    return yq1 if which is Pencil.T1 else y1


def oscillation_angle(pp: PencilPotentials, lams) -> np.ndarray:
    """theta(1; lam) with y = rho sin(theta), y[1] = rho cos(theta), theta(0) = 0."""
    y, yq = solve_nodes(pp, lams)
    return _int.winding_angle(yq, y, 0.0)[..., -1]


def _scan(pp: PencilPotentials, a: float, b: float, density: float = _SCAN_DENSITY):
    n = max(int(np.ceil(abs(b - a) * density)) + 1, 3)
    lams = np.linspace(a, b, n)
    return lams, oscillation_angle(pp, lams)


def negative_point(pp: PencilPotentials) -> float | None:
    """A real lam where T1(p, r)(lam) is negative, or None when none was found.

    Searches around p0 on successively finer lam-grids and returns the
    minimiser of theta(1; lam) if it lies below pi/2.
    """
    c = pp.p0
    best_lam, best_val = None, np.inf
    for half, density in ((np.pi, 16 / np.pi), (2 * np.pi, 64 / np.pi), (4 * np.pi, 256 / np.pi)):
        lams, th = _scan(pp, c - half, c + half, density)
        k = int(np.argmin(th))
        if th[k] < best_val:
            best_lam, best_val = float(lams[k]), float(th[k])
        if best_val < 0.5 * np.pi:
            return best_lam
    return None


def _crossings(pp: PencilPotentials, start: float, direction: int, targets: np.ndarray,
               tol: float) -> np.ndarray:
    """Solve theta(1; lam) = target for sorted targets, walking away from ``start``."""
    if targets.size == 0:
        return np.empty(0)
    # theta(1; lam) ~ |lam - p0|: reach comfortably past the largest target
    reach = float(targets.max()) + abs(start - pp.p0) + np.pi
    lo_b = np.full(targets.shape, np.nan)
    hi_b = np.full(targets.shape, np.nan)
    seg_start, prev_th = start, None
    for _ in range(8):
        end = start + direction * reach
        lams, th = _scan(pp, seg_start, end)
        if prev_th is not None:
            lams, th = np.concatenate([[seg_start], lams[1:]]), np.concatenate([[prev_th], th[1:]])
        for j, t in enumerate(targets):
            if not np.isnan(lo_b[j]):
                continue
            above = th >= t
            if not above.any():
                continue
            k = int(np.argmax(above))
            if k == 0:
                raise NotHyperbolic(f"angle already above {t / np.pi:.2f} pi at the start of the search")
            # a later drop back below the target means an extra crossing pair
            if np.any(~above[k:]):
                raise NotHyperbolic(f"multiple crossings of {t / np.pi:.2f} pi near lam={lams[k]:.6g}")
            lo_b[j], hi_b[j] = lams[k - 1], lams[k]
        if not np.isnan(lo_b).any():
            break
        seg_start, prev_th = end, float(th[-1])
        reach *= 2.0
    else:
        raise NotHyperbolic("could not bracket all eigenvalues")
    lo, hi = (lo_b, hi_b) if direction > 0 else (hi_b, lo_b)

    def f(lam, pos):
        return direction * (oscillation_angle(pp, lam) - targets[pos])

    return _int.bracketed_roots(f, lo, hi, tol)


def pencil_spectrum(pp: PencilPotentials, which: Pencil | str, indices, tol: float = DEFAULT_TOL,
                    mu_star: float | None = None) -> list[tuple[int, float]]:
    """Eigenvalues of T1 (indices in Z) or T2 (indices in Z without 0)."""
    which = Pencil(which)
    idx = np.asarray(sorted(set(int(n) for n in indices)), dtype=int)
    if idx.size > MAX_INDICES:
        raise ValueError(f"at most {MAX_INDICES} indices per call")
    if which is Pencil.T2 and np.any(idx == 0):
        raise ValueError("the Dirichlet spectrum has no index 0")
    if mu_star is None:
        mu_star = negative_point(pp)
        if mu_star is None:
            raise NotHyperbolic("theta(1; lam) >= pi/2 everywhere near p0: T1 is never negative")
    if which is Pencil.T2:
        right, left = idx[idx > 0], idx[idx < 0]
        t_right, t_left = np.pi * right, np.pi * -left
    else:
        right, left = idx[idx >= 1], idx[idx <= 0]
        t_right, t_left = np.pi * (right - 0.5), np.pi * (0.5 - left)
    vals_r = _crossings(pp, mu_star, +1, t_right.astype(float), tol)
    vals_l = _crossings(pp, mu_star, -1, t_left[::-1].astype(float), tol)[::-1]
    out = list(zip(left.tolist(), vals_l.tolist())) + list(zip(right.tolist(), vals_r.tolist()))
    return sorted(out)


def spectral_pair(pp: PencilPotentials, n_max: int, tol: float = DEFAULT_TOL) -> PencilSpectralPair:
    """Both spectra for |n| <= n_max."""
    mu_star = negative_point(pp)
    if mu_star is None:
        raise NotHyperbolic("T1 is never negative near p0")
    ns = range(-n_max, n_max + 1)
    lam, mu = run_all(lambda: pencil_spectrum(pp, Pencil.T2, [n for n in ns if n != 0], tol, mu_star),
                      lambda: pencil_spectrum(pp, Pencil.T1, ns, tol, mu_star))
    return PencilSpectralPair(lam, mu, pp.p0)


def check_hyperbolic(pp: PencilPotentials, tol: float = DEFAULT_TOL, n_check: int = 3):
    """(ok, (mu_0, mu_1)): is T1 hyperbolic, judged on a finite section of both spectra.

    ``ok`` requires a point where T1 is negative, real simple eigenvalues for
    ``|n| <= n_check`` and the almost interlacing ``mu_k < lam_k < mu_{k+1}``.
    The window is ``(nan, nan)`` when no negative point exists.
    """
    mu_star = negative_point(pp)
    if mu_star is None:
        return False, (float("nan"), float("nan"))
    try:
        ns = range(-n_check, n_check + 2)
        mu = dict(pencil_spectrum(pp, Pencil.T1, ns, tol, mu_star))
        lam = dict(pencil_spectrum(pp, Pencil.T2, [n for n in range(-n_check, n_check + 1) if n], tol, mu_star))
    except NotHyperbolic:
        return False, (float("nan"), float("nan"))
    window = (mu[0], mu[1])
    ok = mu[0] < mu_star < mu[1]
    for k in lam:
        ok &= mu[k] < lam[k] < mu[k + 1]
    vals = sorted(list(mu.values()) + list(lam.values()))
    ok &= bool(np.all(np.diff(vals) > 0))
    return bool(ok), window
