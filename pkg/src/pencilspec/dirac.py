"""Direct spectral problem for the Dirac system ``J u' + P u = lam u``.

Boundary conditions are ``u2(0) = 0`` together with ``u1(1) = 0`` (operator
D1) or ``u2(1) = 0`` (operator D2).  Eigenvalues are located through the
Pruefer angle ``phi`` of ``u = rho (cos phi, sin phi)`` started at
``phi(0) = 0``: ``phi(1; lam)`` is increasing in ``lam`` and

    |phi(1; lam) - lam + trace_half| <= B,   B = int |P - (tr P / 2) I|,

so the n-th eigenvalue of D2 (resp. D1) is the unique solution of
``phi(1; lam) = n pi`` (resp. ``(n - 1/2) pi``) and lies in an explicit
bracket of half-width B around ``n pi + trace_half``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import integrators as _int
from .gridfn import GridFunction, check_same_grid, integrate

J = np.array([[0.0, 1.0], [-1.0, 0.0]])

DEFAULT_TOL = 1e-10
MAX_INDICES = 512
FORM_TOL = 1e-10


class Form(enum.Enum):
    GENERAL = "GENERAL"
    AKNS_SHIFTED = "AKNS_SHIFTED"
    P_MU = "P_MU"


class Which(enum.Enum):
    D1 = "D1"
    D2 = "D2"

    @property
    def delta(self) -> float:
        return 0.5 if self is Which.D1 else 0.0


@dataclass(frozen=True, eq=False)
class DiracPotential:
    """Real symmetric potential ``[[p11, p12], [p12, p22]]``.

    ``param`` is the shift h for ``Form.AKNS_SHIFTED`` and the constant
    (1,1)-entry mu for ``Form.P_MU``; it is ignored for ``Form.GENERAL``.
    """
    p11: GridFunction
    p12: GridFunction
    p22: GridFunction
    form: Form = Form.GENERAL
    param: float | None = None

    def __post_init__(self):
        check_same_grid(self.p11, self.p12, self.p22)
        if self.form is Form.AKNS_SHIFTED:
            if self.param is None:
                raise ValueError("AKNS_SHIFTED form needs the shift h")
            dev = np.max(np.abs(self.p11.values + self.p22.values - 2.0 * self.param))
            if dev > FORM_TOL * max(1.0, abs(self.param)):
                raise ValueError(f"p11 + p22 deviates from 2h by {dev:.3g}")
        elif self.form is Form.P_MU:
            if self.param is None:
                raise ValueError("P_MU form needs mu")
            dev = np.max(np.abs(self.p11.values - self.param))
            if dev > FORM_TOL * max(1.0, abs(self.param)):
                raise ValueError(f"p11 deviates from mu by {dev:.3g}")

    @classmethod
    def akns(cls, q1: GridFunction, q2: GridFunction, h: float = 0.0) -> "DiracPotential":
        return cls(q1 + h, q2, h - q1, Form.AKNS_SHIFTED, float(h))

    @classmethod
    def scalar(cls, c: float, n_points: int) -> "DiracPotential":
        z = GridFunction.constant(0.0, n_points)
        return cls(z + c, z, z + c, Form.AKNS_SHIFTED, float(c))

    @property
    def n_points(self) -> int:
        return self.p11.n_points

    @property
    def q1(self) -> GridFunction:
        return 0.5 * (self.p11 - self.p22)

    @property
    def q2(self) -> GridFunction:
        return self.p12

    @property
    def trace_half(self) -> float:
        return 0.5 * integrate(self.p11 + self.p22)

    def traceless_bound(self) -> float:
        """B = integral of the spectral norm of the traceless part."""
        b = np.hypot(0.5 * (self.p11.values - self.p22.values), self.p12.values)
        return integrate(GridFunction(b))

    def matrix(self, k: int) -> np.ndarray:
        return np.array([[self.p11.values[k], self.p12.values[k]],
                         [self.p12.values[k], self.p22.values[k]]])

    def to_dict(self) -> dict:
        d = {"p11": [float(v) for v in self.p11.values],
             "p12": [float(v) for v in self.p12.values],
             "p22": [float(v) for v in self.p22.values],
             "form": self.form.value}
        if self.form is Form.P_MU:
            d["mu"] = self.param
        elif self.form is Form.AKNS_SHIFTED:
            d["h"] = self.param
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DiracPotential":
        form = Form(d.get("form", "GENERAL"))
        param = d.get("mu") if form is Form.P_MU else d.get("h")
        return cls(GridFunction(d["p11"]), GridFunction(d["p12"]), GridFunction(d["p22"]),
                   form, None if param is None else float(param))


@dataclass(frozen=True)
class Spectrum:
    which: Which
    indices: np.ndarray
    values: np.ndarray
    trace_half: float
    # Pruefer angles phi(1) at the computed eigenvalues, kept for diagnostics
    angles: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(n), float(v)) for n, v in zip(self.indices, self.values)]

    def __getitem__(self, n: int) -> float:
        pos = np.flatnonzero(self.indices == n)
        if pos.size == 0:
            raise KeyError(n)
        return float(self.values[pos[0]])

    def to_dict(self) -> dict:
        return {"which": self.which.value, "trace_half": self.trace_half,
                "entries": [[n, v] for n, v in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "Spectrum":
        ent = np.asarray(d["entries"], dtype=float).reshape(-1, 2)
        return cls(Which(d["which"]), ent[:, 0].astype(int), ent[:, 1], float(d["trace_half"]))


def _cell_steps(P: DiracPotential, lams: np.ndarray):
    """Magnus propagators of ``u' = -J (lam - P) u`` for a batch of lam."""
    lam = np.asarray(lams, dtype=float)[..., None]
    a1, a2 = _int.gauss_nodes(P.p12.values)
    d1, d2 = _int.gauss_nodes(P.p22.values)
    e1, e2 = _int.gauss_nodes(P.p11.values)
    # A = [[p12, p22 - lam], [lam - p11, -p12]]
    c1 = (a1, d1 - lam, lam - e1)
    c2 = (a2, d2 - lam, lam - e2)
    return _int.magnus_steps(c1, c2, 1.0 / (P.n_points - 1))


def solve_nodes(P: DiracPotential, lams, u0=(1.0, 0.0)):
    """Node values ``(u1, u2)`` for a batch of spectral parameters."""
    lams = np.asarray(lams, dtype=float)
    return _int.propagate(_cell_steps(P, lams), (np.full(lams.shape, u0[0]), np.full(lams.shape, u0[1])))


def prufer_angle(P: DiracPotential, lams) -> np.ndarray:
    """phi(1; lam) for the solution with u(0) = (1, 0)."""
    lams = np.asarray(lams, dtype=float)
    u1, u2 = solve_nodes(P, lams)
    return _int.winding_angle(u1, u2, 0.0)[..., -1]


def integrate_dirac(P: DiracPotential, lam: float, u0=(1.0, 0.0)):
    """Solve ``J u' + P u = lam u`` with ``u(0) = u0``.

    Returns ``((u1, u2), u_at_1)`` with the components as grid functions.
    """
    u0 = np.asarray(u0, dtype=float)
    if u0.shape != (2,) or not np.all(np.isfinite(u0)):
        raise ValueError("u0 must be a finite 2-vector")
    u1, u2 = solve_nodes(P, np.array(float(lam)), u0)
    return (GridFunction(u1), GridFunction(u2)), np.array([u1[-1], u2[-1]])


def dirac_char(P: DiracPotential, lam: float, which: Which | str) -> float:
    """u1(1; lam) for D1, u2(1; lam) for D2, with u(0) = (1, 0)."""
    which = Which(which)
    _, end = integrate_dirac(P, lam)
    return float(end[0] if which is Which.D1 else end[1])


def _targets(which: Which, indices: np.ndarray) -> np.ndarray:
    return np.pi * (indices - which.delta)


def dirac_spectrum(P: DiracPotential, which: Which | str, n_min: int, n_max: int,
                   tol: float = DEFAULT_TOL) -> Spectrum:
    which = Which(which)
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n_max - n_min + 1 > MAX_INDICES:
        raise ValueError(f"at most {MAX_INDICES} indices per call (asked for {n_max - n_min + 1})")
    idx = np.arange(n_min, n_max + 1)
    return _spectrum_at(P, which, idx, tol)


def _spectrum_at(P: DiracPotential, which: Which, idx: np.ndarray, tol: float) -> Spectrum:
    t = _targets(which, idx)
    th = P.trace_half
    margin = P.traceless_bound() + 1e-6
    lo, hi = t + th - margin, t + th + margin
    lams = _int.bracketed_roots(lambda lam, pos: prufer_angle(P, lam) - t[pos], lo, hi, tol)
    return Spectrum(which, idx, lams, th, prufer_angle(P, lams))
