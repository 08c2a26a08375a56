"""Passage between the pencil potentials (p, r) and Dirac potentials of the form

    P = [[mu, -v], [-v, 2p - mu]],      v = z'/z,

where z solves ``z'' = (r' + 2 mu p - mu^2) z`` with ``z(1) = 1, z[1](1) = 0``.
z is integrated right to left as the linear quasi-derivative system, so only
r (never r') enters.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import integrators as _int
from . import pencil as _pencil
from .dirac import DiracPotential, Form, Which, dirac_spectrum
from .errors import NotHyperbolic
from .gridfn import GridFunction, cumulative_from_right
from .pencil import Pencil, PencilPotentials, pencil_spectrum

Z_FLOOR = 1e-8


@dataclass(frozen=True)
class ReductionResult:
    v: GridFunction
    P: DiracPotential
    z_min: float


def _z_nodes(pp: PencilPotentials, mu_star: float) -> tuple[np.ndarray, np.ndarray]:
    """(z, z[1]) at the nodes, integrated backwards from (1, 0) at x = 1."""
    m11, m12, m21, m22 = _pencil._cell_steps(pp, np.array(float(mu_star)))
    # inverse of a unimodular 2x2 cell map, cells taken from the right end
    inv = (m22[::-1], -m12[::-1], -m21[::-1], m11[::-1])
    z, zq = _int.propagate(inv, (np.array(1.0), np.array(0.0)))
    return z[::-1], zq[::-1]


def reduce(pp: PencilPotentials, mu_star: float) -> ReductionResult:
    z, zq = _z_nodes(pp, mu_star)
    z_min = float(z.min())
    if z_min <= Z_FLOOR:
        raise NotHyperbolic(f"z has min {z_min:.3g} <= {Z_FLOOR:g} for mu*={mu_star:.10g}; "
                            "mu* is not in the negativity window of T1")
    v = GridFunction(zq / z + pp.r.values)
    return ReductionResult(v, _assemble(pp, mu_star, v), z_min)


def compute_v(pp: PencilPotentials, mu_star: float) -> GridFunction:
    return reduce(pp, mu_star).v


def _assemble(pp: PencilPotentials, mu_star: float, v: GridFunction) -> DiracPotential:
    mu = float(mu_star)
    return DiracPotential(GridFunction.constant(mu, pp.n_points), -v, 2.0 * pp.p - mu, Form.P_MU, mu)


def build_P(pp: PencilPotentials, mu_star: float) -> DiracPotential:
    return reduce(pp, mu_star).P


def recover_pr(P: DiracPotential) -> PencilPotentials:
    """p = (p11 + p22)/2,  r(x) = -p12(x) - int_x^1 (p12^2 - p11 p22)."""
    p = 0.5 * (P.p11 + P.p22)
    r = -P.p12 - cumulative_from_right(P.p12 * P.p12 - P.p11 * P.p22)
    return PencilPotentials(p, r)


@dataclass(frozen=True)
class RelationReport:
    mu_star: float
    d1_mismatch: float
    d2_mismatch: float
    augmentation_mismatch: float     # |lam_0(D2(P)) - mu*|
    d1: object
    d2: object

    @property
    def max_mismatch(self) -> float:
        return max(self.d1_mismatch, self.d2_mismatch, self.augmentation_mismatch)


def verify_spectra_relation(pp: PencilPotentials, mu_star: float, n_max: int,
                            tol: float = 1e-10) -> RelationReport:
    """Compare spectra of D_j(build_P(pp, mu*)) with those of T_j(p, r) for |n| <= n_max.

    D1 must reproduce T1 index by index; D2 must reproduce T2 with the extra
    eigenvalue mu* sitting at index 0.
    """
    P = build_P(pp, mu_star)
    ns = np.arange(-n_max, n_max + 1)
    d1 = dirac_spectrum(P, Which.D1, -n_max, n_max, tol)
    d2 = dirac_spectrum(P, Which.D2, -n_max, n_max, tol)
    t1 = dict(pencil_spectrum(pp, Pencil.T1, ns, tol, mu_star))
    t2 = dict(pencil_spectrum(pp, Pencil.T2, [n for n in ns if n], tol, mu_star))
    m1 = max(abs(d1[n] - t1[n]) for n in ns)
    m2 = max(abs(d2[n] - t2[n]) for n in ns if n)
    return RelationReport(float(mu_star), m1, m2, abs(d2[0] - mu_star), d1, d2)
