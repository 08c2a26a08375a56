"""Reconstruction of (p, r) from the Dirichlet and mixed spectra.

Pipeline: validate the data and estimate the asymptotic shift h, insert
``lam_0 = mu* = (mu_0 + mu_1)/2``, fit a shifted AKNS potential Q whose
D1/D2 spectra are (mu, lam*), rotate Q into the mu*-form P with the gauge
angle, and read off p and r.

The AKNS fit is a damped Gauss-Newton iteration on the eigenvalue misfit.
Eigenvalue derivatives come from first-order perturbation theory,
``d lam / d c = <u, (dQ/dc) u> / <u, u>`` with u the computed eigenfunction.
Only the supplied 2(2N+1) - 1 values are matched: beyond |n| = N the data
are implicitly taken to follow the asymptotics exactly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import dirac as _dirac
from .dirac import DiracPotential, Which
from .errors import NonConvergence, NotHyperbolic, NotInSD, RoundTripFailure
from .gauge import DEFAULT_QUANTIZATION_THRESHOLD, assemble_P, solve_theta2
from .gridfn import DEFAULT_N_POINTS, GridFunction, grid
from .parallel import run_all
from .pencil import PencilPotentials, check_hyperbolic, spectral_pair
from .reduction import recover_pr

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralInput:
    lambda_entries: list[tuple[int, float]]
    mu_entries: list[tuple[int, float]]

    @property
    def N(self) -> int:
        return max(abs(n) for n, _ in list(self.lambda_entries) + list(self.mu_entries))

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralInput":
        lam = [(int(n), float(v)) for n, v in d["lambda"]]
        mu = [(int(n), float(v)) for n, v in d["mu"]]
        return cls(sorted(lam), sorted(mu))

    @classmethod
    def from_sequences(cls, lam, mu, h: float = 0.0) -> "SpectralInput":
        return cls(sorted((int(n), float(v) + h) for n, v in lam), sorted((int(n), float(v) + h) for n, v in mu))

    @classmethod
    def free(cls, N: int, shift: float = 0.0) -> "SpectralInput":
        lam = [(n, np.pi * n + shift) for n in range(-N, N + 1) if n]
        mu = [(n, np.pi * (n - 0.5) + shift) for n in range(-N, N + 1)]
        return cls(lam, mu)

    def to_dict(self) -> dict:
        return {"lambda": [[n, v] for n, v in self.lambda_entries],
                "mu": [[n, v] for n, v in self.mu_entries]}


@dataclass(frozen=True)
class SDReport:
    h: float
    N: int
    max_remainder: float
    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class FitConfig:
    """Knobs of the AKNS fit and of the acceptance checks.

    ``basis_dim`` is the number of functions from the sequence
    1, cos(pi x), sin(pi x), cos(2 pi x), sin(2 pi x), ... used for each of
    q1 and q2 (``None``: ``round(2N/3)``).  With ``seed`` set, the starting
    coefficients are drawn at random with spread ``init_scale`` instead of
    starting from Q = hI.
    """
    basis_dim: int | None = None
    max_iter: int = 200
    target: float = 1e-9
    accept_tol: float = 1e-4
    fit_shift: bool = True
    quantization_threshold: float = DEFAULT_QUANTIZATION_THRESHOLD
    eig_tol: float = 1e-12
    n_points: int = DEFAULT_N_POINTS
    seed: int | None = None
    init_scale: float = 0.02
    stall_rtol: float = 1e-6

    def __post_init__(self):
        for name in ("target", "accept_tol", "quantization_threshold", "eig_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.basis_dim is not None and self.basis_dim < 1:
            raise ValueError("basis_dim must be positive")

    def dim_for(self, N: int) -> int:
        return self.basis_dim if self.basis_dim is not None else max(1, int(round(2 * N / 3)))

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class ReconstructionReport:
    pp: PencilPotentials
    mu_star: float
    h: float
    h_estimate: float
    fit_residual: float
    quantization_defect: float
    winding_n: int
    roundtrip_lambda: list[tuple[int, float]]
    roundtrip_mu: list[tuple[int, float]]
    iterations: int
    hyperbolic: bool
    window: tuple[float, float]
    Q: DiracPotential | None = field(default=None, repr=False)
    P: DiracPotential | None = field(default=None, repr=False)
    truncation_note: str = ("only |n| <= N is matched; the tail beyond N is taken to "
                            "follow the asymptotics with zero remainder")

    @property
    def roundtrip_errors(self) -> list[tuple[str, int, float]]:
        return ([("lambda", n, e) for n, e in self.roundtrip_lambda]
                + [("mu", n, e) for n, e in self.roundtrip_mu])

    @property
    def max_roundtrip_error(self) -> float:
        return max(e for _, _, e in self.roundtrip_errors)

    def to_dict(self) -> dict:
        return {"mu_star": self.mu_star, "h": self.h, "h_estimate": self.h_estimate,
                "fit_residual": self.fit_residual,
                "quantization_defect": self.quantization_defect, "winding_n": self.winding_n,
                "iterations": self.iterations, "hyperbolic": self.hyperbolic,
                "window": list(self.window),
                "max_roundtrip_error": self.max_roundtrip_error,
                "roundtrip_errors": {"lambda": [[n, e] for n, e in self.roundtrip_lambda],
                                     "mu": [[n, e] for n, e in self.roundtrip_mu]},
                "truncation": self.truncation_note}


# --------------------------------------------------------------------------
# data validation and augmentation


def _remainders(si: SpectralInput):
    lam = np.array([(n, v - np.pi * n) for n, v in si.lambda_entries])
    mu = np.array([(n, v - np.pi * (n - 0.5)) for n, v in si.mu_entries])
    return lam, mu


def estimate_h(si: SpectralInput) -> float:
    lam, mu = _remainders(si)
    N = si.N
    tail = np.concatenate([lam[np.abs(lam[:, 0]) > N / 2, 1], mu[np.abs(mu[:, 0]) > N / 2, 1]])
    if tail.size == 0:
        tail = np.concatenate([lam[:, 1], mu[:, 1]])
    return float(np.mean(tail))


def validate_sd(si: SpectralInput, strict: bool = True) -> tuple[float, SDReport]:
    """Check monotonicity, almost interlacing and asymptotics; estimate h.

    Raises :class:`NotInSD` naming the first violated condition when
    ``strict``; otherwise the violations are only listed in the report.
    """
    lam = dict(si.lambda_entries)
    mu = dict(si.mu_entries)
    violations: list[tuple[str, str, int | None]] = []
    if len(lam) != len(si.lambda_entries) or len(mu) != len(si.mu_entries):
        violations.append(("indexing", "duplicate indices", None))
    if 0 in lam:
        violations.append(("indexing", "the Dirichlet sequence has no index 0", 0))
    N = si.N
    if N < 3:
        violations.append(("size", f"need |n| <= N with N >= 3, got N={N}", None))
    missing_l = [n for n in range(-N, N + 1) if n and n not in lam]
    missing_m = [n for n in range(-N, N + 1) if n not in mu]
    if missing_l or missing_m:
        violations.append(("indexing", f"missing indices lambda={missing_l} mu={missing_m}", None))
    for name, seq in (("lambda", lam), ("mu", mu)):
        ks = sorted(seq)
        for a, b in zip(ks, ks[1:]):
            if not seq[a] < seq[b]:
                violations.append(("monotonicity", f"{name}_{a}={seq[a]:.10g} >= {name}_{b}={seq[b]:.10g}", a))
                break
    for k in sorted(lam):
        if k in mu and not mu[k] < lam[k]:
            violations.append(("interlacing", f"mu_{k}={mu[k]:.10g} >= lambda_{k}={lam[k]:.10g}", k))
            break
        if k + 1 in mu and not lam[k] < mu[k + 1]:
            violations.append(("interlacing", f"lambda_{k}={lam[k]:.10g} >= mu_{k + 1}={mu[k + 1]:.10g}", k))
            break
    h = estimate_h(si) if lam and mu else float("nan")
    lr, mr = _remainders(si) if lam and mu else (np.zeros((0, 2)), np.zeros((0, 2)))
    rem = np.concatenate([lr, mr]) if lam and mu else np.zeros((0, 2))
    max_rem = float(np.max(np.abs(rem[:, 1] - h))) if rem.size else float("nan")
    if rem.size:
        tail = rem[np.abs(rem[:, 0]) > N / 2]
        head = rem[np.abs(rem[:, 0]) <= N / 2]
        tail_max = float(np.max(np.abs(tail[:, 1] - h))) if tail.size else 0.0
        head_max = float(np.max(np.abs(head[:, 1] - h))) if head.size else 0.0
        # labelling off by a half period, or remainders growing outwards
        # spread of remainders per sequence: outer half wider than inner half means growth
        spread = []
        for r in (lr, mr):
            outer = np.abs(r[:, 0]) > N / 2
            if outer.any() and (~outer).any():
                spread.append((np.ptp(r[outer, 1]), np.ptp(r[~outer, 1])))
        growing = any(t > 1.5 * max(hd, 1e-3) for t, hd in spread)
        if tail_max >= np.pi / 4 or (tail_max > 2.0 * head_max and tail_max > 1e-3) or growing:
            violations.append(("asymptotics", f"remainders do not decay (tail {tail_max:.3g}, head {head_max:.3g})", None))
    report = SDReport(h, N, max_rem, [f"{c}: {d}" for c, d, _ in violations])
    if strict and violations:
        cond, detail, idx = violations[0]
        raise NotInSD(cond, detail, idx)
    return h, report


def augment(si: SpectralInput) -> tuple[list[tuple[int, float]], float]:
    mu = dict(si.mu_entries)
    mu_star = 0.5 * (mu[0] + mu[1])
    lam_star = sorted(list(si.lambda_entries) + [(0, mu_star)])
    return lam_star, mu_star


# --------------------------------------------------------------------------
# AKNS fit


def basis_functions(dim: int, x: np.ndarray) -> np.ndarray:
    """The first ``dim`` of 1, cos(pi x), sin(pi x), cos(2 pi x), ... as rows."""
    rows = [np.ones_like(x)]
    k = 1
    while len(rows) < dim:
        rows.append(np.cos(np.pi * k * x))
        rows.append(np.sin(np.pi * k * x))
        k += 1
    return np.array(rows[:dim])


@dataclass
class FitResult:
    Q: DiracPotential
    fit_residual: float
    iterations: int
    h: float
    coefficients: np.ndarray


def _potential(coef, B1, B2, h) -> DiracPotential:
    d1 = B1.shape[0]
    q1 = GridFunction(coef[:d1] @ B1)
    q2 = GridFunction(coef[d1:d1 + B2.shape[0]] @ B2)
    return DiracPotential.akns(q1, q2, h)


def _eigs_and_rows(Q: DiracPotential, idx: np.ndarray, which: Which, B1, B2, tol):
    spec = _dirac._spectrum_at(Q, which, idx, tol)
    u1, u2 = _dirac.solve_nodes(Q, spec.values)
    dx = 1.0 / (Q.n_points - 1)
    norm = np.trapezoid(u1 * u1 + u2 * u2, dx=dx, axis=-1)
    g1 = np.trapezoid((u1 * u1 - u2 * u2)[:, None, :] * B1[None], dx=dx, axis=-1) / norm[:, None]
    g2 = np.trapezoid((2.0 * u1 * u2)[:, None, :] * B2[None], dx=dx, axis=-1) / norm[:, None]
    return spec.values, np.hstack([g1, g2, np.ones((idx.size, 1))])


def fit_akns(lambda_star, mu_entries, h: float, cfg: FitConfig | None = None) -> FitResult:
    """Least-squares fit of Q in the h-shifted AKNS class to D2 data ``lambda_star`` and D1 data ``mu_entries``.

    ``h`` is the starting shift; it is refined along with the coefficients
    unless ``cfg.fit_shift`` is off.
    """
    cfg = cfg or FitConfig()
    lam_idx = np.array([n for n, _ in lambda_star])
    lam_val = np.array([v for _, v in lambda_star])
    mu_idx = np.array([n for n, _ in mu_entries])
    mu_val = np.array([v for _, v in mu_entries])
    N = int(max(np.abs(lam_idx).max(), np.abs(mu_idx).max()))
    dim = cfg.dim_for(N)
    x = grid(cfg.n_points)
    B1 = B2 = basis_functions(dim, x)
    n_coef = B1.shape[0] + B2.shape[0]
    data = np.concatenate([lam_val, mu_val])

    coef = np.zeros(n_coef)
    if cfg.seed is not None:
        coef = np.random.default_rng(cfg.seed).normal(scale=cfg.init_scale, size=n_coef)
    shift = float(h)

    def evaluate(c, s):
        Q = _potential(c, B1, B2, s)
        (ev2, J2), (ev1, J1) = run_all(
            lambda: _eigs_and_rows(Q, lam_idx, Which.D2, B1, B2, cfg.eig_tol),
            lambda: _eigs_and_rows(Q, mu_idx, Which.D1, B1, B2, cfg.eig_tol))
        return Q, np.concatenate([ev2, ev1]) - data, np.vstack([J2, J1])

    Q, res, jac = evaluate(coef, shift)
    rms = float(np.sqrt(np.mean(res ** 2)))
    it = 0
    while rms > cfg.target:
        if it >= cfg.max_iter:
            raise NonConvergence(it, rms)
        it += 1
        A = jac if cfg.fit_shift else jac[:, :-1]
        step, *_ = np.linalg.lstsq(A, -res, rcond=None)
        if not cfg.fit_shift:
            step = np.append(step, 0.0)
        alpha, accepted = 1.0, False
        while alpha > 1e-6:
            try:
                cand = evaluate(coef + alpha * step[:-1], shift + alpha * step[-1])
            except (_dirac._int.BracketError, _dirac._int.IntegrationOverflow):
                alpha *= 0.5
                continue
            cand_rms = float(np.sqrt(np.mean(cand[1] ** 2)))
            if cand_rms < rms:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            log.info("fit stalled at rms %.3e after %d iterations", rms, it)
            break
        coef, shift = coef + alpha * step[:-1], shift + alpha * step[-1]
        Q, res, jac = cand
        improvement = (rms - cand_rms) / rms
        rms = cand_rms
        log.debug("iteration %d: rms %.3e (alpha %.3g)", it, rms, alpha)
        if improvement < cfg.stall_rtol:
            break
    return FitResult(Q, rms, it, shift, coef)


# --------------------------------------------------------------------------
# orchestration


def reconstruct(si: SpectralInput, cfg: FitConfig | None = None) -> ReconstructionReport:
    cfg = cfg or FitConfig()
    h_est, _ = validate_sd(si)
    lam_star, mu_star = augment(si)
    fit = fit_akns(lam_star, si.mu_entries, h_est, cfg)
    ga = solve_theta2(fit.Q, mu_star)
    P = assemble_P(fit.Q, ga, cfg.quantization_threshold)
    pp = recover_pr(P)
    ok, window = check_hyperbolic(pp)
    if not ok:
        raise NotHyperbolic("reconstructed pencil fails the hyperbolicity check")
    fwd = spectral_pair(pp, si.N)
    lam_in, mu_in = dict(si.lambda_entries), dict(si.mu_entries)
    rt_lam = [(n, abs(v - lam_in[n])) for n, v in fwd.lambda_entries]
    rt_mu = [(n, abs(v - mu_in[n])) for n, v in fwd.mu_entries]
    report = ReconstructionReport(pp, mu_star, fit.h, h_est, fit.fit_residual, ga.quantization_defect,
                                  ga.winding_n, rt_lam, rt_mu, fit.iterations, ok, window, fit.Q, P)
    worst = [(kind, n, e) for kind, n, e in report.roundtrip_errors if e > cfg.accept_tol * (1 + abs(n))]
    if worst:
        kind, n, e = max(worst, key=lambda t: t[2] / (1 + abs(t[1])))
        err = RoundTripFailure(f"round-trip error {e:.3e} at {kind}_{n} exceeds "
                               f"{cfg.accept_tol:.1e}*(1+|n|) ({len(worst)} indices fail)")
        err.report = report
        raise err
    return report
