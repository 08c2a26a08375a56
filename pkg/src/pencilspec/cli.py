"""``pencilspec`` command-line tool.

    pencilspec forward   --input pp.json      --output spectra.json [--n-max N]
    pencilspec reduce    --input pp.json      --output P.json [--mu-star M]
    pencilspec inverse   --input spectra.json --output pp.json [--report R]
    pencilspec roundtrip (--input pp.json | --seed S) --output report.json
    pencilspec validate  --input spectra.json [--output report.json]

Exit codes: 0 ok, 2 parse/usage, 3 not hyperbolic, 4 not admissible,
5 fit non-convergence, 6 gauge quantization, 7 round-trip failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import ensemble
from .errors import InputError, PencilSpecError
from .gridfn import DEFAULT_N_POINTS
from .inverse import FitConfig, SpectralInput, reconstruct, validate_sd
from .pencil import PencilPotentials, check_hyperbolic, spectral_pair
from .reduction import reduce

log = logging.getLogger("pencilspec")


def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj)) + "\n"


def _read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load(path, loader):
    d = _read_json(path)
    try:
        return loader(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid content ({exc.__class__.__name__}: {exc})") from exc


def _write(path, text: str):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _config(args) -> FitConfig:
    kw = {"accept_tol": args.accept_tol, "n_points": args.grid, "seed": args.fit_seed}
    if args.basis_dim is not None:
        kw["basis_dim"] = args.basis_dim
    if args.max_iter is not None:
        kw["max_iter"] = args.max_iter
    if args.target is not None:
        kw["target"] = args.target
    try:
        return FitConfig(**kw)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_forward(args) -> int:
    pp = _load(args.input, PencilPotentials.from_dict)
    if args.grid_given and pp.n_points != args.grid:
        raise InputError(f"potentials are on {pp.n_points} points, --grid asks for {args.grid}")
    pair = spectral_pair(pp, args.n_max, args.tol)
    _write(args.output, dumps(pair.to_dict()))
    if args.csv:
        Path(args.csv).write_text(pair.to_csv())
    return 0


def cmd_reduce(args) -> int:
    pp = _load(args.input, PencilPotentials.from_dict)
    mu_star = args.mu_star
    if mu_star is None:
        ok, (m0, m1) = check_hyperbolic(pp, args.tol)
        if not ok:
            from .errors import NotHyperbolic
            raise NotHyperbolic("T1 is not hyperbolic; no admissible mu*")
        mu_star = 0.5 * (m0 + m1)
    res = reduce(pp, mu_star)
    out = res.P.to_dict()
    out["z_min"] = res.z_min
    _write(args.output, dumps(out))
    return 0


def _inverse_outputs(args, report, report_path):
    _write(args.output, dumps(report.pp.to_dict()))
    if report_path:
        Path(report_path).write_text(dumps(report.to_dict()))
    if args.csv:
        Path(args.csv).write_text(report.pp.to_csv())


def cmd_inverse(args) -> int:
    si = _load(args.input, SpectralInput.from_dict)
    cfg = _config(args)
    report_path = args.report
    if report_path is None and args.output not in (None, "-"):
        report_path = str(Path(args.output).with_suffix("")) + ".report.json"
    try:
        report = reconstruct(si, cfg)
    except PencilSpecError as exc:
        partial = getattr(exc, "report", None)
        if partial is not None:
            _inverse_outputs(args, partial, report_path)
        raise
    _inverse_outputs(args, report, report_path)
    log.info("fit residual %.3e, max round-trip error %.3e", report.fit_residual, report.max_roundtrip_error)
    return 0


def cmd_roundtrip(args) -> int:
    if args.input is not None:
        pp = _load(args.input, PencilPotentials.from_dict)
        source = {"input": str(args.input)}
    elif args.seed is not None:
        pp = ensemble.random_pair(args.seed, args.grid)
        source = {"seed": args.seed, "generator": "pencilspec.ensemble.random_pair"}
    else:
        raise InputError("roundtrip needs --input or --seed")
    t0 = time.perf_counter()
    pair = spectral_pair(pp, args.n_max, args.tol)
    si = SpectralInput(pair.lambda_entries, pair.mu_entries)
    cfg = _config(args)
    if cfg.n_points != pp.n_points:
        cfg = FitConfig(**{**cfg.to_dict(), "n_points": pp.n_points})
    out = {"source": source, "n_max": args.n_max}
    code = 0
    try:
        report = reconstruct(si, cfg)
    except PencilSpecError as exc:
        report = getattr(exc, "report", None)
        if report is None:
            raise
        code = exc.exit_code
        out["error"] = str(exc)
    out.update(report.to_dict())
    out["l2_error_p"] = (report.pp.p - pp.p).l2_norm()
    out["l2_error_r"] = (report.pp.r - pp.r).l2_norm()
    out["l2_norm_p"] = pp.p.l2_norm()
    out["l2_norm_r"] = pp.r.l2_norm()
    if args.timing:
        out["seconds"] = round(time.perf_counter() - t0, 1)
    _write(args.output, dumps(out))
    if args.csv:
        Path(args.csv).write_text(report.pp.to_csv())
    return code


def cmd_validate(args) -> int:
    si = _load(args.input, SpectralInput.from_dict)
    h, rep = validate_sd(si, strict=False)
    _write(args.output, dumps({"valid": rep.valid, "h": h, "N": rep.N, "max_remainder": rep.max_remainder,
                               "violations": rep.violations}))
    if not rep.valid:
        validate_sd(si, strict=True)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pencilspec", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=["forward", "reduce", "inverse", "roundtrip", "validate"])
    ap.add_argument("--input", "-i")
    ap.add_argument("--output", "-o", default="-")
    ap.add_argument("--n-max", type=int, default=15, help="truncation N: indices |n| <= N")
    ap.add_argument("--grid", type=int, default=None, help=f"grid points (default {DEFAULT_N_POINTS})")
    ap.add_argument("--basis-dim", type=int, default=None)
    ap.add_argument("--max-iter", type=int, default=None)
    ap.add_argument("--target", type=float, default=None, help="rms fit residual to stop at")
    ap.add_argument("--tol", type=float, default=1e-10, help="eigenvalue tolerance")
    ap.add_argument("--accept-tol", type=float, default=1e-4,
                    help="round-trip tolerance per index is accept_tol*(1+|n|)")
    ap.add_argument("--seed", type=int, default=None,
                    help="roundtrip: generate a random smooth pair; inverse: random fit start")
    ap.add_argument("--mu-star", type=float, default=None)
    ap.add_argument("--report", default=None)
    ap.add_argument("--csv", default=None, help="also write CSV plot data to this path")
    ap.add_argument("--timing", action="store_true", help="include wall time in the roundtrip report")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


COMMANDS = {"forward": cmd_forward, "reduce": cmd_reduce, "inverse": cmd_inverse,
            "roundtrip": cmd_roundtrip, "validate": cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.grid_given = args.grid is not None
    if args.grid is None:
        args.grid = DEFAULT_N_POINTS
    args.fit_seed = args.seed if args.command == "inverse" else None
    try:
        if args.n_max < (1 if args.command == "forward" else 3):
            raise InputError("--n-max must be at least 3 (1 for forward)")
        if args.tol <= 0 or args.accept_tol <= 0:
            raise InputError("tolerances must be positive")
        if args.command != "roundtrip" and args.input is None:
            raise InputError(f"{args.command} needs --input")
        return COMMANDS[args.command](args)
    except PencilSpecError as exc:
        print(f"pencilspec: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
