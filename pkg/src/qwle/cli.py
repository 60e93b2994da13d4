"""Command line front end for estimation, simulation, and validation.

Subcommands:

* ``estimate``  fit (H, sigma) to a one-column CSV of levels or increments
* ``simulate``  draw a drifted fractional path and write its levels as CSV
* ``mc``        seeded Monte Carlo comparison against the limit law
* ``verify``    quadratic-growth and Frobenius-deficit kernel checks
* ``profile``   dump the objective curve nu^2(H) as an "h,nu2" CSV

JSON reports carry ``"schema_version": 1`` and validate against the
schemas shipped under ``qwle/schemas``.  Exit codes: 0 success, 1 input
or configuration error, 2 statistical caveat (boundary hit or embedding
fallback).  The ``QWLE_THREADS`` environment variable caps ``mc``
worker threads.  An optional ``--config`` JSON file mirrors the flags;
explicit flags win over config values.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

import numpy as np

from .estimator import EstimatorConfig, estimate
from .mc import McReport, run_mc
from .simulate import EmbeddingFallbackWarning, ModelSpec, path_levels
from .spectral import SpectralModel
from .toeplitz import frobenius_deficit, ones_quadratic_rates
from .whittle import IncrementSeries, objective_profile

__all__ = ["UsageError", "main"]

FROBENIUS_FLAT_TOL = 1e-8
FROBENIUS_SLOPE_BOUND = 0.3


class UsageError(Exception):
    """Bad flags or missing required arguments; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: A003 - argparse hook
        raise UsageError(f"{self.prog}: {message}")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError("config file must hold a JSON object")
    return config


def _resolve(args, config: dict, name: str, default=None):
    """Flag value if given, else config value, else the default."""
    value = getattr(args, name)
    if value is not None:
        return value
    return config.get(name, default)


def _thread_budget(requested: int | None) -> int | None:
    cap = os.environ.get("QWLE_THREADS")
    if cap is None:
        return requested
    cap = int(cap)
    if cap < 1:
        raise ValueError("QWLE_THREADS must be a positive integer")
    return cap if requested is None else min(int(requested), cap)


def _read_column(path: str) -> np.ndarray:
    """One-column numeric CSV, optional single header line."""
    with open(path) as fh:
        first = fh.readline()
    try:
        float(first.strip().split(",")[0])
        skip = 0
    except ValueError:
        skip = 1
    data = np.loadtxt(path, skiprows=skip, ndmin=1)
    if data.ndim != 1:
        raise ValueError(f"{path}: expected a single numeric column")
    return data


def _write_csv(path: str | None, rows: np.ndarray, header: str) -> None:
    out = sys.stdout if path is None else open(path, "w")
    try:
        np.savetxt(out, rows, fmt="%.17g", delimiter=",", header=header, comments="")
    finally:
        if out is not sys.stdout:
            out.close()


def _emit_json(report: dict, path: str | None) -> None:
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_series(args, config: dict) -> IncrementSeries:
    input_path = _resolve(args, config, "input")
    if input_path is None:
        raise UsageError("--input is required")
    values = _read_column(input_path)
    demeaned = bool(_resolve(args, config, "demean", False))
    if _resolve(args, config, "levels", False):
        return IncrementSeries.from_levels(values, demeaned=demeaned)
    return IncrementSeries.from_increments(values, demeaned=demeaned)


def _cmd_estimate(args) -> int:
    config = _load_config(args.config)
    series = _load_series(args, config)
    kwargs = {}
    for name in ("h_min", "h_max", "grid_points", "tol", "mode", "ci_level"):
        value = _resolve(args, config, name)
        if value is not None:
            kwargs[name] = value
    est_config = EstimatorConfig(**kwargs)
    result = estimate(series, est_config)
    cov = result.cov
    report = {
        "schema_version": 1,
        "command": "estimate",
        "n": int(series.n),
        "mode": result.diagnostics.mode,
        "demeaned": bool(series.demeaned),
        "h_hat": float(result.h_hat),
        "sigma_hat": float(result.sigma_hat),
        "nu2_min": float(result.nu2_min),
        "b_at_h": float(result.b_at_h),
        "quasi_loglik": float(result.quasi_loglik),
        "ci_level": float(est_config.ci_level),
        "ci_h": [float(result.ci_h[0]), float(result.ci_h[1])],
        "ci_sigma": [float(result.ci_sigma[0]), float(result.ci_sigma[1])],
        "se_h": float(math.sqrt(cov[0, 0])),
        "se_sigma": float(math.sqrt(cov[1, 1])),
        "cov_hh": float(cov[0, 0]),
        "cov_hs": float(cov[0, 1]),
        "cov_ss": float(cov[1, 1]),
        "boundary": bool(result.diagnostics.boundary),
        "converged": bool(result.diagnostics.converged),
        "iterations": int(result.diagnostics.iterations),
        "evaluations": int(result.diagnostics.evaluations),
    }
    _emit_json(report, args.output)
    return 2 if result.diagnostics.boundary else 0


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    hurst = _resolve(args, config, "hurst")
    if hurst is None:
        raise UsageError("simulate: --hurst is required")
    output = _resolve(args, config, "output")
    if output is None:
        raise UsageError("simulate: --output is required")
    spec = ModelSpec(
        hurst=float(hurst),
        sigma=float(_resolve(args, config, "sigma", 1.0)),
        mu=float(_resolve(args, config, "mu", 0.0)),
        xi0=float(_resolve(args, config, "xi0", 0.0)),
        n=int(_resolve(args, config, "n", 4096)),
        seed=int(_resolve(args, config, "seed", 0)),
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        levels = path_levels(spec)
    fallback = False
    for item in caught:
        if issubclass(item.category, EmbeddingFallbackWarning):
            fallback = True
        print(f"warning: {item.message}", file=sys.stderr)
    _write_csv(output, levels, "level")
    return 2 if fallback else 0


def _mc_payload(report: McReport) -> dict:
    def column(values):
        return [float(v) if math.isfinite(v) else None for v in values]

    return {
        "schema_version": 1,
        "command": "mc",
        "hurst0": float(report.hurst0),
        "sigma0": float(report.sigma0),
        "mu": float(report.mu),
        "n": int(report.n),
        "replications": int(report.replications),
        "seed": int(report.seed),
        "mode": report.mode,
        "failures": int(report.failures),
        "boundary_hits": int(report.boundary_hits),
        "fallbacks": int(report.fallbacks),
        "h_hats": column(report.h_hats),
        "sigma_hats": column(report.sigma_hats),
        "bias_h": float(report.bias_h),
        "bias_sigma": float(report.bias_sigma),
        "sd_z1": float(report.sd_z1),
        "sd_z2": float(report.sd_z2),
        "theoretical_sd_z1": float(report.theoretical_sd_z1),
        "theoretical_sd_z2": float(report.theoretical_sd_z2),
        "skew_z1": float(report.skewness[0]),
        "skew_z2": float(report.skewness[1]),
        "exkurt_z1": float(report.excess_kurtosis[0]),
        "exkurt_z2": float(report.excess_kurtosis[1]),
        "pvalue_z1": float(report.normality_pvalues[0]),
        "pvalue_z2": float(report.normality_pvalues[1]),
        "caveats": list(report.caveats),
    }


def _cmd_mc(args) -> int:
    config = _load_config(args.config)
    hurst = _resolve(args, config, "hurst")
    if hurst is None:
        raise UsageError("mc: --hurst is required")
    report = run_mc(
        float(hurst),
        float(_resolve(args, config, "sigma", 1.0)),
        mu=float(_resolve(args, config, "mu", 0.0)),
        n=int(_resolve(args, config, "n", 4096)),
        replications=int(_resolve(args, config, "reps", 200)),
        seed=int(_resolve(args, config, "seed", 0)),
        mode=_resolve(args, config, "mode", "fast"),
        threads=_thread_budget(_resolve(args, config, "threads")),
    )
    _emit_json(_mc_payload(report), args.output)
    return 2 if (report.boundary_hits or report.fallbacks) else 0


def _frobenius_record(hurst: float, ns: list[int], deficits: list[float]) -> dict:
    flat = max(deficits) <= FROBENIUS_FLAT_TOL
    positive = [(n, d) for n, d in zip(ns, deficits) if d > 0.0]
    if flat or len(positive) < 2:
        slope = 0.0
    else:
        logs_n = np.log([n for n, _ in positive])
        logs_d = np.log([d for _, d in positive])
        slope = float(np.polyfit(logs_n, logs_d, 1)[0])
    return {
        "hurst": float(hurst),
        "ns": [int(n) for n in ns],
        "deficits": [float(d) for d in deficits],
        "fitted_slope": slope,
        "passed": bool(flat or slope <= FROBENIUS_SLOPE_BOUND),
    }


def _cmd_verify(args) -> int:
    config = _load_config(args.config)
    hursts = _resolve(args, config, "hurst")
    if not hursts:
        raise UsageError("verify: at least one --hurst is required")
    js = _resolve(args, config, "j") or [0, 1]
    ns = sorted(int(n) for n in _resolve(args, config, "ns") or (64, 128, 256, 512))
    rate_fits = []
    frobenius = []
    for hurst in hursts:
        model = SpectralModel(hurst=float(hurst))
        for j in js:
            fits = ones_quadratic_rates(model, int(j), ns)
            for form in ("linear", "sandwich"):
                fit = fits[form]
                rate_fits.append(
                    {
                        "hurst": float(hurst),
                        "j": int(j),
                        "form": form,
                        "ns": [int(n) for n in fit.ns],
                        "values": [float(v) for v in fit.values],
                        "fitted_slope": float(fit.fitted_slope),
                        "claimed_bound": float(fit.claimed_bound),
                        "passed": bool(fit.passed),
                    }
                )
        deficits = [frobenius_deficit(model, n) for n in ns]
        frobenius.append(_frobenius_record(float(hurst), ns, deficits))
    passed = all(r["passed"] for r in rate_fits) and all(r["passed"] for r in frobenius)
    report = {
        "schema_version": 1,
        "command": "verify",
        "hursts": [float(h) for h in hursts],
        "js": [int(j) for j in js],
        "ns": ns,
        "rate_fits": rate_fits,
        "frobenius": frobenius,
        "passed": passed,
    }
    _emit_json(report, args.output)
    return 0 if passed else 1


def _cmd_profile(args) -> int:
    config = _load_config(args.config)
    series = _load_series(args, config)
    h_min = float(_resolve(args, config, "h_min", 0.05))
    h_max = float(_resolve(args, config, "h_max", 0.95))
    points = int(_resolve(args, config, "points", 91))
    if points < 2:
        raise UsageError("profile: --points must be at least 2")
    grid = np.linspace(h_min, h_max, points)
    rows = objective_profile(series, grid, mode=_resolve(args, config, "mode", "fast"))
    _write_csv(args.output, rows, "h,nu2")
    return 0


def _add_input_flags(sub) -> None:
    sub.add_argument("--input", help="path to a one-column CSV (optional header)")
    group = sub.add_mutually_exclusive_group()
    group.add_argument(
        "--levels",
        dest="levels",
        action="store_true",
        default=None,
        help="treat the input as levels X_0..X_n",
    )
    group.add_argument(
        "--increments",
        dest="levels",
        action="store_false",
        help="treat the input as increments (default)",
    )
    sub.add_argument(
        "--demean",
        action="store_true",
        default=None,
        help="subtract the sample mean of the increments before fitting",
    )


def _add_io_flags(sub, output_help: str) -> None:
    sub.add_argument("--output", help=output_help)
    sub.add_argument("--config", help="JSON file whose keys mirror the flags")


def _build_parser() -> _Parser:
    parser = _Parser(prog="qwle", description="drifted fractional model: estimate, simulate, validate")
    parser.set_defaults(func=None)
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")

    est = sub.add_parser("estimate", help="estimate (H, sigma) from a CSV")
    _add_input_flags(est)
    est.add_argument("--h-min", dest="h_min", type=float, help="lower search bound for H")
    est.add_argument("--h-max", dest="h_max", type=float, help="upper search bound for H")
    est.add_argument("--grid-points", dest="grid_points", type=int, help="pre-scan grid size")
    est.add_argument("--tol", type=float, help="absolute tolerance on H")
    est.add_argument("--mode", choices=("fast", "exact"), help="objective flavor")
    est.add_argument("--ci-level", dest="ci_level", type=float, help="confidence level")
    _add_io_flags(est, "write the JSON report here instead of stdout")
    est.set_defaults(func=_cmd_estimate)

    sim = sub.add_parser("simulate", help="simulate a drifted fractional path")
    sim.add_argument("--hurst", type=float, help="Hurst index in (0, 1)")
    sim.add_argument("--sigma", type=float, help="noise scale (default 1)")
    sim.add_argument("--mu", type=float, help="constant drift (default 0)")
    sim.add_argument("--xi0", type=float, help="initial level (default 0)")
    sim.add_argument("--n", type=int, help="number of increments (default 4096)")
    sim.add_argument("--seed", type=int, help="RNG seed (default 0)")
    _add_io_flags(sim, "CSV of levels X_0..X_n (required)")
    sim.set_defaults(func=_cmd_simulate)

    mc = sub.add_parser("mc", help="Monte Carlo check against the limit law")
    mc.add_argument("--hurst", type=float, help="true Hurst index")
    mc.add_argument("--sigma", type=float, help="true noise scale (default 1)")
    mc.add_argument("--mu", type=float, help="constant drift (default 0)")
    mc.add_argument("--n", type=int, help="increments per replication (default 4096)")
    mc.add_argument("--reps", type=int, help="replications (default 200, minimum 50)")
    mc.add_argument("--seed", type=int, help="root seed (default 0)")
    mc.add_argument("--mode", choices=("fast", "exact"), help="objective flavor")
    mc.add_argument("--threads", type=int, help="worker threads (default: executor chooses)")
    _add_io_flags(mc, "write the JSON report here instead of stdout")
    mc.set_defaults(func=_cmd_mc)

    ver = sub.add_parser("verify", help="kernel growth and Frobenius-deficit checks")
    ver.add_argument(
        "--hurst",
        type=float,
        action="append",
        help="Hurst index to check (repeatable)",
    )
    ver.add_argument(
        "--j",
        type=int,
        action="append",
        choices=(0, 1),
        help="kernel derivative order, 0 or 1 (repeatable; default both)",
    )
    ver.add_argument(
        "--ns",
        type=int,
        action="append",
        metavar="N",
        help="matrix size (repeatable; default 64 128 256 512)",
    )
    _add_io_flags(ver, "write the JSON report here instead of stdout")
    ver.set_defaults(func=_cmd_verify)

    prof = sub.add_parser("profile", help="dump the objective curve nu^2(H) as CSV")
    _add_input_flags(prof)
    prof.add_argument("--h-min", dest="h_min", type=float, help="grid start (default 0.05)")
    prof.add_argument("--h-max", dest="h_max", type=float, help="grid end (default 0.95)")
    prof.add_argument("--points", type=int, help="grid size (default 91)")
    prof.add_argument("--mode", choices=("fast", "exact"), help="objective flavor")
    _add_io_flags(prof, "write the h,nu2 CSV here instead of stdout")
    prof.set_defaults(func=_cmd_profile)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.func is None:
            raise UsageError("a subcommand is required; see qwle --help")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
