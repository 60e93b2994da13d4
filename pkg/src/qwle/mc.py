"""Monte Carlo validation of the estimator's limit law.

Replications draw paths at a known theta0, estimate, and standardize the
errors by the inverse rate matrix: z = sqrt(n) * (H_hat - H0,
-sigma0 log(n) (H_hat - H0) + sigma_hat - sigma0).  Under the limit law z
is bivariate normal with covariance equal to the inverse information, so
whitening z by its Cholesky factor should leave two independent standard
normals; the report carries moments and Jarque-Bera p-values of the
whitened coordinates next to the empirical/theoretical sd comparison.

Per-replication seeds come from ``replication_seed``, so the results are
a pure function of (root seed, replication index) and identical for any
thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import jarque_bera, kurtosis, skew

from .estimator import EstimatorConfig, asymptotic_cov, estimate
from .simulate import ModelSpec, _embedding_eigenvalues, replication_seed, sample_path

__all__ = ["McReport", "run_mc"]


@dataclass(frozen=True)
class McReport:
    """Outcome of one Monte Carlo study at a fixed theta0."""

    hurst0: float
    sigma0: float
    mu: float
    n: int
    replications: int
    seed: int
    mode: str
    h_hats: np.ndarray
    sigma_hats: np.ndarray
    failures: int
    boundary_hits: int
    fallbacks: int
    bias_h: float
    bias_sigma: float
    sd_z1: float
    sd_z2: float
    theoretical_sd_z1: float
    theoretical_sd_z2: float
    skewness: tuple[float, float]
    excess_kurtosis: tuple[float, float]
    normality_pvalues: tuple[float, float]
    caveats: tuple[str, ...] = field(default_factory=tuple)

    @property
    def normality_pvalue(self) -> float:
        return min(self.normality_pvalues)


def _one_replication(args):
    spec, config = args
    try:
        result = estimate(sample_path(spec), config)
    except (ValueError, ArithmeticError):
        return None
    return result.h_hat, result.sigma_hat, result.diagnostics.boundary


def run_mc(
    hurst0: float,
    sigma0: float,
    mu: float = 0.0,
    n: int = 4096,
    replications: int = 200,
    seed: int = 0,
    mode: str = "fast",
    threads: int | None = None,
    config: EstimatorConfig | None = None,
) -> McReport:
    """Seeded, replication-parallel Monte Carlo check of the limit law."""
    if replications < 50:
        raise ValueError("need at least 50 replications for the summary to mean anything")
    if threads is not None and threads < 1:
        raise ValueError("threads must be positive")
    if config is None:
        config = EstimatorConfig(mode=mode)
    elif config.mode != mode:
        raise ValueError("config.mode and mode disagree")
    jobs = [
        (ModelSpec(hurst=hurst0, sigma=sigma0, mu=mu, n=n, seed=replication_seed(seed, r)), config)
        for r in range(replications)
    ]
    if threads == 1:
        outcomes = [_one_replication(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(_one_replication, jobs))

    # whether the sampler needs its dense fallback depends only on (H, n)
    embed_size = 1 << (2 * n - 1).bit_length()
    per_rep_fallback = _embedding_eigenvalues(hurst0, embed_size) is None

    h_hats = np.full(replications, np.nan)
    sigma_hats = np.full(replications, np.nan)
    boundary_hits = 0
    failures = 0
    for r, outcome in enumerate(outcomes):
        if outcome is None:
            failures += 1
            continue
        h_hats[r], sigma_hats[r], boundary = outcome
        boundary_hits += boundary
    fallbacks = 0 if failures == replications else (replications - failures) * per_rep_fallback

    ok = np.isfinite(h_hats)
    if ok.sum() < 10:
        raise ArithmeticError(f"only {int(ok.sum())} of {replications} replications succeeded")
    summary = asymptotic_cov((hurst0, sigma0), n)
    i_inv = np.linalg.inv(summary.i_theta)
    sqrt_n = math.sqrt(n)
    log_n = math.log(n)
    z1 = sqrt_n * (h_hats[ok] - hurst0)
    z2 = sqrt_n * (-sigma0 * log_n * (h_hats[ok] - hurst0) + (sigma_hats[ok] - sigma0))
    z = np.column_stack([z1, z2])
    # whiten by I(theta0)^(1/2): columns become iid standard normal in the limit
    white = z @ np.linalg.cholesky(summary.i_theta)
    jb = [jarque_bera(white[:, k]) for k in range(2)]

    caveats = []
    if replications < 100:
        caveats.append("small replication count; summary moments are noisy")
    if n < 1024:
        caveats.append("small n; the limit law may not have set in")
    if failures:
        caveats.append(f"{failures} replications failed and were dropped")
    if boundary_hits:
        caveats.append(f"{boundary_hits} estimates hit the H boundary")
    if fallbacks:
        caveats.append(f"{fallbacks} replications used the dense sampler fallback")

    return McReport(
        hurst0=hurst0,
        sigma0=sigma0,
        mu=mu,
        n=n,
        replications=replications,
        seed=seed,
        mode=mode,
        h_hats=h_hats,
        sigma_hats=sigma_hats,
        failures=failures,
        boundary_hits=boundary_hits,
        fallbacks=fallbacks,
        bias_h=float(np.mean(h_hats[ok]) - hurst0),
        bias_sigma=float(np.mean(sigma_hats[ok]) - sigma0),
        sd_z1=float(np.std(z1, ddof=1)),
        sd_z2=float(np.std(z2, ddof=1)),
        theoretical_sd_z1=math.sqrt(i_inv[0, 0]),
        theoretical_sd_z2=math.sqrt(i_inv[1, 1]),
        skewness=(float(skew(white[:, 0])), float(skew(white[:, 1]))),
        excess_kurtosis=(float(kurtosis(white[:, 0])), float(kurtosis(white[:, 1]))),
        normality_pvalues=(float(jb[0].pvalue), float(jb[1].pvalue)),
        caveats=tuple(caveats),
    )
