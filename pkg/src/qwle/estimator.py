"""Minimization of the Whittle objective and asymptotic inference.

The point estimate is the argmin of nu_n^2 over a compact H-interval: a
uniform pre-scan picks the best bracket (the objective can be flat near
the boundary at small n), then a golden-section search refines it.  The
search uses comparisons only, never derivative or parabolic steps, so the
evaluation sequence, and hence the estimate, depends on the data solely
through order comparisons of objective values.  The scale estimate comes
from the reparameterization sigma = n^H b(H)^(-1/2) nu_n(H).

Confidence statements rescale by a rate matrix (1/sqrt(n)) [[p11, p12],
[p21, p22]].  A diagonal rate cannot work here: the H and sigma scores
fuse under high-frequency sampling, and only rates whose 21/22 entries
absorb a sigma log(delta) term leave a nondegenerate limit.  The default
("canonical") rate has p21 = sigma log n, limit matrix identity, and
turns the information into the plain Fisher matrix of the fGn spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import norm

from .spectral import InformationQuantities, SpectralModel, geometric_mean_density, information
from .whittle import IncrementSeries, WhittleObjective

__all__ = [
    "EstimatorConfig",
    "OptimizerDiagnostics",
    "EstimateResult",
    "CovarianceSummary",
    "RateMatrix",
    "RateCondition",
    "RateMatrixReport",
    "estimate",
    "asymptotic_cov",
    "canonical_rate_matrix",
    "diagonal_rate_matrix",
    "check_rate_matrix",
]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class EstimatorConfig:
    h_min: float = 0.01
    h_max: float = 0.99
    grid_points: int = 33
    tol: float = 1e-6
    mode: str = "fast"
    ci_level: float = 0.95

    def __post_init__(self) -> None:
        if not 0.0 < self.h_min < self.h_max < 1.0:
            raise ValueError("need 0 < h_min < h_max < 1")
        if self.tol < 1e-8:
            raise ValueError("tol below 1e-8 is beyond the objective's resolution")
        if self.grid_points < 8:
            raise ValueError("grid_points must be at least 8")
        if self.mode not in ("fast", "exact"):
            raise ValueError("mode must be 'fast' or 'exact'")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must lie in (0, 1)")


@dataclass(frozen=True)
class OptimizerDiagnostics:
    iterations: int
    evaluations: int
    boundary: bool
    converged: bool
    mode: str


@dataclass(frozen=True)
class EstimateResult:
    h_hat: float
    sigma_hat: float
    nu2_min: float
    b_at_h: float
    cov: np.ndarray
    ci_h: tuple[float, float]
    ci_sigma: tuple[float, float]
    quasi_loglik: float
    diagnostics: OptimizerDiagnostics


@dataclass(frozen=True)
class CovarianceSummary:
    cov: np.ndarray
    ci_h: tuple[float, float]
    ci_sigma: tuple[float, float]
    info: InformationQuantities
    i_theta: np.ndarray
    level: float


@dataclass(frozen=True)
class RateMatrix:
    """Rate matrix (1/sqrt(n)) [[p11, p12], [p21, p22]] plus its limit.

    The entry functions take (theta, n) with theta = (hurst, sigma) and
    return the unnormalized entries p_ij; ``limit`` maps theta to the
    2 x 2 limit matrix the rescaled entries converge to.
    """

    name: str
    p11: Callable[[tuple[float, float], int], float]
    p12: Callable[[tuple[float, float], int], float]
    p21: Callable[[tuple[float, float], int], float]
    p22: Callable[[tuple[float, float], int], float]
    limit: Callable[[tuple[float, float]], np.ndarray]

    def entries(self, theta: tuple[float, float], n: int) -> np.ndarray:
        return np.array(
            [
                [self.p11(theta, n), self.p12(theta, n)],
                [self.p21(theta, n), self.p22(theta, n)],
            ]
        )

    def matrix(self, theta: tuple[float, float], n: int) -> np.ndarray:
        return self.entries(theta, n) / math.sqrt(n)


def canonical_rate_matrix() -> RateMatrix:
    """The default rate: p21 = sigma log n cancels the scale/roughness fusion.

    Its limit is the identity, so the asymptotic covariance of the
    rescaled estimator is the inverse Fisher matrix itself.
    """
    return RateMatrix(
        name="canonical",
        p11=lambda theta, n: 1.0,
        p12=lambda theta, n: 0.0,
        p21=lambda theta, n: theta[1] * math.log(n),
        p22=lambda theta, n: 1.0,
        limit=lambda theta: np.eye(2),
    )


def diagonal_rate_matrix() -> RateMatrix:
    """sqrt(n)-diagonal rate; kept as the canonical counterexample.

    Its 21-condition diverges like sigma log n, so check_rate_matrix
    rejects it: both parameters cannot be normalized by plain sqrt(n).
    """
    return RateMatrix(
        name="diagonal",
        p11=lambda theta, n: 1.0,
        p12=lambda theta, n: 0.0,
        p21=lambda theta, n: 0.0,
        p22=lambda theta, n: 1.0,
        limit=lambda theta: np.eye(2),
    )


def _golden_section(f, lo: float, hi: float, tol: float):
    """Bounded comparison-only golden-section minimization.

    Returns (best_h, best_value, iterations, evaluations); the returned
    point is always one that was actually evaluated.
    """
    evals = 0

    def tracked(h: float) -> float:
        nonlocal evals
        evals += 1
        return f(h)

    span = hi - lo
    if span <= tol:
        mid = 0.5 * (lo + hi)
        return mid, tracked(mid), 0, evals
    steps = max(1, math.ceil(math.log(tol / span) / math.log(INV_PHI)))
    a, b = lo, hi
    c = a + INV_PHI_SQ * span
    d = a + INV_PHI * span
    fc, fd = tracked(c), tracked(d)
    for _ in range(steps):
        if fc < fd:
            b, d, fd = d, c, fc
            span = b - a
            c = a + INV_PHI_SQ * span
            fc = tracked(c)
        else:
            a, c, fc = c, d, fd
            span = b - a
            d = a + INV_PHI * span
            fd = tracked(d)
    if fc < fd:
        return c, fc, steps, evals
    return d, fd, steps, evals


def estimate(series: IncrementSeries, config: EstimatorConfig | None = None) -> EstimateResult:
    """Quasi-Whittle estimate of (H, sigma) from one increment series."""
    if config is None:
        config = EstimatorConfig()
    if np.ptp(series.increments) == 0.0:
        raise ValueError("degenerate input: increments are constant")
    objective = WhittleObjective(series, mode=config.mode)
    grid = np.linspace(config.h_min, config.h_max, config.grid_points)
    values = np.array([objective(h) for h in grid])
    best = int(np.argmin(values))
    h_best, v_best = float(grid[best]), float(values[best])
    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, config.grid_points - 1)])
    h_ref, v_ref, iterations, evaluations = _golden_section(objective, lo, hi, config.tol)
    if v_ref < v_best:
        h_best, v_best = h_ref, v_ref
    if not math.isfinite(v_best):
        raise ArithmeticError("optimizer did not converge: objective is not finite")
    n = series.n
    boundary = h_best - config.h_min < 2.0 * config.tol or config.h_max - h_best < 2.0 * config.tol
    b_at_h = geometric_mean_density(SpectralModel(h_best))
    # n^H, never 1/delta^H: the direct power avoids cancellation at large n
    sigma_hat = float(n**h_best * math.sqrt(v_best / b_at_h))
    if not (sigma_hat > 0.0 and v_best > 0.0):
        raise ValueError("degenerate input: objective vanished at the optimum")
    summary = asymptotic_cov((h_best, sigma_hat), n, level=config.ci_level)
    diagnostics = OptimizerDiagnostics(
        iterations=iterations,
        evaluations=evaluations + config.grid_points,
        boundary=boundary,
        converged=True,
        mode=config.mode,
    )
    return EstimateResult(
        h_hat=h_best,
        sigma_hat=sigma_hat,
        nu2_min=v_best,
        b_at_h=b_at_h,
        cov=summary.cov,
        ci_h=summary.ci_h,
        ci_sigma=summary.ci_sigma,
        quasi_loglik=0.5 * (math.log(v_best) + 1.0),
        diagnostics=diagnostics,
    )


def asymptotic_cov(
    theta: tuple[float, float],
    n: int,
    rate: RateMatrix | None = None,
    level: float = 0.95,
) -> CovarianceSummary:
    """Plug-in covariance of (H_hat, sigma_hat) and marginal intervals.

    Var[theta_hat - theta] is approximated by phi_n I(theta)^(-1) phi_n^T
    with I = limit^T F limit; with the canonical rate the H coordinate
    has standard error of order n^(-1/2) and sigma of order
    log(n) n^(-1/2).
    """
    if rate is None:
        rate = canonical_rate_matrix()
    hurst, sigma = theta
    info = information(SpectralModel(hurst), sigma)
    limit = rate.limit(theta)
    i_theta = limit.T @ info.fisher @ limit
    det = np.linalg.det(i_theta)
    if not np.isfinite(det) or abs(det) < 1e-12:
        raise ValueError("information matrix is singular at theta; boundary or failure")
    i_inv = np.linalg.inv(i_theta)
    phi = rate.matrix(theta, n)
    cov = phi @ i_inv @ phi.T
    z = float(norm.ppf(0.5 * (1.0 + level)))
    se_h = math.sqrt(cov[0, 0])
    se_s = math.sqrt(cov[1, 1])
    return CovarianceSummary(
        cov=cov,
        ci_h=(hurst - z * se_h, hurst + z * se_h),
        ci_sigma=(sigma - z * se_s, sigma + z * se_s),
        info=info,
        i_theta=i_theta,
        level=level,
    )


@dataclass(frozen=True)
class RateCondition:
    name: str
    passed: bool
    deviation_first: float
    deviation_last: float


@dataclass(frozen=True)
class RateMatrixReport:
    rate_name: str
    ns: tuple[int, ...]
    conditions: tuple[RateCondition, ...]
    passed: bool
    max_deviation: float


def _converges(devs: np.ndarray, atol: float = 1e-10) -> bool:
    # a numerical stand-in for a limit statement: either already at the
    # target, or clearly shrinking and small by the largest n
    if devs[-1] <= atol:
        return True
    return devs[-1] <= 0.5 * devs[0] and devs[-1] <= 0.05


def check_rate_matrix(rate: RateMatrix, theta: tuple[float, float], ns) -> RateMatrixReport:
    """Numerically audit the six admissibility conditions of a rate matrix.

    Conditions: the 11 and 12 entries converge to the limit matrix; the
    combinations s21 = p11 sigma log(delta) + p21 and s22 = p12 sigma
    log(delta) + p22 converge to the 21 and 22 limit entries; the entry
    determinant is nonzero at every n; the limit determinant is nonzero.
    """
    ns = tuple(sorted(int(n) for n in ns))
    if len(ns) < 2:
        raise ValueError("need at least two sample sizes")
    sigma = theta[1]
    target = rate.limit(theta)
    seqs = {"entry_11": [], "entry_12": [], "s_21": [], "s_22": []}
    dets = []
    for n in ns:
        entries = rate.entries(theta, n)
        log_delta = -math.log(n)
        seqs["entry_11"].append(entries[0, 0])
        seqs["entry_12"].append(entries[0, 1])
        seqs["s_21"].append(entries[0, 0] * sigma * log_delta + entries[1, 0])
        seqs["s_22"].append(entries[0, 1] * sigma * log_delta + entries[1, 1])
        dets.append(entries[0, 0] * entries[1, 1] - entries[0, 1] * entries[1, 0])
    targets = {
        "entry_11": target[0, 0],
        "entry_12": target[0, 1],
        "s_21": target[1, 0],
        "s_22": target[1, 1],
    }
    conditions = []
    for name, seq in seqs.items():
        devs = np.abs(np.asarray(seq) - targets[name])
        conditions.append(
            RateCondition(
                name=name,
                passed=_converges(devs),
                deviation_first=float(devs[0]),
                deviation_last=float(devs[-1]),
            )
        )
    conditions.append(
        RateCondition(
            name="det_per_n",
            passed=bool(np.all(np.abs(dets) > 1e-12)),
            deviation_first=float(abs(dets[0])),
            deviation_last=float(abs(dets[-1])),
        )
    )
    limit_det = float(np.linalg.det(target))
    conditions.append(
        RateCondition(
            name="det_limit",
            passed=abs(limit_det) > 1e-12,
            deviation_first=abs(limit_det),
            deviation_last=abs(limit_det),
        )
    )
    max_dev = max(c.deviation_last for c in conditions[:4])
    return RateMatrixReport(
        rate_name=rate.name,
        ns=ns,
        conditions=tuple(conditions),
        passed=all(c.passed for c in conditions),
        max_deviation=max_dev,
    )
