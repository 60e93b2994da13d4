"""Estimator and rate-matrix checks.

The sigma reparameterization is pinned by its white-noise closed form,
equivariances are checked bit-for-bit where the arithmetic allows it,
and the rate-matrix audit is exercised on the canonical matrix, the
diagonal counterexample, and a singular limit.
"""

import math

import numpy as np
import pytest

from qwle.estimator import (
    CovarianceSummary,
    EstimatorConfig,
    RateMatrix,
    _golden_section,
    asymptotic_cov,
    canonical_rate_matrix,
    check_rate_matrix,
    diagonal_rate_matrix,
    estimate,
)
from qwle.simulate import ModelSpec, replication_seed, sample_path
from qwle.spectral import SpectralModel, geometric_mean_density, information
from qwle.whittle import IncrementSeries, nu2, objective_profile

TWO_PI = 2.0 * math.pi


def _white_noise_series(seed=101, n=4096, sigma0=2.0):
    x = np.random.default_rng(seed).standard_normal(n) * sigma0 / math.sqrt(n)
    return IncrementSeries(x)


def test_sigma_formula_white_noise_identity():
    # at H = 1/2 the reparameterization collapses: n^(1/2) b(1/2)^(-1/2)
    # sqrt(nu2) equals the plain euclidean norm of the increments
    series = _white_noise_series()
    x = series.increments
    n = series.n
    b_half = geometric_mean_density(SpectralModel(0.5))
    exact = n**0.5 * math.sqrt(nu2(series, 0.5, mode="exact") / b_half)
    assert exact == pytest.approx(float(np.linalg.norm(x)), rel=1e-10)
    fast = n**0.5 * math.sqrt(nu2(series, 0.5, mode="fast") / b_half)
    assert fast == pytest.approx(float(np.linalg.norm(x - x.mean())), rel=1e-10)


def test_estimate_white_noise_behaviour():
    series = _white_noise_series()
    result = estimate(series)
    assert abs(result.h_hat - 0.5) < 0.05
    anchored = float(np.linalg.norm(series.increments - series.increments.mean()))
    assert abs(result.sigma_hat / anchored - 1.0) < 0.05
    assert result.nu2_min > 0.0
    assert result.b_at_h == pytest.approx(
        geometric_mean_density(SpectralModel(result.h_hat)), rel=1e-12
    )
    assert result.quasi_loglik == pytest.approx(
        0.5 * (math.log(result.nu2_min) + 1.0), rel=1e-12
    )
    assert not result.diagnostics.boundary
    assert result.diagnostics.converged
    assert result.ci_h[0] < result.h_hat < result.ci_h[1]
    assert result.ci_sigma[0] < result.sigma_hat < result.ci_sigma[1]


def test_estimate_is_deterministic():
    series = _white_noise_series(seed=55, n=512)
    first = estimate(series)
    second = estimate(series)
    assert first.h_hat == second.h_hat
    assert first.sigma_hat == second.sigma_hat
    assert first.diagnostics == second.diagnostics


def test_scale_equivariance():
    series = _white_noise_series()
    base = estimate(series)
    for c in (0.1, 10.0):
        scaled = estimate(IncrementSeries(c * series.increments))
        assert scaled.h_hat == base.h_hat
        assert scaled.sigma_hat == pytest.approx(c * base.sigma_hat, rel=1e-12)


def test_constant_drift_invariance_is_bitwise():
    # simulated increments sit on a dyadic lattice and the shift 5/n is
    # dyadic, so the fast objective's anchored input is bit-identical
    base = sample_path(ModelSpec(hurst=0.6, sigma=1.0, mu=0.0, n=1024, seed=3))
    shifted = IncrementSeries(base.increments + 5.0 / 1024.0)
    first = estimate(base)
    second = estimate(shifted)
    assert first.h_hat == second.h_hat
    assert first.sigma_hat == second.sigma_hat


def test_argmin_dominates_fine_grid():
    series = sample_path(ModelSpec(hurst=0.35, sigma=1.0, mu=0.0, n=512, seed=9))
    result = estimate(series)
    grid = np.arange(0.01, 0.99, 1e-3)
    values = objective_profile(series, grid)[:, 1]
    assert result.nu2_min <= float(values.min()) * (1.0 + 1e-9)


def test_boundary_flag_on_smooth_path():
    levels = (np.arange(65) / 64.0) ** 2
    result = estimate(IncrementSeries.from_levels(levels))
    assert result.diagnostics.boundary
    assert result.h_hat > 0.98


def test_degenerate_inputs_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        estimate(IncrementSeries(np.zeros(16)))
    with pytest.raises(ValueError, match="degenerate"):
        estimate(IncrementSeries(np.full(16, 2.5)))


def test_config_validation():
    with pytest.raises(ValueError):
        EstimatorConfig(h_min=0.6, h_max=0.4)
    with pytest.raises(ValueError):
        EstimatorConfig(tol=1e-9)
    with pytest.raises(ValueError):
        EstimatorConfig(grid_points=4)
    with pytest.raises(ValueError):
        EstimatorConfig(mode="dense")
    with pytest.raises(ValueError):
        EstimatorConfig(ci_level=1.0)


def test_mean_estimate_tracks_truth():
    h_hats = []
    for r in range(50):
        spec = ModelSpec(hurst=0.3, sigma=1.0, mu=0.0, n=1024, seed=replication_seed(77, r))
        h_hats.append(estimate(sample_path(spec)).h_hat)
    assert abs(float(np.mean(h_hats)) - 0.3) < 0.02


def test_golden_section_quadratic():
    best, value, iterations, evaluations = _golden_section(
        lambda h: (h - 0.37) ** 2, 0.2, 0.8, 1e-6
    )
    assert abs(best - 0.37) < 2e-6
    assert value == (best - 0.37) ** 2
    assert iterations > 0
    assert evaluations == iterations + 2


def test_golden_section_monotone_edges():
    lo_best, _, _, _ = _golden_section(lambda h: h, 0.1, 0.9, 1e-6)
    assert lo_best < 0.1 + 1e-5
    hi_best, _, _, _ = _golden_section(lambda h: -h, 0.1, 0.9, 1e-6)
    assert hi_best > 0.9 - 1e-5


def test_asymptotic_cov_canonical_identities():
    theta = (0.5, 1.0)
    n = 4096
    summary = asymptotic_cov(theta, n)
    assert isinstance(summary, CovarianceSummary)
    info = information(SpectralModel(theta[0]), theta[1])
    assert np.allclose(summary.i_theta, info.fisher, rtol=1e-14, atol=0.0)
    assert info.fisher[1, 1] == pytest.approx(2.0, rel=1e-14)
    # the H coordinate contracts at root-n
    assert summary.cov[0, 0] == pytest.approx(np.linalg.inv(info.fisher)[0, 0] / n, rel=1e-12)
    assert summary.cov[0, 0] == pytest.approx(1.0 / (info.shape_info * n), rel=1e-10)
    # the sigma coordinate picks up the log n factor through p21
    width_h = summary.ci_h[1] - summary.ci_h[0]
    width_s = summary.ci_sigma[1] - summary.ci_sigma[0]
    assert width_s / width_h > 0.5 * math.log(n)
    wider = asymptotic_cov(theta, n, level=0.99)
    assert wider.ci_h[1] - wider.ci_h[0] > width_h


def test_asymptotic_cov_singular_limit_rejected():
    singular = RateMatrix(
        name="collapsed",
        p11=lambda theta, n: 1.0,
        p12=lambda theta, n: 0.0,
        p21=lambda theta, n: 1.0,
        p22=lambda theta, n: 0.0,
        limit=lambda theta: np.array([[1.0, 0.0], [1.0, 0.0]]),
    )
    with pytest.raises(ValueError, match="singular"):
        asymptotic_cov((0.5, 1.0), 1024, rate=singular)


def test_check_rate_matrix_canonical_passes_exactly():
    report = check_rate_matrix(canonical_rate_matrix(), (0.6, 1.3), [64, 256, 1024])
    assert report.passed
    assert report.max_deviation == 0.0
    assert all(c.passed for c in report.conditions)
    assert {c.name for c in report.conditions} == {
        "entry_11",
        "entry_12",
        "s_21",
        "s_22",
        "det_per_n",
        "det_limit",
    }


def test_check_rate_matrix_diagonal_fails_s21():
    report = check_rate_matrix(diagonal_rate_matrix(), (0.6, 1.3), [64, 256, 1024])
    assert not report.passed
    failed = {c.name for c in report.conditions if not c.passed}
    assert failed == {"s_21"}
    s21 = next(c for c in report.conditions if c.name == "s_21")
    # the deviation grows like sigma log n instead of converging
    assert s21.deviation_last > s21.deviation_first


def test_check_rate_matrix_flags_singular_limit():
    rate = RateMatrix(
        name="flat-limit",
        p11=lambda theta, n: 1.0,
        p12=lambda theta, n: 0.0,
        p21=lambda theta, n: theta[1] * math.log(n),
        p22=lambda theta, n: 1.0,
        limit=lambda theta: np.array([[1.0, 0.0], [0.0, 0.0]]),
    )
    report = check_rate_matrix(rate, (0.4, 1.0), [64, 256])
    det_limit = next(c for c in report.conditions if c.name == "det_limit")
    assert not det_limit.passed
    assert not report.passed


def test_check_rate_matrix_needs_two_sizes():
    with pytest.raises(ValueError):
        check_rate_matrix(canonical_rate_matrix(), (0.5, 1.0), [64])
