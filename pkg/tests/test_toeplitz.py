"""Toeplitz-operator checks.

Independent oracles used here: dense O(n^2) matrix products for every
fast path, high-precision mpmath quadrature for the closed-form
sine-power Fourier coefficients, a dense symmetric square root for the
Frobenius deficit, and the closed-form fGn autocovariance for the
density kernel rows.
"""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qwle.toeplitz as toeplitz
from qwle.spectral import QuadratureError, SpectralModel, fgn_autocovariance
from qwle.toeplitz import (
    DENSE_CAP,
    KERNELS,
    RateFit,
    ToeplitzOperator,
    _sine_power_coef,
    _sine_power_log_coef,
    build,
    frobenius_deficit,
    ones_quadratic_rates,
    quad_form,
    trace_product,
)

TWO_PI = 2.0 * math.pi


def _mp_sine_power_coef(tau, alpha, with_log=False):
    mpmath.mp.dps = 50

    def integrand(t):
        m = 2.0 * mpmath.sin(t / 2.0)
        value = m ** (-alpha) * mpmath.cos(tau * t)
        if with_log:
            value *= mpmath.log(m)
        return value

    return float(2.0 * mpmath.quad(integrand, [0, mpmath.pi]))


@pytest.mark.parametrize("alpha", [-0.8, -0.5, 0.0 + 1e-9, 0.4, 0.8])
@pytest.mark.parametrize("tau", [0, 1, 7])
def test_sine_power_coef_against_mpmath(alpha, tau):
    expected = _mp_sine_power_coef(tau, alpha)
    got = float(_sine_power_coef(np.array([tau]), alpha)[0])
    assert got == pytest.approx(expected, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("alpha", [-0.6, 0.4])
@pytest.mark.parametrize("tau", [0, 3])
def test_sine_power_log_coef_against_mpmath(alpha, tau):
    expected = _mp_sine_power_coef(tau, alpha, with_log=True)
    got = float(_sine_power_log_coef(np.array([tau]), alpha)[0])
    assert got == pytest.approx(expected, rel=1e-8, abs=1e-10)


def test_sine_power_coef_rejects_large_alpha():
    with pytest.raises(ValueError):
        _sine_power_coef(np.array([0]), 1.0)


def test_density_rows_match_autocovariance():
    # the module's deepest anchor: Fourier coefficients of f are gamma_H
    for hurst in (0.1, 0.3, 0.5, 0.7, 0.9):
        op = build(SpectralModel(hurst=hurst), "density", 64)
        expected = fgn_autocovariance(hurst, np.arange(64))
        assert np.max(np.abs(op.first_row - expected)) < 1e-8


def test_white_noise_rows_are_diagonal():
    h_op = build(SpectralModel(hurst=0.5), "whittle", 12)
    assert h_op.first_row[0] == pytest.approx(1.0 / TWO_PI, rel=1e-10)
    assert np.max(np.abs(h_op.first_row[1:])) < 1e-10
    g_op = build(SpectralModel(hurst=0.5), "normalized", 4)
    assert g_op.first_row[0] == pytest.approx(TWO_PI, rel=1e-10)
    assert np.max(np.abs(g_op.first_row[1:])) < 1e-10


def test_build_validation():
    model = SpectralModel(hurst=0.4)
    with pytest.raises(ValueError):
        build(model, "density", 0)
    with pytest.raises(ValueError):
        build(model, "spectral", 8)


def test_build_certification_flags_unconverged_rows(monkeypatch):
    def fake_first_row(model, kernel, n, nfft):
        return np.full(n, 1.0 + (1e-3 if nfft > 2**14 else 0.0))

    monkeypatch.setattr(toeplitz, "_first_row", fake_first_row)
    with pytest.raises(QuadratureError, match="did not converge"):
        build(SpectralModel(hurst=0.3), "whittle", 8)


def test_operator_validation():
    with pytest.raises(ValueError):
        ToeplitzOperator(first_row=np.ones(3), n=4)
    with pytest.raises(QuadratureError):
        ToeplitzOperator(first_row=np.array([1.0, np.nan]), n=2)
    op = ToeplitzOperator(first_row=np.array([2.0, 1.0]), n=2)
    with pytest.raises(ValueError):
        op.matvec(np.ones(3))
    with pytest.raises(ValueError):
        ToeplitzOperator(first_row=np.zeros(DENSE_CAP + 1), n=DENSE_CAP + 1).dense()


def test_quad_form_small_closed_form():
    op = build(SpectralModel(hurst=0.5), "whittle", 4)
    ones = np.ones(4)
    assert quad_form(op, ones) == pytest.approx(4.0 / TWO_PI, rel=1e-10)
    assert quad_form(op, np.zeros(4), ones) == 0.0


def test_quad_form_matches_dense_oracle():
    rng = np.random.default_rng(7)
    for kernel, hurst, n in (("density", 0.7, 64), ("dwhittle", 0.25, 512)):
        op = build(SpectralModel(hurst=hurst), kernel, n)
        dense = op.dense()
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        expected = float(x @ dense @ y)
        assert quad_form(op, x, y) == pytest.approx(expected, rel=1e-9)
        assert quad_form(op, x, y) == pytest.approx(quad_form(op, y, x), rel=1e-12)


def test_positive_definite_kernels():
    for hurst in (0.2, 0.5, 0.8):
        for kernel in ("normalized", "whittle"):
            dense = build(SpectralModel(hurst=hurst), kernel, 256).dense()
            assert np.linalg.eigvalsh(dense).min() > 0.0


def test_trace_product_identities():
    n = 16
    model = SpectralModel(hurst=0.5)
    g_op = build(model, "normalized", n)
    h_op = build(model, "whittle", n)
    assert trace_product([g_op, h_op]) == pytest.approx(float(n), rel=1e-8)
    a = ToeplitzOperator(first_row=np.array([3.0] + [0.0] * (n - 1)), n=n)
    b = ToeplitzOperator(first_row=np.array([0.5] + [0.0] * (n - 1)), n=n)
    assert trace_product([a, b]) == pytest.approx(1.5 * n, abs=0.0)


def test_trace_product_matches_dense_oracle():
    op = build(SpectralModel(hurst=0.7), "density", 8)
    dense = op.dense()
    assert trace_product([op, op]) == pytest.approx(float(np.trace(dense @ dense)), rel=1e-12)
    g_op = build(SpectralModel(hurst=0.7), "normalized", 8)
    expected = float(np.trace(dense @ g_op.dense() @ dense @ g_op.dense()))
    assert trace_product([op, g_op, op, g_op]) == pytest.approx(expected, rel=1e-10)


def test_trace_product_validation():
    op = build(SpectralModel(hurst=0.6), "whittle", 8)
    other = build(SpectralModel(hurst=0.6), "whittle", 16)
    with pytest.raises(ValueError):
        trace_product([op])
    with pytest.raises(ValueError):
        trace_product([op, op, op])
    with pytest.raises(ValueError):
        trace_product([op, other])


def test_frobenius_deficit_white_noise_vanishes():
    for n in (8, 64):
        assert frobenius_deficit(SpectralModel(hurst=0.5), n) < 1e-10


def test_frobenius_deficit_matches_dense_square_root():
    model = SpectralModel(hurst=0.3)
    n = 64
    g = build(model, "normalized", n).dense()
    h = build(model, "whittle", n).dense()
    evals, evecs = np.linalg.eigh(g)
    assert evals.min() > 0.0
    root = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    sandwich = root @ h @ root
    expected = float(np.sum((np.eye(n) - sandwich) ** 2))
    assert frobenius_deficit(model, n) == pytest.approx(expected, rel=1e-6)


def test_frobenius_deficit_slow_growth():
    ns = (64, 128, 256, 512)
    values = [frobenius_deficit(SpectralModel(hurst=0.7), n) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(values), 1)[0]
    assert slope <= 0.3


def test_frobenius_deficit_size_cap():
    with pytest.raises(ValueError):
        frobenius_deficit(SpectralModel(hurst=0.4), DENSE_CAP + 1)


def test_rate_fit_validation():
    with pytest.raises(ValueError):
        RateFit(ns=(8, 8), values=np.ones(2), fitted_slope=0.0, claimed_bound=1.0)
    with pytest.raises(ValueError):
        RateFit(ns=(8,), values=np.ones(1), fitted_slope=0.0, claimed_bound=1.0)
    with pytest.raises(ValueError):
        RateFit(ns=(4, 8), values=np.array([1.0, -2.0]), fitted_slope=0.0, claimed_bound=1.0)
    assert RateFit(ns=(4, 8), values=np.ones(2), fitted_slope=0.5, claimed_bound=0.4).passed
    assert not RateFit(ns=(4, 8), values=np.ones(2), fitted_slope=0.6, claimed_bound=0.4).passed


def test_ones_rates_white_noise_saturates_bound():
    fits = ones_quadratic_rates(SpectralModel(hurst=0.5), 0, [64, 128, 256])
    for fit in fits.values():
        expected = np.asarray(fit.ns) / TWO_PI
        assert np.max(np.abs(fit.values / expected - 1.0)) < 1e-9
        assert fit.fitted_slope == pytest.approx(1.0, abs=1e-6)
        assert fit.claimed_bound == 1.0
        assert fit.passed


def test_ones_rates_short_memory_decay():
    fits = ones_quadratic_rates(SpectralModel(hurst=0.8), 0, [64, 128, 256, 512])
    assert fits["linear"].fitted_slope <= 0.55
    assert fits["sandwich"].fitted_slope <= 0.55


def test_ones_rates_derivative_kernel_long_memory():
    fits = ones_quadratic_rates(SpectralModel(hurst=0.2), 1, [64, 128, 256, 512])
    assert fits["linear"].fitted_slope <= 1.75


def test_ones_rates_validation():
    model = SpectralModel(hurst=0.5)
    with pytest.raises(ValueError):
        ones_quadratic_rates(model, 2, [64, 128])
    with pytest.raises(ValueError):
        ones_quadratic_rates(model, 0, [])
    with pytest.raises(ValueError):
        ones_quadratic_rates(model, 0, [64, DENSE_CAP + 1])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 48))
def test_matvec_matches_dense(seed, n):
    rng = np.random.default_rng(seed)
    op = ToeplitzOperator(first_row=rng.standard_normal(n), n=n)
    x = rng.standard_normal(n)
    expected = op.dense() @ x
    scale = max(1.0, float(np.max(np.abs(expected))))
    assert np.max(np.abs(op.matvec(x) - expected)) < 1e-10 * scale


def test_kernel_names_stable():
    assert KERNELS == ("density", "normalized", "whittle", "dnormalized", "dwhittle")
