"""Toeplitz operators built from Fourier coefficients of spectral kernels.

A symmetric Toeplitz matrix is stored as its first row, the Fourier
coefficients c(tau) = int_{-pi}^{pi} e^{i tau lam} k(lam) dlam of an even
kernel k.  Five kernels are supported:

    density      f, the fGn spectral density (rows equal the fGn
                 autocovariance, the deepest cross-check in the package)
    normalized   g = f / b(H)
    whittle      h = 1 / (4 pi^2 g), the objective weight
    dnormalized  dg/dH
    dwhittle     dh/dH

All five behave like |lam|^(-alpha) (times 1 or log|lam| for the
derivative kernels) at frequency zero, so a plain FFT of kernel samples
converges too slowly.  ``build`` therefore subtracts a closed-form
singular model amp * m(lam)^(-alpha) (+ amp_log * m^(-alpha) log m) with
m(lam) = |2 sin(lam/2)|, integrates the smooth remainder by a
midpoint-grid FFT, and adds back the exact Fourier coefficients of the
model, which are ratios of gamma functions.  A grid-doubling step
certifies convergence and raises ``QuadratureError`` otherwise.

Quadratic forms and matrix-vector products run in O(n log n) through the
standard circulant embedding; dense paths (traces, eigenvalues) are
capped at n = 1024 and exist only for the small-n rate checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import gamma as _gamma, gammaln

from .spectral import (
    QuadratureError,
    SpectralModel,
    _dlog_spectral_constant,
    dlog_geometric_mean,
    dlog_normalized_density,
    geometric_mean_density,
    normalized_density,
    spectral_density,
    whittle_kernel,
)

__all__ = [
    "KERNELS",
    "ToeplitzOperator",
    "RateFit",
    "build",
    "quad_form",
    "trace_product",
    "frobenius_deficit",
    "ones_quadratic_rates",
]

TWO_PI = 2.0 * np.pi
DENSE_CAP = 1024
CONVERGENCE_TOL = 1e-6

KERNELS = ("density", "normalized", "whittle", "dnormalized", "dwhittle")


@dataclass(frozen=True)
class ToeplitzOperator:
    """Symmetric n x n Toeplitz operator defined by its first row."""

    first_row: np.ndarray
    n: int
    kernel: str = ""

    def __post_init__(self) -> None:
        row = np.asarray(self.first_row, dtype=float)
        if row.ndim != 1 or row.size != self.n or self.n < 1:
            raise ValueError("first_row must be a vector of length n")
        if not np.all(np.isfinite(row)):
            raise QuadratureError("non-finite Fourier coefficients")
        row = row.copy()
        row.flags.writeable = False
        object.__setattr__(self, "first_row", row)

    @cached_property
    def _circulant_fft(self) -> np.ndarray:
        # embed into the 2n circulant [c0..c_{n-1}, 0, c_{n-1}..c1]
        row = self.first_row
        emb = np.concatenate([row, [0.0], row[-1:0:-1]])
        return np.fft.rfft(emb)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}")
        pad = np.zeros(2 * self.n)
        pad[: self.n] = x
        return np.fft.irfft(self._circulant_fft * np.fft.rfft(pad), 2 * self.n)[: self.n]

    def quad_form(self, x: np.ndarray, y: np.ndarray | None = None) -> float:
        if y is None:
            y = x
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}")
        return float(np.dot(np.asarray(x, dtype=float), self.matvec(y)))

    def dense(self) -> np.ndarray:
        if self.n > DENSE_CAP:
            raise ValueError(f"dense path capped at n = {DENSE_CAP}")
        idx = np.abs(np.subtract.outer(np.arange(self.n), np.arange(self.n)))
        return self.first_row[idx]


@dataclass(frozen=True)
class RateFit:
    """Log-log growth fit of a positive sequence against its claimed rate."""

    ns: tuple[int, ...]
    values: np.ndarray
    fitted_slope: float
    claimed_bound: float

    def __post_init__(self) -> None:
        ns = tuple(int(n) for n in self.ns)
        values = np.asarray(self.values, dtype=float)
        if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("ns must be strictly increasing with at least 2 entries")
        if values.shape != (len(ns),) or not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ValueError("values must be positive and finite, one per n")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "ns", ns)
        object.__setattr__(self, "values", values)

    @property
    def passed(self) -> bool:
        return self.fitted_slope <= self.claimed_bound + 0.15


def _sine_power_coef(taus: np.ndarray, alpha: float) -> np.ndarray:
    """Fourier coefficients int m(lam)^(-alpha) e^(i tau lam) dlam.

    Closed form 2 pi G(1-alpha) G(tau+alpha/2) / (G(1-alpha/2) G(alpha/2)
    G(tau+1-alpha/2)) for alpha < 1, evaluated through gammaln for the
    tau-dependent ratio so large lags stay stable.  alpha = 0 degenerates
    gracefully: 1/G(0) = 0 kills every lag except tau = 0.
    """
    if not alpha < 1.0:
        raise ValueError("sine-power coefficients require alpha < 1")
    taus = np.asarray(taus, dtype=int)
    out = np.empty(taus.shape, dtype=float)
    zero = taus == 0
    out[zero] = TWO_PI * _gamma(1.0 - alpha) / _gamma(1.0 - alpha / 2.0) ** 2
    t = taus[~zero].astype(float)
    prefac = TWO_PI * _gamma(1.0 - alpha) / (_gamma(1.0 - alpha / 2.0) * _gamma(alpha / 2.0))
    out[~zero] = prefac * np.exp(gammaln(t + alpha / 2.0) - gammaln(t + 1.0 - alpha / 2.0))
    return out


def _sine_power_log_coef(taus: np.ndarray, alpha: float, eps: float = 1e-6) -> np.ndarray:
    """Fourier coefficients of m^(-alpha) log m, as -d/d(alpha) of the above.

    The derivative of the gamma-ratio closed form is taken by a central
    difference in alpha; the integrand is analytic in alpha so the step
    error is ~1e-11, far below the builder's convergence tolerance.
    """
    upper = _sine_power_coef(taus, alpha + eps)
    lower = _sine_power_coef(taus, alpha - eps)
    return -(upper - lower) / (2.0 * eps)


def _kernel_values(model: SpectralModel, kernel: str, lam: np.ndarray) -> np.ndarray:
    if kernel == "density":
        return spectral_density(model, lam)
    if kernel == "normalized":
        return normalized_density(model, lam)
    if kernel == "whittle":
        return whittle_kernel(model, lam)
    if kernel == "dnormalized":
        return normalized_density(model, lam) * dlog_normalized_density(model, lam)
    if kernel == "dwhittle":
        return -whittle_kernel(model, lam) * dlog_normalized_density(model, lam)
    raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")


def _singular_model(model: SpectralModel, kernel: str) -> tuple[float, float, float]:
    """(alpha, amp, amp_log) of the kernel's behaviour near frequency zero.

    Each kernel equals amp * m^(-alpha) + amp_log * m^(-alpha) log m plus
    a remainder smooth enough for the midpoint FFT.  The amplitudes come
    from f ~ C_H |lam|^(1-2H) and d/dH log g ~ c0 - 2 log|lam| at 0, with
    c0 = d/dH log C_H - d/dH log b.
    """
    hurst = model.hurst
    b = geometric_mean_density(model)
    amp_g = model.constant / b
    amp_h = b / (4.0 * np.pi**2 * model.constant)
    if kernel == "density":
        return 2.0 * hurst - 1.0, model.constant, 0.0
    if kernel == "normalized":
        return 2.0 * hurst - 1.0, amp_g, 0.0
    if kernel == "whittle":
        return 1.0 - 2.0 * hurst, amp_h, 0.0
    c0 = _dlog_spectral_constant(hurst) - dlog_geometric_mean(model)
    if kernel == "dnormalized":
        return 2.0 * hurst - 1.0, amp_g * c0, -2.0 * amp_g
    if kernel == "dwhittle":
        return 1.0 - 2.0 * hurst, -amp_h * c0, 2.0 * amp_h
    raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")


def _first_row(model: SpectralModel, kernel: str, n: int, nfft: int) -> np.ndarray:
    alpha, amp, amp_log = _singular_model(model, kernel)
    step = TWO_PI / nfft
    lam = -np.pi + (np.arange(nfft) + 0.5) * step
    m = np.abs(2.0 * np.sin(lam / 2.0))
    values = _kernel_values(model, kernel, lam) - amp * m**-alpha
    if amp_log != 0.0:
        values -= amp_log * m**-alpha * np.log(m)
    taus = np.arange(n)
    # midpoint grid shifts every coefficient by a pure phase
    phase = np.exp(1j * taus * (step / 2.0 - np.pi))
    row = TWO_PI * (phase * np.fft.ifft(values)[:n]).real
    row += amp * _sine_power_coef(taus, alpha)
    if amp_log != 0.0:
        row += amp_log * _sine_power_log_coef(taus, alpha)
    return row


def build(model: SpectralModel, kernel: str, n: int, nfft: int | None = None) -> ToeplitzOperator:
    """Toeplitz operator of the kernel's first n Fourier coefficients.

    The row is computed at the working grid size (max(2^14, 8n) rounded up
    to a power of two by default) and again at twice that; a relative
    change above 1e-6 of the row's peak raises ``QuadratureError``, and
    the refined row is the one returned.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")
    if nfft is None:
        nfft = max(2**14, 1 << (8 * n - 1).bit_length())
    coarse = _first_row(model, kernel, n, nfft)
    fine = _first_row(model, kernel, n, 2 * nfft)
    if not np.all(np.isfinite(fine)):
        raise QuadratureError(f"non-finite Fourier coefficients for kernel {kernel!r}")
    deviation = np.max(np.abs(fine - coarse)) / np.max(np.abs(fine))
    if deviation > CONVERGENCE_TOL:
        raise QuadratureError(
            f"Fourier coefficients of {kernel!r} did not converge: "
            f"relative change {deviation:.2e} between {nfft} and {2 * nfft} grid points"
        )
    return ToeplitzOperator(first_row=fine, n=n, kernel=kernel)


def quad_form(op: ToeplitzOperator, x: np.ndarray, y: np.ndarray | None = None) -> float:
    """<x, T y> via the circulant embedding (O(n log n))."""
    return op.quad_form(x, y)


def trace_product(ops: list[ToeplitzOperator]) -> float:
    """Trace of the product of two or four same-size Toeplitz operators."""
    if len(ops) not in (2, 4):
        raise ValueError("trace_product takes exactly 2 or 4 operators")
    n = ops[0].n
    if any(op.n != n for op in ops):
        raise ValueError("operators must share the same dimension")
    if n > DENSE_CAP:
        raise ValueError(f"dense path capped at n = {DENSE_CAP}")
    mats = [op.dense() for op in ops]
    if len(mats) == 2:
        # both symmetric, so Tr[AB] = sum(A * B)
        return float(np.sum(mats[0] * mats[1]))
    left = mats[0] @ mats[1]
    right = mats[2] @ mats[3]
    return float(np.sum(left * right.T))


def frobenius_deficit(model: SpectralModel, n: int) -> float:
    """Squared Frobenius distance of T_n(g)^(1/2) T_n(h) T_n(g)^(1/2) from I_n.

    Expanding the square turns it into n - 2 Tr[T(g)T(h)] +
    Tr[T(g)T(h)T(g)T(h)], so no matrix square roots are needed.  The
    traces cancel to near machine zero at H = 1/2; small negative results
    are clamped and anything below -1e-8 flags a numerical failure.
    """
    if n > DENSE_CAP:
        raise ValueError(f"dense path capped at n = {DENSE_CAP}")
    g_op = build(model, "normalized", n)
    h_op = build(model, "whittle", n)
    value = n - 2.0 * trace_product([g_op, h_op]) + trace_product([g_op, h_op, g_op, h_op])
    if value < -1e-8:
        raise QuadratureError(f"Frobenius deficit {value:.3e} is negative beyond roundoff")
    return max(value, 0.0)


def _loglog_slope(ns, values) -> float:
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(values), 1)[0])


def ones_quadratic_rates(model: SpectralModel, j: int, ns: list[int]) -> dict[str, RateFit]:
    """Growth of <1, T(k) 1> and <1, T(k) T(g) T(k) 1> for k = h or dh/dH.

    Both quadratic forms should grow no faster than n^(2(1-H)), up to
    slack; the fits use absolute values because the derivative kernel is
    signed.  Returns fits keyed "linear" and "sandwich".
    """
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    ns = sorted(int(n) for n in ns)
    if not ns or ns[-1] > DENSE_CAP:
        raise ValueError(f"need at least one n, all within the dense cap {DENSE_CAP}")
    kernel = "whittle" if j == 0 else "dwhittle"
    linear = np.empty(len(ns))
    sandwich = np.empty(len(ns))
    for i, n in enumerate(ns):
        k_op = build(model, kernel, n)
        g_op = build(model, "normalized", n)
        ones = np.ones(n)
        w = k_op.matvec(ones)
        linear[i] = np.dot(ones, w)
        sandwich[i] = np.dot(w, g_op.matvec(w))
    bound = 2.0 * (1.0 - model.hurst)
    return {
        "linear": RateFit(
            ns=tuple(ns),
            values=np.abs(linear),
            fitted_slope=_loglog_slope(ns, np.abs(linear)),
            claimed_bound=bound,
        ),
        "sandwich": RateFit(
            ns=tuple(ns),
            values=np.abs(sandwich),
            fitted_slope=_loglog_slope(ns, np.abs(sandwich)),
            claimed_bound=bound,
        ),
    }
