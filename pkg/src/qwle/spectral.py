"""Spectral density of fractional Gaussian noise and derived quantities.

The increments of fractional Brownian motion sampled on a unit grid form a
stationary sequence (fractional Gaussian noise) whose spectral density is

    f(lam) = c(H) * 2*(1 - cos lam) * sum_{j in Z} |lam + 2*pi*j|^(-1-2H),

with c(H) = Gamma(2H+1) * sin(pi*H) / (2*pi) chosen so that the density
integrates to the unit lag-zero autocovariance.  Everything else in the
package is built from this function:

* ``geometric_mean_density`` is b(H) = exp((2*pi)^-1 int log f), the
  geometric mean of the density over the frequency circle,
* ``normalized_density`` is g = f / b(H), which satisfies
  int log g dlam = 0 and is therefore scale-free,
* ``whittle_kernel`` is h = 1 / (4*pi^2*g), the weight used by the
  quadratic-form objective,
* ``information`` collects the asymptotic information quantities for the
  joint (H, sigma) parametrization.

The alias sum over j is evaluated with a truncated series plus a
closed-form Euler-Maclaurin tail; with the default truncation the worst
relative error sits near 1e-11, far below the 1e-6 budget the rest of
the package assumes.  Log singularities at frequency zero are handled
with a geometric panel mesh, so all integrals here are plain
Gauss-Legendre sums on that mesh.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import digamma, gamma as _gamma, gammaln

__all__ = [
    "QuadratureError",
    "SpectralModel",
    "InformationQuantities",
    "spectral_constant",
    "spectral_density",
    "geometric_mean_density",
    "dlog_geometric_mean",
    "normalized_density",
    "whittle_kernel",
    "dlog_normalized_density",
    "dlog_spectral_density",
    "information",
    "density_normalization",
    "fgn_autocovariance",
]

TWO_PI = 2.0 * np.pi


class QuadratureError(ArithmeticError):
    """A numerical integral or Fourier coefficient failed to converge."""

# Geometric frequency mesh: 48 panels with ratio 1/2 reach lam ~ 1e-14*pi,
# far below anything the integrands can resolve; the leftover stub near
# zero contributes O(1e-13) to the log integrals and is dropped.
_MESH_PANELS = 48


def spectral_constant(hurst: float) -> float:
    """Normalizing constant c(H) = Gamma(2H+1) sin(pi H) / (2 pi)."""
    return float(_gamma(2.0 * hurst + 1.0) * np.sin(np.pi * hurst) / TWO_PI)


def _dlog_spectral_constant(hurst: float) -> float:
    """d/dH of log c(H), i.e. 2*digamma(2H+1) + pi*cot(pi*H)."""
    return float(2.0 * digamma(2.0 * hurst + 1.0) + np.pi / np.tan(np.pi * hurst))


def _check_freq(lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if np.any(lam == 0.0) or np.any(np.abs(lam) > np.pi + 1e-12):
        raise ValueError("frequencies must be nonzero and lie in [-pi, pi]")
    return lam


def _alias_series(lam: np.ndarray, hurst: float, terms: int) -> np.ndarray:
    """Alias sum S(lam) = sum_{j in Z} |lam + 2 pi j|^(-1-2H).

    The first ``terms`` pairs are summed explicitly; the remainder is the
    midpoint Euler-Maclaurin expansion

        sum_{j>J} phi(j) = int_{J+1/2} phi + phi'(J+1/2)/24
                           - 7 phi'''(J+1/2)/5760 + O(phi^(5)),

    applied to phi(x) = (2 pi x +/- lam)^(-1-2H).  With terms=10 the worst
    relative error over H in [0.05, 0.95] is below 1e-9; the default of 20
    terms brings it near 1e-11.
    """
    lam = np.abs(np.asarray(lam, dtype=float))
    p = -1.0 - 2.0 * hurst
    j = np.arange(1, terms + 1).reshape((-1,) + (1,) * lam.ndim)
    s = lam**p + np.sum((TWO_PI * j + lam) ** p + (TWO_PI * j - lam) ** p, axis=0)
    mid = TWO_PI * (terms + 0.5)
    c3 = 7.0 / 5760.0 * (1 + 2 * hurst) * (2 + 2 * hurst) * (3 + 2 * hurst) * TWO_PI**3
    for c in (mid + lam, mid - lam):
        s += c ** (-2.0 * hurst) / (2.0 * TWO_PI * hurst)
        s -= (1 + 2 * hurst) * TWO_PI / 24.0 * c ** (p - 1.0)
        s += c3 * c ** (p - 3.0)
    return s


def _alias_series_dh(lam: np.ndarray, hurst: float, terms: int) -> np.ndarray:
    """Derivative of the alias sum with respect to H (same tail treatment)."""
    lam = np.abs(np.asarray(lam, dtype=float))
    p = -1.0 - 2.0 * hurst
    j = np.arange(1, terms + 1).reshape((-1,) + (1,) * lam.ndim)
    a = TWO_PI * j + lam
    b = TWO_PI * j - lam
    s = -2.0 * np.log(lam) * lam**p
    s += np.sum(-2.0 * np.log(a) * a**p - 2.0 * np.log(b) * b**p, axis=0)
    mid = TWO_PI * (terms + 0.5)
    poly = (1 + 2 * hurst) * (2 + 2 * hurst) * (3 + 2 * hurst)
    dpoly = 2.0 * (
        (2 + 2 * hurst) * (3 + 2 * hurst)
        + (1 + 2 * hurst) * (3 + 2 * hurst)
        + (1 + 2 * hurst) * (2 + 2 * hurst)
    )
    for c in (mid + lam, mid - lam):
        lc = np.log(c)
        s += c ** (-2.0 * hurst) / (2.0 * TWO_PI * hurst) * (-2.0 * lc - 1.0 / hurst)
        s -= TWO_PI / 24.0 * c ** (p - 1.0) * (2.0 - 2.0 * (1 + 2 * hurst) * lc)
        s += 7.0 / 5760.0 * TWO_PI**3 * c ** (p - 3.0) * (dpoly - 2.0 * poly * lc)
    return s


@lru_cache(maxsize=8)
def _mesh(quad_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on (0, pi], geometrically graded at 0."""
    order = max(6, round(quad_points / _MESH_PANELS))
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.pi * 0.5 ** np.arange(_MESH_PANELS + 1)
    hi, lo = edges[:-1], edges[1:]
    mid = 0.5 * (hi + lo)[:, None]
    half = 0.5 * (hi - lo)[:, None]
    nodes = (mid + half * x[None, :]).ravel()
    weights = (half * w[None, :]).ravel()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@lru_cache(maxsize=256)
def _log_mean_and_dh(hurst: float, terms: int, quad_points: int) -> tuple[float, float]:
    """(log b(H), d/dH log b(H)) by quadrature of log f and its H derivative."""
    nodes, weights = _mesh(quad_points)
    c = spectral_constant(hurst)
    msq = (2.0 * np.sin(nodes / 2.0)) ** 2
    series = _alias_series(nodes, hurst, terms)
    log_f = np.log(c) + np.log(msq) + np.log(series)
    dlog_f = _dlog_spectral_constant(hurst) + _alias_series_dh(nodes, hurst, terms) / series
    # even integrands: (1/2pi) * int_{-pi}^{pi} = (1/pi) * int_0^pi
    log_b = float(np.sum(weights * log_f) / np.pi)
    dlog_b = float(np.sum(weights * dlog_f) / np.pi)
    return log_b, dlog_b


@dataclass(frozen=True)
class SpectralModel:
    """Fractional Gaussian noise spectrum for a fixed Hurst index.

    Parameters
    ----------
    hurst : float
        Hurst index, strictly between 0 and 1.
    paxson_terms : int
        Number of explicit alias terms before the closed-form tail.  The
        default of 20 keeps the relative truncation error near 1e-11,
        which the exact-objective checks at H = 1/2 rely on.
    quad_points : int
        Target number of quadrature nodes for integrals on [-pi, pi].
    """

    hurst: float
    paxson_terms: int = 20
    quad_points: int = 512

    def __post_init__(self) -> None:
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.paxson_terms < 1:
            raise ValueError("paxson_terms must be at least 1")
        if self.quad_points < 64:
            raise ValueError("quad_points must be at least 64")

    @cached_property
    def constant(self) -> float:
        return spectral_constant(self.hurst)

    @cached_property
    def _log_b(self) -> tuple[float, float]:
        return _log_mean_and_dh(self.hurst, self.paxson_terms, self.quad_points)


@dataclass(frozen=True)
class InformationQuantities:
    """Asymptotic information for the (H, sigma) parametrization.

    ``fisher`` is the 2x2 matrix (4 pi)^-1 int (dlog f_theta)(dlog f_theta)^T
    for f_theta = sigma^2 f_H.  ``shape_info`` is the same integral for the
    scale-free normalized density alone, and ``hurst_info = 2 * shape_info``
    is the one-parameter information for H once sigma has been profiled out.
    """

    fisher: np.ndarray
    shape_info: float
    hurst_info: float


def spectral_density(model: SpectralModel, lam) -> np.ndarray:
    """Evaluate f at frequencies ``lam`` (nonzero, in [-pi, pi])."""
    lam = _check_freq(lam)
    msq = (2.0 * np.sin(lam / 2.0)) ** 2
    return model.constant * msq * _alias_series(lam, model.hurst, model.paxson_terms)


def dlog_spectral_density(model: SpectralModel, lam) -> np.ndarray:
    """Derivative of log f with respect to the Hurst index."""
    lam = _check_freq(lam)
    series = _alias_series(lam, model.hurst, model.paxson_terms)
    dseries = _alias_series_dh(lam, model.hurst, model.paxson_terms)
    return _dlog_spectral_constant(model.hurst) + dseries / series


def geometric_mean_density(model: SpectralModel) -> float:
    """b(H) = exp((2 pi)^-1 int_{-pi}^{pi} log f dlam)."""
    value = float(np.exp(model._log_b[0]))
    if not np.isfinite(value) or value <= 0.0:
        raise QuadratureError(f"geometric mean of the density is {value}")
    return value


def dlog_geometric_mean(model: SpectralModel) -> float:
    """d/dH log b(H), by differentiating the quadrature under the integral."""
    return model._log_b[1]


def normalized_density(model: SpectralModel, lam) -> np.ndarray:
    """g = f / b(H); its log integrates to zero over the circle."""
    return spectral_density(model, lam) / geometric_mean_density(model)


def whittle_kernel(model: SpectralModel, lam) -> np.ndarray:
    """h = 1 / (4 pi^2 g), the weight of the quadratic-form objective."""
    return geometric_mean_density(model) / (4.0 * np.pi**2 * spectral_density(model, lam))


def dlog_normalized_density(model: SpectralModel, lam) -> np.ndarray:
    """d/dH of log g = d/dH log f - d/dH log b."""
    return dlog_spectral_density(model, lam) - dlog_geometric_mean(model)


def density_normalization(model: SpectralModel) -> float:
    """int_{-pi}^{pi} f dlam, which equals the unit lag-zero autocovariance.

    The |lam|^(1-2H) singularity carries most of the mass as H -> 1, so it
    is split off and integrated in closed form: with m = |2 sin(lam/2)|,
    int m^(1-2H) dlam = 2 pi Gamma(2-2H) / Gamma(3/2-H)^2, and the residual
    f - C_H m^(1-2H) = O(lam^(3-2H)) is left to the quadrature mesh.
    """
    hurst = model.hurst
    nodes, weights = _mesh(model.quad_points)
    msq = (2.0 * np.sin(nodes / 2.0)) ** 2
    series = _alias_series(nodes, hurst, model.paxson_terms)
    residual = model.constant * (msq * series - msq ** (0.5 - hurst))
    closed = model.constant * TWO_PI * np.exp(
        gammaln(2.0 - 2.0 * hurst) - 2.0 * gammaln(1.5 - hurst)
    )
    return float(2.0 * np.sum(weights * residual) + closed)


def information(model: SpectralModel, sigma: float) -> InformationQuantities:
    """Information quantities at (H, sigma).

    The full parametrization has density sigma^2 f_H, so the score in sigma
    is the constant 2/sigma and the (2,2) entry is exactly 2/sigma^2; the
    cross entry reduces to (d/dH log b) / sigma.  ``shape_info`` integrates
    the squared centered score (d/dH log g)^2 and satisfies the identity
    shape_info = fisher[0,0] - sigma^2 * fisher[0,1]^2 / 2.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    nodes, weights = _mesh(model.quad_points)
    dlog_f = dlog_spectral_density(model, nodes)
    dlog_b = dlog_geometric_mean(model)
    f11 = float(np.sum(weights * dlog_f**2) / TWO_PI)
    f12 = dlog_b / sigma
    fisher = np.array([[f11, f12], [f12, 2.0 / sigma**2]])
    shape = float(np.sum(weights * (dlog_f - dlog_b) ** 2) / TWO_PI)
    if not np.isfinite(shape) or shape <= 0.0:
        raise QuadratureError("information quadrature is not positive")
    return InformationQuantities(fisher=fisher, shape_info=shape, hurst_info=2.0 * shape)


def fgn_autocovariance(hurst: float, lags) -> np.ndarray:
    """Autocovariance of unit-scale fractional Gaussian noise.

    gamma(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2, with gamma(0) = 1.
    """
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (0, 1), got {hurst}")
    k = np.abs(np.asarray(lags, dtype=float))
    two_h = 2.0 * hurst
    return 0.5 * ((k + 1.0) ** two_h - 2.0 * k**two_h + np.abs(k - 1.0) ** two_h)
