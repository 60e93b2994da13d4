"""Periodogram and the Whittle objective nu_n^2(H).

The objective has two evaluation routes that cross-validate each other:

* fast: one FFT of the increments, then a frequency-domain average of
  periodogram / normalized density over the Fourier frequencies
  2 pi j / n, j = 1 .. n-1 (the zero frequency is excluded, which also
  makes the objective invariant to a constant shift of the increments),
* exact: the Toeplitz quadratic form <x, T_n(h) x> / n.

``WhittleObjective`` wraps either route as a plain callable of H with the
data-dependent state (FFT, folded frequencies) computed once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import toeplitz
from .spectral import SpectralModel, normalized_density

__all__ = [
    "IncrementSeries",
    "Periodogram",
    "periodogram",
    "nu2",
    "objective_profile",
    "WhittleObjective",
]

TWO_PI = 2.0 * np.pi
EXACT_CAP = 2**16


@dataclass(frozen=True)
class IncrementSeries:
    """Observed increments of one path on [0, 1], sampled every 1/n.

    ``demeaned`` asks downstream consumers to subtract the sample mean of
    the increments first; it is off by default and mainly matters for the
    exact objective (the fast route drops the zero frequency anyway).
    """

    increments: np.ndarray
    demeaned: bool = False

    def __post_init__(self) -> None:
        x = np.asarray(self.increments, dtype=float)
        if x.ndim != 1 or x.size < 8:
            raise ValueError("need a one-dimensional series of at least 8 increments")
        if not np.all(np.isfinite(x)):
            raise ValueError("increments must be finite")
        x = x.copy()
        x.flags.writeable = False
        object.__setattr__(self, "increments", x)

    @property
    def n(self) -> int:
        return self.increments.size

    @property
    def delta(self) -> float:
        return 1.0 / self.n

    @classmethod
    def from_increments(cls, values, demeaned: bool = False) -> "IncrementSeries":
        return cls(increments=np.asarray(values, dtype=float), demeaned=demeaned)

    @classmethod
    def from_levels(cls, levels, demeaned: bool = False) -> "IncrementSeries":
        """Difference a level series X_0, X_{1/n}, ..., X_1 (n+1 values)."""
        levels = np.asarray(levels, dtype=float)
        if levels.ndim != 1 or levels.size < 9:
            raise ValueError("need at least 9 levels to form 8 increments")
        return cls(increments=np.diff(levels), demeaned=demeaned)


@dataclass(frozen=True)
class Periodogram:
    """I_n at the Fourier frequencies 2 pi j / n, j = 1 .. n-1.

    ``dc_value`` keeps the j = 0 term so Parseval's identity
    (2 pi / n) (dc + sum values) = mean(x^2) stays checkable.
    """

    freqs: np.ndarray
    values: np.ndarray
    dc_value: float
    n: int


def periodogram(series: IncrementSeries) -> Periodogram:
    """Raw periodogram |FFT(x)|^2 / (2 pi n) of the increment series."""
    x = series.increments
    if series.demeaned:
        x = x - x.mean()
    n = series.n
    transform = np.fft.fft(x)
    values = (transform.real**2 + transform.imag**2) / (TWO_PI * n)
    return Periodogram(
        freqs=TWO_PI * np.arange(1, n) / n,
        values=values[1:],
        dc_value=float(values[0]),
        n=n,
    )


def _folded_freqs(n: int) -> np.ndarray:
    """Fourier frequencies j = 1 .. n-1 folded into (0, pi] by evenness."""
    lam = TWO_PI * np.arange(1, n) / n
    return np.minimum(lam, TWO_PI - lam)


class WhittleObjective:
    """The map H -> nu_n^2(H) with per-series state precomputed.

    Evaluations are cached by H, so a grid pre-scan followed by a line
    search pays for each H only once.
    """

    def __init__(
        self,
        series: IncrementSeries,
        mode: str = "fast",
        paxson_terms: int | None = None,
        quad_points: int | None = None,
    ) -> None:
        if mode not in ("fast", "exact"):
            raise ValueError("mode must be 'fast' or 'exact'")
        if mode == "exact" and series.n > EXACT_CAP:
            raise ValueError(f"exact mode is capped at n = {EXACT_CAP}")
        self.series = series
        self.mode = mode
        self._model_kwargs = {}
        if paxson_terms is not None:
            self._model_kwargs["paxson_terms"] = paxson_terms
        if quad_points is not None:
            self._model_kwargs["quad_points"] = quad_points
        self._cache: dict[float, float] = {}
        n = series.n
        if mode == "fast":
            # Anchoring at x[0] only touches the discarded zero-frequency
            # bin but makes paired inputs that differ by a constant shift
            # reach the FFT with identical bits.
            base = series.increments - series.increments[0]
            if series.demeaned:
                base = base - base.mean()
            transform = np.fft.fft(base)
            power = (transform.real**2 + transform.imag**2)[1:] / (TWO_PI * n)
            self._power = power
            self._freqs = _folded_freqs(n)
            self._x = None
        else:
            x = series.increments
            if series.demeaned:
                x = x - x.mean()
            self._x = x
            self._power = None
            self._freqs = None

    def model(self, hurst: float) -> SpectralModel:
        return SpectralModel(hurst=hurst, **self._model_kwargs)

    def __call__(self, hurst: float) -> float:
        hurst = float(hurst)
        cached = self._cache.get(hurst)
        if cached is not None:
            return cached
        model = self.model(hurst)
        n = self.series.n
        if self.mode == "fast":
            value = float(np.sum(self._power / normalized_density(model, self._freqs)) / n)
        else:
            op = toeplitz.build(model, "whittle", n)
            value = op.quad_form(self._x) / n
        self._cache[hurst] = value
        return value

    def profile(self, h_grid) -> np.ndarray:
        h_grid = np.asarray(h_grid, dtype=float)
        if h_grid.ndim != 1 or h_grid.size < 1:
            raise ValueError("need a one-dimensional, nonempty grid")
        if np.any(h_grid <= 0.0) or np.any(h_grid >= 1.0) or np.any(np.diff(h_grid) < 0):
            raise ValueError("grid must be sorted and inside (0, 1)")
        return np.array([(h, self(h)) for h in h_grid])


def nu2(series: IncrementSeries, hurst: float, mode: str = "fast") -> float:
    """The Whittle objective at one H, by either evaluation route."""
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (0, 1), got {hurst}")
    return WhittleObjective(series, mode=mode)(hurst)


def objective_profile(series: IncrementSeries, h_grid, mode: str = "fast") -> np.ndarray:
    """nu_n^2 along a sorted grid of H values, as rows (H, nu2)."""
    return WhittleObjective(series, mode=mode).profile(h_grid)
