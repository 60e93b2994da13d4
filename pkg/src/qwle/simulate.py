"""Exact simulation of drifted fractional Brownian motion on [0, 1].

Unit-variance fractional Gaussian noise is drawn by circulant embedding
(Davies-Harte): the autocovariance is wrapped onto a circle of power-of-
two length at least 2n, whose FFT gives the embedding eigenvalues, and
one complex Gaussian vector shaped by their square roots synthesizes a
draw whose covariance is exact to machine precision.  The observed
increments are then

    dx_j = mu / n + sigma * n^(-H) * fgn_j,

which is the constant-drift model in law, with no discretization error.

The noise term is snapped to a dyadic lattice about 2^-46 below its own
scale before the drift is added.  That perturbation is far below the
Monte Carlo noise floor, but it makes the drift addition exact (no
rounding) whenever mu / n is itself a short dyadic, so paired runs that
differ only in mu produce increment vectors whose pairwise differences
are exactly constant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import fgn_autocovariance
from .whittle import IncrementSeries

__all__ = [
    "EmbeddingError",
    "EmbeddingFallbackWarning",
    "ModelSpec",
    "sample_fgn",
    "sample_path",
    "path_levels",
    "replication_seed",
]

CHOLESKY_CAP = 4096
EIGENVALUE_FLOOR = -1e-10


class EmbeddingError(RuntimeError):
    """Circulant embedding produced genuinely negative eigenvalues."""


class EmbeddingFallbackWarning(UserWarning):
    """The sampler fell back to a dense Cholesky factorization."""


@dataclass(frozen=True)
class ModelSpec:
    """Constant-drift model dX = mu dt + sigma dB^H on [0, 1], n steps.

    sigma = 0 is allowed and gives the deterministic pure-drift path.
    """

    hurst: float
    sigma: float = 1.0
    mu: float = 0.0
    xi0: float = 0.0
    n: int = 4096
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        if self.n < 1:
            raise ValueError("n must be positive")
        for name in ("sigma", "mu", "xi0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@lru_cache(maxsize=32)
def _embedding_eigenvalues(hurst: float, m: int) -> np.ndarray | None:
    """Eigenvalues of the circulant wrap of gamma_H on m points, or None.

    None signals eigenvalues below the roundoff floor, in which case the
    caller falls back to a dense factorization.
    """
    head = fgn_autocovariance(hurst, np.arange(m // 2 + 1))
    circ = np.concatenate([head, head[-2:0:-1]])
    eigs = np.fft.rfft(circ).real
    if eigs.min() < EIGENVALUE_FLOOR:
        return None
    eigs = np.clip(eigs, 0.0, None)
    # rfft returns m//2 + 1 bins; mirror back to the full circle
    full = np.concatenate([eigs, eigs[-2:0:-1]])
    full.flags.writeable = False
    return full


@lru_cache(maxsize=8)
def _cholesky_factor(hurst: float, n: int) -> np.ndarray:
    gamma = fgn_autocovariance(hurst, np.arange(n))
    idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    factor = np.linalg.cholesky(gamma[idx])
    factor.flags.writeable = False
    return factor


def sample_fgn(hurst: float, n: int, seed: int) -> np.ndarray:
    """One draw of n unit-variance fGn values, reproducible from the seed."""
    if not 0.0 < hurst < 1.0:
        raise ValueError(f"hurst must lie in (0, 1), got {hurst}")
    if n < 1:
        raise ValueError("n must be positive")
    m = 1 << (2 * n - 1).bit_length()
    eigs = _embedding_eigenvalues(hurst, m)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if eigs is None:
        if n > CHOLESKY_CAP:
            raise EmbeddingError(
                f"circulant embedding is not nonnegative definite for H={hurst}, m={m}"
            )
        warnings.warn(
            f"circulant embedding failed for H={hurst}; using dense Cholesky",
            EmbeddingFallbackWarning,
            stacklevel=2,
        )
        return _cholesky_factor(hurst, n) @ rng.standard_normal(n)
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return np.fft.fft(z * np.sqrt(eigs)).real[:n] / math.sqrt(m)


def _snap_to_lattice(values: np.ndarray, scale: float) -> np.ndarray:
    """Round to the dyadic lattice 2^(floor(log2 scale) - 46).

    Keeps about 47 significant bits of every value near ``scale``, so the
    statistical effect is ~1e-14 relative, while sums with coarser dyadic
    lattice members become exact.
    """
    exponent = math.floor(math.log2(scale)) - 46
    return np.ldexp(np.rint(np.ldexp(values, -exponent)), exponent)


def _raw_increments(spec: ModelSpec) -> np.ndarray:
    drift = spec.mu / spec.n
    if spec.sigma == 0.0:
        return np.full(spec.n, drift)
    scale = spec.sigma * spec.n ** (-spec.hurst)
    noise = _snap_to_lattice(scale * sample_fgn(spec.hurst, spec.n, spec.seed), scale)
    return drift + noise


def sample_path(spec: ModelSpec) -> IncrementSeries:
    """Increments of one path of the model, exact in law."""
    return IncrementSeries(increments=_raw_increments(spec))


def path_levels(spec: ModelSpec) -> np.ndarray:
    """Levels X_0, X_{1/n}, ..., X_1 (n + 1 values, starting at xi0).

    Works for any positive n; the estimation-oriented ``sample_path``
    container is skipped so short display paths are fine here.
    """
    increments = _raw_increments(spec)
    levels = np.empty(spec.n + 1)
    levels[0] = spec.xi0
    np.cumsum(increments, out=levels[1:])
    levels[1:] += spec.xi0
    return levels


def replication_seed(root_seed: int, index: int) -> int:
    """Independent per-replication seed via SeedSequence spawn keys.

    Deterministic in (root_seed, index) and independent of how many
    workers run the replications or in which order.
    """
    seq = np.random.SeedSequence(entropy=root_seed, spawn_key=(index,))
    return int(seq.generate_state(1, np.uint64)[0])
