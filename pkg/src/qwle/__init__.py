"""Quasi-Whittle estimation of (H, sigma) for drifted fractional models.

The pieces, bottom up: ``spectral`` holds the normalized spectral
density and its information functionals, ``toeplitz`` the covariance
and weight operators, ``whittle`` the objective nu^2(H), ``estimator``
the minimizer and its limit-law machinery, ``simulate`` the exact path
sampler, ``mc`` the Monte Carlo harness, and ``cli`` the command line.
"""

from .estimator import (
    CovarianceSummary,
    EstimateResult,
    EstimatorConfig,
    OptimizerDiagnostics,
    RateCondition,
    RateMatrix,
    RateMatrixReport,
    asymptotic_cov,
    canonical_rate_matrix,
    check_rate_matrix,
    diagonal_rate_matrix,
    estimate,
)
from .mc import McReport, run_mc
from .simulate import (
    EmbeddingError,
    EmbeddingFallbackWarning,
    ModelSpec,
    path_levels,
    replication_seed,
    sample_fgn,
    sample_path,
)
from .spectral import (
    InformationQuantities,
    QuadratureError,
    SpectralModel,
    density_normalization,
    dlog_geometric_mean,
    dlog_normalized_density,
    dlog_spectral_density,
    fgn_autocovariance,
    geometric_mean_density,
    information,
    normalized_density,
    spectral_constant,
    spectral_density,
    whittle_kernel,
)
from .toeplitz import (
    KERNELS,
    RateFit,
    ToeplitzOperator,
    build,
    frobenius_deficit,
    ones_quadratic_rates,
    quad_form,
    trace_product,
)
from .whittle import (
    IncrementSeries,
    Periodogram,
    WhittleObjective,
    nu2,
    objective_profile,
    periodogram,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CovarianceSummary",
    "EmbeddingError",
    "EmbeddingFallbackWarning",
    "EstimateResult",
    "EstimatorConfig",
    "IncrementSeries",
    "InformationQuantities",
    "KERNELS",
    "McReport",
    "ModelSpec",
    "OptimizerDiagnostics",
    "Periodogram",
    "QuadratureError",
    "RateCondition",
    "RateFit",
    "RateMatrix",
    "RateMatrixReport",
    "SpectralModel",
    "ToeplitzOperator",
    "WhittleObjective",
    "asymptotic_cov",
    "build",
    "canonical_rate_matrix",
    "check_rate_matrix",
    "density_normalization",
    "diagonal_rate_matrix",
    "dlog_geometric_mean",
    "dlog_normalized_density",
    "dlog_spectral_density",
    "estimate",
    "fgn_autocovariance",
    "frobenius_deficit",
    "geometric_mean_density",
    "information",
    "normalized_density",
    "nu2",
    "objective_profile",
    "ones_quadratic_rates",
    "path_levels",
    "periodogram",
    "quad_form",
    "replication_seed",
    "run_mc",
    "sample_fgn",
    "sample_path",
    "spectral_constant",
    "spectral_density",
    "trace_product",
    "whittle_kernel",
]
