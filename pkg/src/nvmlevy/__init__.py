"""Truncated shot-noise simulation of normal variance-mean Levy processes and
linear Levy-driven SDEs, with Gaussian small-jump approximation, convergence
diagnostics and computable distance bounds."""

__version__ = "0.1.0"

from .bounds import (
    BoundCurve,
    ConditionReport,
    NecessityEstimates,
    build_bound_curve,
    condition_report,
    fourth_moment_functional,
    gh_kolmogorov_bound,
    kolmogorov_bound_general,
    necessity_functionals,
    nts_kolmogorov_bound,
)
from .nvm import (
    ConfigError,
    NVMPath,
    NVMSpec,
    ResidualMoments,
    build_nvm_path,
    evaluate_on_grid,
    evaluate_path,
    gaussian_residual_increment,
    residual_moments,
    residual_variance_deficit,
    standardised_residual_samples,
)
from .rng import make_stream, standard_normals
from .sde import LinearSDEModel, SDEPath, matrix_exp, residual_sde_moments, shot_noise_integral, simulate_sde
from .specfun import (
    DomainError,
    NumericError,
    Tolerance,
    UnsupportedOrderError,
    erf,
    erfc,
    hankel_modulus_sq,
    jaeger_integral,
    kummer_phi,
    lower_incomplete_gamma,
    upper_incomplete_gamma,
)
from .stats import KSResult, MomentSummary, ks_one_sample, ks_two_sample, moments, qq_points
from .subordinators import (
    CapabilityError,
    GIGSubordinator,
    GammaSubordinator,
    JumpSeries,
    TemperedStableSubordinator,
)
