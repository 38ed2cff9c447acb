"""Worst-case risk aggregation under known marginals and unknown dependence.

The library computes worst-case Value-at-Risk (dual optimization over
B_n) and worst-case Expected Shortfall (comonotonic sums) for a vector
of marginal distributions, exposes distribution mixtures and quantile
mixtures through doubly stochastic matrices, and ships the supporting
machinery: majorization and Birkhoff decompositions, stochastic/convex
order checks, a rearrangement-algorithm oracle, p-value merging
constants, and joint-mixability certificates.
"""

__version__ = "0.1.0"

from .applications import (
    JMCertificate,
    PMergeSpec,
    bernoulli_jm,
    mean_length_jm_check,
    p_merge_constant,
    p_merge_margins,
    portfolio_worst_case,
)
from .bounds import (
    BetaVector,
    BoundResult,
    Exactness,
    Method,
    OptimizerOptions,
    dual_objective,
    essential_infimum_worst_case,
    pareto_var_bounds,
    worst_case_es,
    worst_case_var,
)
from .distributions import (
    AffineDistribution,
    Bernoulli,
    Binomial,
    DensityClass,
    Distribution,
    Exponential,
    Gamma,
    LogNormal,
    MarginClass,
    MarginVector,
    Pareto,
    PointMass,
    PowerFunction,
    Uniform,
    Weibull,
    affine,
    comonotonic_sum,
    from_config,
)
from .mixtures import (
    DoublyStochasticMatrix,
    MixtureDistribution,
    QuantileCombination,
    distribution_mixture,
    matrix_from_config,
    matrix_power,
    mixture_of,
    quantile_combination,
    quantile_mixture,
)
from .orders import (
    BirkhoffDecomposition,
    birkhoff,
    convex_order_leq,
    default_grid,
    majorization_matrix,
    majorizes,
    sinkhorn,
    stochastic_order_leq,
)
from .rearrangement import GridKind, QuantileMatrix, discretize_tail, rearrange

__all__ = [
    "AffineDistribution",
    "Bernoulli",
    "BetaVector",
    "Binomial",
    "BirkhoffDecomposition",
    "BoundResult",
    "DensityClass",
    "Distribution",
    "DoublyStochasticMatrix",
    "Exactness",
    "Exponential",
    "Gamma",
    "GridKind",
    "JMCertificate",
    "LogNormal",
    "MarginClass",
    "MarginVector",
    "Method",
    "MixtureDistribution",
    "OptimizerOptions",
    "PMergeSpec",
    "Pareto",
    "PointMass",
    "PowerFunction",
    "QuantileCombination",
    "QuantileMatrix",
    "Uniform",
    "Weibull",
    "affine",
    "bernoulli_jm",
    "birkhoff",
    "comonotonic_sum",
    "convex_order_leq",
    "default_grid",
    "discretize_tail",
    "distribution_mixture",
    "dual_objective",
    "essential_infimum_worst_case",
    "from_config",
    "majorization_matrix",
    "majorizes",
    "matrix_from_config",
    "matrix_power",
    "mean_length_jm_check",
    "mixture_of",
    "p_merge_constant",
    "p_merge_margins",
    "pareto_var_bounds",
    "portfolio_worst_case",
    "quantile_combination",
    "quantile_mixture",
    "rearrange",
    "sinkhorn",
    "stochastic_order_leq",
    "worst_case_es",
    "worst_case_var",
]
