"""searchbias: black-box search simulation and bias-bound verification.

Builds finite search problems (space, k-hot target, evaluation oracle),
runs distribution-emitting algorithms against them, measures the bias of
algorithm/resource configurations toward targets, and numerically checks
the tail bounds, famine bounds, and conservation laws that govern those
quantities.
"""

from .bias_metrics import (
    BiasValue,
    DivergenceAngle,
    baseline_p,
    bias_dist,
    bias_set,
    famine_target_bound,
    geometric_success_bound,
    log2_bound,
    markov_success_bound,
    target_divergence,
)
from .errors import (
    DomainMismatchError,
    InvalidArgumentError,
    PrecisionError,
    ResourceLimitError,
    SearchBiasError,
)
from .resource_models import (
    InformationResource,
    ResourceEnsemble,
    SearchAlgorithm,
    make_classification_ensemble,
    make_fitness_table,
    next_distribution,
)
from .search_core import (
    AveragedDistribution,
    ProbabilityVector,
    SearchHistory,
    SearchRun,
    SearchSpace,
    TargetFunction,
    average_run,
    estimate_pbar,
    per_query_success,
    run_search,
)
from .theorem_harness import (
    BoundCheckResult,
    SimplexSample,
    check_bias_over_distributions,
    check_conservation,
    check_conservation_over_distributions,
    check_famine_distributions,
    check_famine_resources,
    check_famine_targets,
    check_futility,
    check_improbability,
    check_simplex_expectation,
    enumerate_khot,
    sample_uniform_simplex,
    simplex_samples,
)

__version__ = "0.1.0"

__all__ = [
    "AveragedDistribution",
    "BiasValue",
    "BoundCheckResult",
    "DivergenceAngle",
    "DomainMismatchError",
    "InformationResource",
    "InvalidArgumentError",
    "PrecisionError",
    "ProbabilityVector",
    "ResourceEnsemble",
    "ResourceLimitError",
    "SearchAlgorithm",
    "SearchBiasError",
    "SearchHistory",
    "SearchRun",
    "SearchSpace",
    "SimplexSample",
    "TargetFunction",
    "average_run",
    "baseline_p",
    "bias_dist",
    "bias_set",
    "check_bias_over_distributions",
    "check_conservation",
    "check_conservation_over_distributions",
    "check_famine_distributions",
    "check_famine_resources",
    "check_famine_targets",
    "check_futility",
    "check_improbability",
    "check_simplex_expectation",
    "enumerate_khot",
    "estimate_pbar",
    "famine_target_bound",
    "geometric_success_bound",
    "log2_bound",
    "make_classification_ensemble",
    "make_fitness_table",
    "markov_success_bound",
    "next_distribution",
    "per_query_success",
    "run_search",
    "sample_uniform_simplex",
    "simplex_samples",
    "target_divergence",
]
