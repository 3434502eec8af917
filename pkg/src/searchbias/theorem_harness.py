"""Numerical verification of the bias bounds and conservation laws.

Each check compares an empirically computed quantity against a
closed-form cap (or an identity target) on one concrete instance and
returns a BoundCheckResult. Proportions over finite sets are computed by
full enumeration; measures over the simplex of ensemble weightings use
seeded uniform Monte Carlo with reported standard errors. Inequality
checks accept with one-sided 3-sigma slack; identity checks demand
two-sided agreement, which keeps proved equalities from hiding behind
loose caps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import bias_metrics
from .bias_metrics import baseline_p
from .errors import InvalidArgumentError, ResourceLimitError
from .resource_models import ResourceEnsemble, SearchAlgorithm
from .rng import derive_seed
from .search_core import (
    AveragedDistribution,
    ProbabilityVector,
    SearchSpace,
    TargetFunction,
    estimate_pbar,
    per_query_success,
)

CHECK_TOL = 1e-9
ENUM_GUARD = 10**7
MIN_MC_SAMPLES = 10**3


@dataclass(frozen=True)
class BoundCheckResult:
    """Outcome of one bound or identity verification."""

    name: str
    empirical: float
    bound: float
    satisfied: bool
    mc_stderr: float
    instance_summary: str

    def margin(self) -> float:
        """Slack left under the bound (negative means exceeded)."""
        return self.bound - self.empirical


def one_sided(name, empirical, bound, mc_stderr, summary) -> BoundCheckResult:
    ok = empirical <= bound + 3.0 * mc_stderr + CHECK_TOL
    return BoundCheckResult(name, float(empirical), float(bound), bool(ok),
                            float(mc_stderr), summary)


def two_sided(name, empirical, bound, mc_stderr, summary) -> BoundCheckResult:
    ok = abs(empirical - bound) <= 3.0 * mc_stderr + CHECK_TOL
    return BoundCheckResult(name, float(empirical), float(bound), bool(ok),
                            float(mc_stderr), summary)


@dataclass(frozen=True)
class SimplexSample:
    """One uniform draw from the simplex of ensemble weightings."""

    weights: np.ndarray
    seed: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if (w < 0).any() or abs(float(w.sum()) - 1.0) > 1e-9:
            raise InvalidArgumentError("sample is not a simplex vector")
        object.__setattr__(self, "weights", w)


def sample_uniform_simplex(dim: int, seed: int) -> SimplexSample:
    """Uniform point on the (dim-1)-simplex via exponential normalization."""
    if dim < 1:
        raise InvalidArgumentError("simplex dimension must be >= 1")
    e = np.random.default_rng(seed).standard_exponential(dim)
    return SimplexSample(e / e.sum(), seed)


def simplex_samples(dim: int, count: int, seed: int) -> np.ndarray:
    """[count, dim] matrix of independent uniform simplex points."""
    if dim < 1 or count < 1:
        raise InvalidArgumentError("dim and count must be >= 1")
    e = np.random.default_rng(seed).standard_exponential((count, dim))
    return e / e.sum(axis=1, keepdims=True)


def _comb_guarded(n: int, k: int) -> int:
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"need 1 <= k <= n, got k={k}, n={n}")
    count = math.comb(n, k)
    if count > ENUM_GUARD:
        raise ResourceLimitError(
            f"C({n},{k}) = {count} exceeds the enumeration guard {ENUM_GUARD}"
        )
    return count


def enumerate_khot(n: int, k: int) -> Iterator[TargetFunction]:
    """All k-hot targets, ordered lexicographically by support indices.

    The guard fires eagerly, before the first target is produced.
    """
    _comb_guarded(n, k)

    def generate():
        for combo in itertools.combinations(range(n), k):
            yield TargetFunction.from_indices(n, combo)

    return generate()


def _khot_index_chunks(n: int, k: int, chunk: int = 65536) -> Iterator[np.ndarray]:
    """Support-index matrices [m, k] covering all k-subsets, in order."""
    combos = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            return
        yield np.asarray(block, dtype=np.int64)


def _as_mass(v) -> np.ndarray:
    if isinstance(v, AveragedDistribution):
        return v.pbar.normalized
    if isinstance(v, ProbabilityVector):
        return v.normalized
    return np.asarray(v, dtype=np.float64)


def _success_stats(pbars, t: TargetFunction):
    """Per-resource estimated success rates and their standard errors."""
    qs = np.empty(len(pbars))
    ses = np.zeros(len(pbars))
    idx = t.indices
    for i, pv in enumerate(pbars):
        if isinstance(pv, AveragedDistribution):
            qs[i] = per_query_success(t, pv.pbar)
            ses[i] = float(np.sqrt((pv.stderr[idx] ** 2).sum()))
        else:
            if not isinstance(pv, ProbabilityVector):
                pv = ProbabilityVector(np.asarray(pv, dtype=np.float64))
            qs[i] = per_query_success(t, pv)
    return qs, ses


def _normal_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def _indicator_stderr(qs, ses, weights, q_min) -> float:
    """1-sigma uncertainty of the weighted count of q >= q_min.

    A resource whose estimated rate sits near the threshold can flip the
    indicator; model each flip as Bernoulli with the normal-tail
    probability implied by its standard error.
    """
    total = 0.0
    for q, se, w in zip(qs, ses, weights):
        if se > 0.0:
            phi = _normal_cdf((q - q_min) / se)
            total += (w * w) * phi * (1.0 - phi)
    return math.sqrt(total)


def check_conservation(pbar_mean, k: int) -> BoundCheckResult:
    """Sum of bias over every k-hot target is identically zero.

    Exact enumeration; holds for any simplex vector, which is what makes
    bias a conserved quantity.
    """
    v = _as_mass(pbar_mean)
    n = v.size
    count = _comb_guarded(n, k)
    p = baseline_p(n, k)
    totals = []
    for idx in _khot_index_chunks(n, k):
        totals.append(math.fsum((v[idx].sum(axis=1) - p).tolist()))
    total = math.fsum(totals)
    return two_sided("bias_conservation", total, 0.0, 0.0,
                     f"n={n}, k={k}, targets={count}")


def check_improbability(ensemble: ResourceEnsemble, pbars, t: TargetFunction,
                        q_min: float, variant: str = "general") -> BoundCheckResult:
    """Weighted chance of drawing a resource with success >= q_min.

    Variants: ``general`` caps it by (p + bias)/q_min, ``unbiased`` by
    p/q_min (caller asserts the configuration carries no bias), and
    ``geometric`` by sqrt(k) cos(theta)/q_min.
    """
    if not 0.0 < q_min <= 1.0:
        raise InvalidArgumentError(f"q_min must lie in (0, 1], got {q_min}")
    weights = ensemble.effective_weights()
    if len(pbars) != len(weights):
        raise InvalidArgumentError("one averaged distribution per resource required")
    qs, ses = _success_stats(pbars, t)
    p = baseline_p(t.n, t.k)
    empirical = float(weights[qs >= q_min].sum())
    bias_hat = float(weights @ qs) - p
    se_bias = float(np.sqrt(((weights * ses) ** 2).sum()))

    if variant == "general":
        name = "success_tail_bound"
        bound = bias_metrics.markov_success_bound(p, bias_hat, q_min)
        se_bound = se_bias / q_min
    elif variant == "unbiased":
        name = "success_tail_bound_unbiased"
        bound = p / q_min
        se_bound = 0.0
    elif variant == "geometric":
        name = "success_tail_bound_geometric"
        mix = weights @ np.stack([_as_mass(pv) for pv in pbars])
        theta = bias_metrics.target_divergence(t, mix)
        bound = bias_metrics.geometric_success_bound(t.k, theta, q_min)
        se_bound = se_bias / (float(np.linalg.norm(mix)) * q_min)
    else:
        raise InvalidArgumentError(f"unknown variant {variant!r}")

    mc = math.hypot(se_bound, _indicator_stderr(qs, ses, weights, q_min))
    summary = f"|B|={len(weights)}, n={t.n}, k={t.k}, q_min={q_min}, bias={bias_hat:.4f}"
    return one_sided(name, empirical, bound, mc, summary)


def check_famine_resources(ensemble: ResourceEnsemble, pbars, t: TargetFunction,
                           q_min: float, variant: str = "general") -> BoundCheckResult:
    """Proportion of the resource set with success >= q_min (set semantics).

    Variants: ``general`` caps it by (p + bias)/q_min, ``unbiased`` and
    ``fitness`` by p/q_min (the latter names the fitness-function reading
    for structurally unbiased population-based searches).
    """
    if not 0.0 < q_min <= 1.0:
        raise InvalidArgumentError(f"q_min must lie in (0, 1], got {q_min}")
    size = len(ensemble)
    if len(pbars) != size:
        raise InvalidArgumentError("one averaged distribution per resource required")
    weights = np.full(size, 1.0 / size)
    qs, ses = _success_stats(pbars, t)
    p = baseline_p(t.n, t.k)
    empirical = float((qs >= q_min).sum()) / size
    bias_hat = float(qs.mean()) - p
    se_bias = float(np.sqrt((ses**2).sum())) / size

    if variant == "general":
        name = "favorable_resource_proportion"
        bound = bias_metrics.markov_success_bound(p, bias_hat, q_min)
        se_bound = se_bias / q_min
    elif variant == "unbiased":
        name = "favorable_resource_proportion_unbiased"
        bound = p / q_min
        se_bound = 0.0
    elif variant == "fitness":
        name = "favorable_fitness_proportion"
        bound = p / q_min
        se_bound = 0.0
    else:
        raise InvalidArgumentError(f"unknown variant {variant!r}")

    mc = math.hypot(se_bound, _indicator_stderr(qs, ses, weights, q_min))
    summary = f"|B|={size}, n={t.n}, k={t.k}, q_min={q_min}, bias={bias_hat:.4f}"
    return one_sided(name, empirical, bound, mc, summary)


def check_futility(alg: SearchAlgorithm, ensemble: ResourceEnsemble,
                   t: TargetFunction, budget: int, replicates: int, seed: int,
                   backend: str | None = None) -> BoundCheckResult:
    """Marginalized per-query success of an unbiased configuration equals p.

    Callers assert the configuration is bias-free; this estimates the
    weighted success rate over the ensemble and demands two-sided
    agreement with the uniform baseline.
    """
    space = SearchSpace(ensemble.n)
    weights = ensemble.effective_weights()
    qs = np.empty(len(ensemble))
    ses = np.empty(len(ensemble))
    idx = t.indices
    for i, resource in enumerate(ensemble.resources):
        ad = estimate_pbar(alg, space, resource, budget, replicates,
                           derive_seed(seed, i), backend=backend)
        qs[i] = per_query_success(t, ad.pbar)
        ses[i] = float(np.sqrt((ad.stderr[idx] ** 2).sum()))
    estimate = float(weights @ qs)
    se = float(np.sqrt(((weights * ses) ** 2).sum()))
    p = baseline_p(t.n, t.k)
    summary = (f"alg={alg.kind}, |B|={len(ensemble)}, n={t.n}, k={t.k}, "
               f"budget={budget}, replicates={replicates}")
    return two_sided("unbiased_search_baseline", estimate, p, se, summary)


def check_famine_targets(pbar_mean, k: int, q_min: float) -> BoundCheckResult:
    """Proportion of k-hot targets with bias >= q_min, by full enumeration."""
    if not 0.0 < q_min <= 1.0:
        raise InvalidArgumentError(f"q_min must lie in (0, 1], got {q_min}")
    v = _as_mass(pbar_mean)
    n = v.size
    count = _comb_guarded(n, k)
    p = baseline_p(n, k)
    hits = 0
    for idx in _khot_index_chunks(n, k):
        hits += int(((v[idx].sum(axis=1) - p) >= q_min).sum())
    empirical = hits / count
    tight, _ = bias_metrics.famine_target_bound(p, q_min)
    return one_sided("high_bias_target_proportion", empirical, tight, 0.0,
                     f"n={n}, k={k}, q_min={q_min}, targets={count}")


def _bias_values_over_samples(pbars, t, samples, seed):
    if samples < MIN_MC_SAMPLES:
        raise InvalidArgumentError(f"need at least {MIN_MC_SAMPLES} samples")
    qs, ses = _success_stats(pbars, t)
    p = baseline_p(t.n, t.k)
    dmat = simplex_samples(len(pbars), samples, seed)
    return dmat @ qs - p, qs, ses, p


def check_famine_distributions(ensemble: ResourceEnsemble, pbars,
                               t: TargetFunction, q_min: float, samples: int,
                               seed: int) -> BoundCheckResult:
    """Uniform measure of weightings whose bias reaches q_min.

    Estimated by Monte Carlo over the weighting simplex; capped by
    (p + bias of the unweighted set)/q_min.
    """
    if not 0.0 < q_min <= 1.0:
        raise InvalidArgumentError(f"q_min must lie in (0, 1], got {q_min}")
    del ensemble  # set identity only; the bound uses unweighted bias
    bias_vals, qs, ses, p = _bias_values_over_samples(pbars, t, samples, seed)
    empirical = float((bias_vals >= q_min).mean())
    bias_set_hat = float(qs.mean()) - p
    bound = bias_metrics.markov_success_bound(p, bias_set_hat, q_min)
    se_emp = math.sqrt(empirical * (1.0 - empirical) / samples)
    se_bound = float(np.sqrt((ses**2).sum())) / len(qs) / q_min
    mc = math.hypot(se_emp, se_bound)
    summary = f"|B|={len(qs)}, n={t.n}, k={t.k}, q_min={q_min}, samples={samples}"
    return one_sided("favorable_distribution_measure", empirical, bound, mc, summary)


def check_bias_over_distributions(ensemble: ResourceEnsemble, pbars,
                                  t: TargetFunction, samples: int,
                                  seed: int) -> BoundCheckResult:
    """Mean bias over uniformly drawn weightings equals the set bias."""
    del ensemble
    bias_vals, qs, _, p = _bias_values_over_samples(pbars, t, samples, seed)
    empirical = float(bias_vals.mean())
    target_value = float(qs.mean()) - p
    mc = float(bias_vals.std(ddof=1)) / math.sqrt(samples) if samples > 1 else 0.0
    summary = f"|B|={len(qs)}, n={t.n}, k={t.k}, samples={samples}"
    return two_sided("bias_mean_over_distributions", empirical, target_value,
                     mc, summary)


def check_conservation_over_distributions(ensemble: ResourceEnsemble, pbars,
                                          k: int, samples: int,
                                          seed: int) -> BoundCheckResult:
    """Summed over all k-hot targets, the simplex-mean bias vanishes.

    Shares one sample set across targets, so the per-sample sums cancel
    exactly and the check is tight to rounding rather than to 1/sqrt(N).
    """
    if samples < MIN_MC_SAMPLES:
        raise InvalidArgumentError(f"need at least {MIN_MC_SAMPLES} samples")
    rows = np.stack([_as_mass(pv) for pv in pbars])
    n = rows.shape[1]
    count = _comb_guarded(n, k)
    p = baseline_p(n, k)
    dmat = simplex_samples(rows.shape[0], samples, seed)
    mix_bar = dmat.mean(axis=0) @ rows

    totals = []
    support_count = np.zeros(n)
    for idx in _khot_index_chunks(n, k):
        totals.append(math.fsum((mix_bar[idx].sum(axis=1) - p).tolist()))
        np.add.at(support_count, idx.ravel(), 1.0)
    total = math.fsum(totals)

    per_sample = (dmat @ rows) @ support_count - count * p
    mc = float(per_sample.std(ddof=1)) / math.sqrt(samples) if samples > 1 else 0.0
    summary = f"|B|={rows.shape[0]}, n={n}, k={k}, targets={count}, samples={samples}"
    return two_sided("bias_conservation_over_distributions", total, 0.0, mc, summary)


def check_simplex_expectation(pbars, weights) -> BoundCheckResult:
    """Any weighted mixture of simplex vectors is itself a simplex vector."""
    rows = np.stack([_as_mass(pv) for pv in pbars])
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (rows.shape[0],):
        raise InvalidArgumentError("one weight per distribution required")
    if (weights < 0).any() or abs(float(weights.sum()) - 1.0) > 1e-9:
        raise InvalidArgumentError("weights must form a simplex vector")
    mix = weights @ rows
    deviation = max(abs(float(mix.sum()) - 1.0), max(0.0, -float(mix.min())))
    return one_sided("mixture_simplex_closure", deviation, 0.0, 0.0,
                     f"|B|={rows.shape[0]}, n={rows.shape[1]}")
