"""Built-in instance battery driving the bound checks at desk scale.

Instances pair a built-in algorithm with a generated resource ensemble
and a random target, spanning zero-bias configurations (uniform sampler,
value-blind exploiter, population search on constant fitness) and
genuinely biased ones (softmax exploitation, population search on rugged
tables). The same battery backs the CLI verify command and the
acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .resource_models import (
    InformationResource,
    ResourceEnsemble,
    SearchAlgorithm,
    make_fitness_table,
)
from .rng import derive_seed
from .search_core import SearchSpace, TargetFunction, estimate_pbar
from .theorem_harness import (
    BoundCheckResult,
    check_bias_over_distributions,
    check_conservation,
    check_conservation_over_distributions,
    check_famine_distributions,
    check_famine_resources,
    check_famine_targets,
    check_futility,
    check_improbability,
    check_simplex_expectation,
    sample_uniform_simplex,
    simplex_samples,
)

DEFAULT_Q_MINS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


def structurally_unbiased(alg: SearchAlgorithm, ensemble: ResourceEnsemble) -> bool:
    """True when the configuration provably has zero bias for every target.

    Holds when evaluations cannot influence the emitted distributions
    (uniform kind; exploiter with beta = 0) or when they carry no signal
    and the population dynamics are symmetric over the space (constant
    tables on a power-of-two space, so bit-level variation is closed).
    """
    if alg.kind == "uniform":
        return True
    if alg.kind == "greedy_exploit" and alg.beta == 0.0:
        return True
    if alg.kind == "genetic":
        n = ensemble.n
        power_of_two = n & (n - 1) == 0
        constant = all(
            np.ptp(resource.table) == 0.0 for resource in ensemble.resources
        )
        return power_of_two and constant
    return False


@dataclass(frozen=True)
class BatteryInstance:
    """One (algorithm, ensemble, target) configuration plus run settings."""

    name: str
    space: SearchSpace
    target: TargetFunction
    alg: SearchAlgorithm
    ensemble: ResourceEnsemble
    budget: int
    replicates: int
    seed: int

    @property
    def unbiased(self) -> bool:
        return structurally_unbiased(self.alg, self.ensemble)


_TEMPLATES = (
    ("uniform", SearchAlgorithm.uniform(), "iid_uniform", {}, 16, 4, False),
    ("uniform-needle", SearchAlgorithm.uniform(), "needle", {"k": 2}, 16, 4, True),
    ("blind-explore", SearchAlgorithm.greedy(epsilon=0.2, beta=0.0), "iid_normal", {}, 16, 4, False),
    ("greedy-soft", SearchAlgorithm.greedy(epsilon=0.1, beta=1.0), "iid_uniform", {}, 16, 4, False),
    ("greedy-sharp", SearchAlgorithm.greedy(epsilon=0.3, beta=5.0), "needle", {"k": 3}, 16, 4, True),
    ("greedy-cold", SearchAlgorithm.greedy(epsilon=0.05, beta=5.0), "iid_normal", {}, 16, 4, False),
    ("genetic", SearchAlgorithm.genetic(8, 0.05, 0.7), "iid_uniform", {}, 16, 4, False),
    ("genetic-needle", SearchAlgorithm.genetic(8, 0.1, 0.5), "needle", {"k": 2}, 16, 4, True),
    ("genetic-flat", SearchAlgorithm.genetic(6, 0.1, 0.5), "needle", {"k": 16}, 16, 4, False),
    ("uniform-small", SearchAlgorithm.uniform(), "iid_normal", {}, 8, 2, False),
)


def generate_battery(count: int, seed: int, ensemble_size: int = 8,
                     budget: int = 24, replicates: int = 200) -> list[BatteryInstance]:
    """Deterministically generate `count` battery instances."""
    if count < 1:
        raise InvalidArgumentError("battery count must be >= 1")
    instances = []
    for i in range(count):
        label, alg, generator, params, n, k, weighted = _TEMPLATES[i % len(_TEMPLATES)]
        inst_seed = derive_seed(seed, i)
        space = SearchSpace(n)
        resources = tuple(
            make_fitness_table(space, generator, params,
                               seed=derive_seed(inst_seed, 100 + j))
            for j in range(ensemble_size)
        )
        weights = (
            sample_uniform_simplex(ensemble_size, derive_seed(inst_seed, 7)).weights
            if weighted else None
        )
        instances.append(
            BatteryInstance(
                name=f"{label}-{i:02d}",
                space=space,
                target=TargetFunction.random(n, k, derive_seed(inst_seed, 3)),
                alg=alg,
                ensemble=ResourceEnsemble(resources, weights),
                budget=budget,
                replicates=replicates,
                seed=inst_seed,
            )
        )
    return instances


def instance_pbars(inst: BatteryInstance, backend: str | None = None):
    """Estimated averaged distribution per resource of the instance."""
    return [
        estimate_pbar(inst.alg, inst.space, resource, inst.budget,
                      inst.replicates, derive_seed(inst.seed, 500 + i),
                      backend=backend)
        for i, resource in enumerate(inst.ensemble.resources)
    ]


def instance_checks(inst: BatteryInstance, pbars,
                    q_mins=DEFAULT_Q_MINS) -> list[BoundCheckResult]:
    """Tail/proportion checks for one instance across all thresholds."""
    results = []
    for q_min in q_mins:
        results.append(check_improbability(inst.ensemble, pbars, inst.target, q_min))
        results.append(
            check_improbability(inst.ensemble, pbars, inst.target, q_min,
                                variant="geometric")
        )
        results.append(check_famine_resources(inst.ensemble, pbars, inst.target, q_min))
        if inst.unbiased:
            results.append(
                check_improbability(inst.ensemble, pbars, inst.target, q_min,
                                    variant="unbiased")
            )
            results.append(
                check_famine_resources(inst.ensemble, pbars, inst.target, q_min,
                                       variant="unbiased")
            )
            if inst.alg.kind == "genetic":
                results.append(
                    check_famine_resources(inst.ensemble, pbars, inst.target,
                                           q_min, variant="fitness")
                )
    return results


def run_battery(count: int, seed: int, q_mins=DEFAULT_Q_MINS,
                backend: str | None = None,
                **battery_kwargs) -> list[tuple[str, BoundCheckResult]]:
    """Generate, simulate, and check `count` instances; (name, result) pairs."""
    out = []
    for inst in generate_battery(count, seed, **battery_kwargs):
        pbars = instance_pbars(inst, backend=backend)
        out.extend((inst.name, res) for res in instance_checks(inst, pbars, q_mins))
    return out


def exact_suite(seed: int) -> list[tuple[str, BoundCheckResult]]:
    """Identity and enumeration checks that carry no Monte Carlo error."""
    results = []
    rng = np.random.default_rng(seed)

    for i in range(20):
        n = int(rng.integers(3, 13))
        k = int(rng.integers(1, n + 1))
        vec = sample_uniform_simplex(n, derive_seed(seed, i)).weights
        results.append((f"conservation-{i:02d}", check_conservation(vec, k)))

    for i, (n, k) in enumerate(((10, 2), (12, 3))):
        for j, q_min in enumerate((0.1, 0.3, 0.5)):
            vec = sample_uniform_simplex(n, derive_seed(seed, 40 + 10 * i + j)).weights
            results.append(
                (f"target-famine-n{n}k{k}-q{q_min}", check_famine_targets(vec, k, q_min))
            )

    for i in range(5):
        dim = int(rng.integers(2, 9))
        n = int(rng.integers(3, 10))
        rows = simplex_samples(n, dim, derive_seed(seed, 60 + i))
        weights = sample_uniform_simplex(dim, derive_seed(seed, 80 + i)).weights
        results.append(
            (f"mixture-{i}", check_simplex_expectation(list(rows), weights))
        )

    for i, (n, k) in enumerate(((4, 2), (6, 3), (8, 3))):
        rows = simplex_samples(n, 3, derive_seed(seed, 90 + i))
        ens = ResourceEnsemble(
            tuple(
                InformationResource(f"synthetic-{j}", b"", np.zeros(n))
                for j in range(3)
            )
        )
        results.append(
            (
                f"conservation-over-weightings-n{n}k{k}",
                check_conservation_over_distributions(
                    ens, list(rows), k, 2000, derive_seed(seed, 95 + i)
                ),
            )
        )
    return results


def montecarlo_suite(seed: int, samples: int = 20000, backend: str | None = None,
                     count: int = 10) -> list[tuple[str, BoundCheckResult]]:
    """Simulation-backed checks: tail bounds, baseline identity, measures."""
    results = run_battery(count, seed, q_mins=(0.2, 0.5, 0.8), backend=backend)

    space = SearchSpace(16)
    target = TargetFunction.random(16, 4, derive_seed(seed, 201))
    resources = tuple(
        make_fitness_table(space, "iid_uniform", seed=derive_seed(seed, 300 + i))
        for i in range(8)
    )
    ensemble = ResourceEnsemble(resources)
    results.append(
        (
            "futility-uniform",
            check_futility(SearchAlgorithm.uniform(), ensemble, target,
                           budget=32, replicates=400, seed=derive_seed(seed, 11),
                           backend=backend),
        )
    )
    results.append(
        (
            "futility-blind-explore",
            check_futility(SearchAlgorithm.greedy(epsilon=0.5, beta=0.0), ensemble,
                           target, budget=32, replicates=400,
                           seed=derive_seed(seed, 12), backend=backend),
        )
    )

    two_point = [np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0])]
    t = TargetFunction.from_bits([1, 0, 0])
    ens2 = ResourceEnsemble(
        tuple(InformationResource(f"point-{i}", b"", np.zeros(3)) for i in range(2))
    )
    results.append(
        (
            "distribution-measure-two-point",
            check_famine_distributions(ens2, two_point, t, 0.5, samples,
                                       derive_seed(seed, 21)),
        )
    )
    results.append(
        (
            "bias-mean-two-point",
            check_bias_over_distributions(ens2, two_point, t, samples,
                                          derive_seed(seed, 22)),
        )
    )
    return results
