"""Concrete information resources and the built-in search algorithms.

An information resource is an oracle with an initialization segment
(``init_info``) and a per-element evaluation table. The built-in
algorithms span the interesting regimes: a uniform sampler (no use of
evaluations at all), an epsilon/softmax exploiter with tunable strength,
and a small genetic algorithm over bit-encoded element ids.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass

import numpy as np

from .backends import AlgoParams, KIND_CODES
from .backends import numpy_backend as _ref_kernels
from .errors import InvalidArgumentError, ResourceLimitError
from .rng import SplitMix64, next_units
from .search_core import (
    ProbabilityVector,
    SearchHistory,
    SearchSpace,
    TargetFunction,
)

ALGORITHM_KINDS = ("uniform", "greedy_exploit", "genetic")

MAX_CLASSIFICATION_INSTANCES = 20


@dataclass(frozen=True)
class InformationResource:
    """Evaluation oracle: init segment plus a full evaluation table."""

    label: str
    init_info: bytes
    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.float64)
        if table.ndim != 1 or table.size < 1:
            raise InvalidArgumentError("resource table must be a nonempty 1-d vector")
        if not np.isfinite(table).all():
            raise InvalidArgumentError("resource table values must be finite")
        object.__setattr__(self, "table", table)

    @property
    def n(self) -> int:
        return self.table.size

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "init_info": base64.b64encode(self.init_info).decode("ascii"),
            "table": self.table.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InformationResource":
        table = np.asarray(obj["table"], dtype=np.float64)
        if table.size != obj["n"]:
            raise InvalidArgumentError("resource JSON: table length does not match n")
        return cls(
            label=obj["label"],
            init_info=base64.b64decode(obj["init_info"]),
            table=table,
        )


@dataclass(frozen=True)
class ResourceEnsemble:
    """Ordered finite set of resources, optionally weighted."""

    resources: tuple[InformationResource, ...]
    weights: np.ndarray | None = None

    def __post_init__(self):
        resources = tuple(self.resources)
        if not resources:
            raise InvalidArgumentError("ensemble must contain at least one resource")
        sizes = {r.n for r in resources}
        if len(sizes) != 1:
            raise InvalidArgumentError("ensemble resources must share one table length")
        object.__setattr__(self, "resources", resources)
        if self.weights is not None:
            weights = np.asarray(self.weights, dtype=np.float64)
            if weights.shape != (len(resources),):
                raise InvalidArgumentError("one weight per resource required")
            if (weights < 0).any() or abs(float(weights.sum()) - 1.0) > 1e-9:
                raise InvalidArgumentError("weights must be a simplex vector")
            object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.resources)

    @property
    def n(self) -> int:
        return self.resources[0].n

    def effective_weights(self) -> np.ndarray:
        if self.weights is not None:
            return self.weights
        return np.full(len(self.resources), 1.0 / len(self.resources))

    def to_json(self) -> dict:
        return {
            "resources": [r.to_json() for r in self.resources],
            "weights": None if self.weights is None else self.weights.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ResourceEnsemble":
        resources = tuple(InformationResource.from_json(r) for r in obj["resources"])
        weights = obj.get("weights")
        return cls(resources, None if weights is None else np.asarray(weights))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ResourceEnsemble":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class SearchAlgorithm:
    """Parameter bundle naming one of the built-in algorithm kinds."""

    kind: str
    epsilon: float = 0.0
    beta: float = 0.0
    population_size: int = 2
    mutation_rate: float = 0.0
    crossover_rate: float = 0.0

    def __post_init__(self):
        if self.kind not in ALGORITHM_KINDS:
            raise InvalidArgumentError(f"unknown algorithm kind {self.kind!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidArgumentError("epsilon must lie in [0, 1]")
        if self.beta < 0.0:
            raise InvalidArgumentError("beta must be nonnegative")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise InvalidArgumentError("mutation rate must lie in [0, 1]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise InvalidArgumentError("crossover rate must lie in [0, 1]")
        if self.kind == "genetic" and self.population_size < 2:
            raise InvalidArgumentError("genetic kind needs population size >= 2")

    @classmethod
    def uniform(cls) -> "SearchAlgorithm":
        return cls(kind="uniform")

    @classmethod
    def greedy(cls, epsilon: float = 0.1, beta: float = 1.0) -> "SearchAlgorithm":
        return cls(kind="greedy_exploit", epsilon=epsilon, beta=beta)

    @classmethod
    def genetic(cls, population_size: int = 8, mutation_rate: float = 0.05,
                crossover_rate: float = 0.7) -> "SearchAlgorithm":
        return cls(kind="genetic", population_size=population_size,
                   mutation_rate=mutation_rate, crossover_rate=crossover_rate)

    def kernel_spec(self) -> tuple[int, AlgoParams]:
        return KIND_CODES[self.kind], AlgoParams(
            epsilon=float(self.epsilon),
            beta=float(self.beta),
            pop_size=int(self.population_size),
            mut_rate=float(self.mutation_rate),
            cross_rate=float(self.crossover_rate),
        )

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "greedy_exploit":
            out["epsilon"] = self.epsilon
            out["beta"] = self.beta
        elif self.kind == "genetic":
            out["population_size"] = self.population_size
            out["mutation_rate"] = self.mutation_rate
            out["crossover_rate"] = self.crossover_rate
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SearchAlgorithm":
        return cls(**obj)


def make_fitness_table(space: SearchSpace, generator: str,
                       params: dict | None = None, *,
                       seed: int) -> InformationResource:
    """Deterministically generate a fitness table over the space.

    Generators: ``iid_uniform`` (values in [0,1)), ``iid_normal``
    (``mean``/``std`` params), ``needle`` (value 1 on ``k`` random
    elements, 0 elsewhere).
    """
    params = dict(params or {})
    n = space.size
    rng = np.random.default_rng(seed)
    if generator == "iid_uniform":
        table = rng.random(n)
        label = f"uniform-{seed}"
    elif generator == "iid_normal":
        mean = float(params.pop("mean", 0.0))
        std = float(params.pop("std", 1.0))
        if std < 0:
            raise InvalidArgumentError("iid_normal std must be nonnegative")
        table = rng.normal(mean, std, size=n)
        label = f"normal-{seed}"
    elif generator == "needle":
        k = int(params.pop("k", 1))
        if not 1 <= k <= n:
            raise InvalidArgumentError(f"needle k must lie in 1..{n}, got {k}")
        table = np.zeros(n)
        table[rng.choice(n, size=k, replace=False)] = 1.0
        label = f"needle{k}-{seed}"
    else:
        raise InvalidArgumentError(f"unknown fitness generator {generator!r}")
    if params:
        raise InvalidArgumentError(f"unused generator params: {sorted(params)}")
    return InformationResource(label=label, init_info=b"", table=table)


def make_classification_ensemble(instances: int, target_error_threshold: float,
                                 datasets: int, seed: int):
    """Binary classification cast as search over all labelings.

    Elements of the space are the 2^instances labelings of the instance
    set (bit j of the element id is the label of instance j). A hidden
    true labeling is drawn; the target marks every labeling whose error
    rate against it does not exceed the threshold. Each resource holds
    per-labeling 0/1 training loss on a random instance subset, with the
    subset and its true labels serialized into ``init_info``.

    Returns (SearchSpace, TargetFunction, ResourceEnsemble).
    """
    if instances < 1 or datasets < 1:
        raise InvalidArgumentError("instances and datasets must be >= 1")
    if instances > MAX_CLASSIFICATION_INSTANCES:
        raise ResourceLimitError(
            f"instances capped at {MAX_CLASSIFICATION_INSTANCES} (space is 2^m)"
        )
    if not 0.0 < target_error_threshold < 1.0:
        raise InvalidArgumentError("target error threshold must lie in (0, 1)")

    m = instances
    n = 1 << m
    rng = np.random.default_rng(seed)
    truth = rng.integers(0, 2, size=m, dtype=np.int8)

    ids = np.arange(n, dtype=np.int64)
    labelings = ((ids[:, None] >> np.arange(m)) & 1).astype(np.int8)
    distance = (labelings != truth).sum(axis=1)
    target = TargetFunction((distance <= target_error_threshold * m).astype(np.int8))

    resources = []
    for d in range(datasets):
        subset = np.flatnonzero(rng.random(m) < 0.5)
        while subset.size == 0:
            subset = np.flatnonzero(rng.random(m) < 0.5)
        loss = (labelings[:, subset] != truth[subset]).mean(axis=1)
        init_info = json.dumps(
            {"instances": subset.tolist(), "labels": truth[subset].tolist()},
            sort_keys=True,
        ).encode("utf-8")
        resources.append(
            InformationResource(label=f"dataset-{d}", init_info=init_info, table=loss)
        )
    return SearchSpace(n), target, ResourceEnsemble(tuple(resources))


def _state_array(rng: SplitMix64) -> np.ndarray:
    return np.array([rng.state], dtype=np.uint64)


def next_distribution(alg: SearchAlgorithm, space: SearchSpace,
                      init_info: bytes, history: SearchHistory,
                      rng_state) -> ProbabilityVector:
    """Distribution the algorithm would emit after the given history.

    ``rng_state`` is a SplitMix64 instance or an integer seed; it only
    matters for the genetic kind, whose population is reconstructed by
    replaying its breeding draws over the history. Given a run's seed and
    an i-step prefix of its history, this returns the distribution the
    run emitted at step i+1.
    """
    del init_info  # built-in algorithms use only queried evaluations
    n = space.size
    elements = history.elements()
    if elements.size and (elements >= n).any():
        raise InvalidArgumentError("history references elements outside the space")

    if alg.kind == "uniform":
        return ProbabilityVector.uniform(n)

    if alg.kind == "greedy_exploit":
        seen = np.zeros((1, n), dtype=bool)
        val = np.zeros((1, n))
        for step in history.steps:
            seen[0, step.element] = True
            val[0, step.element] = step.value
        dist = _ref_kernels._greedy_distributions(seen, val, alg.epsilon, alg.beta, n)
        return ProbabilityVector(dist[0])

    rng = rng_state if isinstance(rng_state, SplitMix64) else SplitMix64(int(rng_state))
    states = _state_array(rng)
    pop = _ref_kernels._init_population(states, n, alg.population_size)
    seen = np.zeros((1, n), dtype=bool)
    val = np.zeros((1, n))
    obs_sum = np.zeros(1)
    obs_cnt = np.zeros(1, dtype=np.int64)
    for step in history.steps:
        _ref_kernels._breed(states, pop, seen, val, obs_sum, obs_cnt, n,
                            alg.mutation_rate, alg.crossover_rate)
        next_units(states)  # skip the run's sampling draw
        seen[0, step.element] = True
        val[0, step.element] = step.value
        obs_sum[0] += step.value
        obs_cnt[0] += 1
    _ref_kernels._breed(states, pop, seen, val, obs_sum, obs_cnt, n,
                        alg.mutation_rate, alg.crossover_rate)
    rng.state = int(states[0])
    return ProbabilityVector(_ref_kernels._population_distributions(pop, n)[0])
