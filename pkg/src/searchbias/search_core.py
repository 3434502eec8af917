"""Search framework core: spaces, targets, runs, and averaged behavior.

A search run drives a distribution-emitting black-box algorithm against
an evaluation oracle: at each step the algorithm emits a probability
distribution over the space (from the oracle's initialization data plus
the points it has already queried, nothing else), one element is sampled
from it, and the (element, evaluation) pair is appended to the history.
Averaging the emitted distributions over steps and over replicate runs
estimates the algorithm's expected per-query behavior on that oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, NamedTuple, Sequence

import numpy as np

from .backends import get_backend
from .errors import DomainMismatchError, InvalidArgumentError
from .rng import seeds_array

if TYPE_CHECKING:
    from .resource_models import InformationResource, SearchAlgorithm

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class SearchSpace:
    """Finite search space; elements are the ids 0..size-1."""

    size: int

    def __post_init__(self):
        if not isinstance(self.size, (int, np.integer)) or self.size < 1:
            raise InvalidArgumentError(f"space size must be a positive integer, got {self.size!r}")


@dataclass(frozen=True)
class TargetFunction:
    """k-hot indicator vector over the search space."""

    bits: np.ndarray
    k: int = field(init=False)

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.int8)
        if bits.ndim != 1 or bits.size < 1:
            raise InvalidArgumentError("target bits must be a nonempty 1-d vector")
        if not np.isin(bits, (0, 1)).all():
            raise InvalidArgumentError("target bits must be 0/1")
        k = int(bits.sum())
        if k < 1:
            raise InvalidArgumentError("target must contain at least one element")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "k", k)

    @property
    def n(self) -> int:
        return self.bits.size

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "TargetFunction":
        return cls(np.asarray(list(bits), dtype=np.int8))

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "TargetFunction":
        bits = np.zeros(n, dtype=np.int8)
        bits[list(indices)] = 1
        return cls(bits)

    @classmethod
    def random(cls, n: int, k: int, seed: int) -> "TargetFunction":
        if not 1 <= k <= n:
            raise InvalidArgumentError(f"need 1 <= k <= n, got k={k}, n={n}")
        rng = np.random.default_rng(seed)
        return cls.from_indices(n, rng.choice(n, size=k, replace=False))


@dataclass(frozen=True)
class ProbabilityVector:
    """Simplex vector: nonnegative entries summing to 1 within 1e-9."""

    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.ndim != 1 or mass.size < 1:
            raise InvalidArgumentError("probability mass must be a nonempty 1-d vector")
        if not np.isfinite(mass).all():
            raise InvalidArgumentError("probability mass must be finite")
        if (mass < 0).any():
            raise InvalidArgumentError("probability mass must be nonnegative")
        total = float(mass.sum())
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise InvalidArgumentError(f"probability mass sums to {total}, not 1")
        object.__setattr__(self, "mass", mass)

    @property
    def n(self) -> int:
        return self.mass.size

    @property
    def normalized(self) -> np.ndarray:
        """Mass rescaled to sum to 1 exactly; use for dot products."""
        return self.mass / self.mass.sum()

    @classmethod
    def uniform(cls, n: int) -> "ProbabilityVector":
        return cls(np.full(n, 1.0 / n))


class HistoryStep(NamedTuple):
    index: int
    element: int
    value: float


@dataclass(frozen=True)
class SearchHistory:
    """Time-indexed record of queried elements and their evaluations."""

    steps: tuple[HistoryStep, ...]

    def __post_init__(self):
        for pos, step in enumerate(self.steps, start=1):
            if step.index != pos:
                raise InvalidArgumentError("history step indices must increase from 1")
            if step.element < 0:
                raise InvalidArgumentError("history element ids must be nonnegative")

    def __len__(self) -> int:
        return len(self.steps)

    def elements(self) -> np.ndarray:
        return np.array([s.element for s in self.steps], dtype=np.int64)

    def evaluations(self) -> np.ndarray:
        return np.array([s.value for s in self.steps], dtype=np.float64)

    @classmethod
    def from_arrays(cls, elements, values) -> "SearchHistory":
        steps = tuple(
            HistoryStep(i + 1, int(w), float(v))
            for i, (w, v) in enumerate(zip(elements, values))
        )
        return cls(steps)


@dataclass(frozen=True)
class SearchRun:
    """One seeded run: emitted distributions (one row per query) + history."""

    distributions: np.ndarray
    history: SearchHistory
    seed: int

    def __post_init__(self):
        if self.distributions.ndim != 2:
            raise InvalidArgumentError("distributions must be a [budget, n] array")
        if self.distributions.shape[0] != len(self.history):
            raise InvalidArgumentError("one distribution per history step required")

    @property
    def budget(self) -> int:
        return self.distributions.shape[0]

    def hit_target(self, t: TargetFunction) -> bool:
        """Diagnostic: whether any queried element landed in the target."""
        return bool(t.bits[self.history.elements()].any())


@dataclass(frozen=True)
class AveragedDistribution:
    """Replicate-mean of per-run time-averaged distributions."""

    pbar: ProbabilityVector
    replicates: int
    stderr: np.ndarray

    def __post_init__(self):
        if self.replicates < 1:
            raise InvalidArgumentError("replicates must be >= 1")
        if self.stderr.shape != self.pbar.mass.shape:
            raise InvalidArgumentError("stderr must match pbar shape")
        if not np.isfinite(self.stderr).all() or (self.stderr < 0).any():
            raise InvalidArgumentError("stderr entries must be finite and nonnegative")


def _check_run_args(alg, space, resource, budget):
    if budget < 1:
        raise InvalidArgumentError(f"budget must be >= 1, got {budget}")
    if resource.table.size != space.size:
        raise DomainMismatchError(
            f"resource covers {resource.table.size} elements, space has {space.size}"
        )


def run_search(alg: "SearchAlgorithm", space: SearchSpace,
               resource: "InformationResource", budget: int, seed: int,
               backend: str | None = None) -> SearchRun:
    """Run one seeded search; identical inputs reproduce identical output.

    The sampled element at each step is drawn from that step's emitted
    distribution using the run's private SplitMix64 stream, so the result
    is a pure function of (alg, space, resource, budget, seed).
    """
    _check_run_args(alg, space, resource, budget)
    kind, params = alg.kernel_spec()
    dists, omegas, evals = get_backend(backend).trace_run(
        kind, resource.table, int(budget), int(seed), params
    )
    history = SearchHistory.from_arrays(omegas, evals)
    return SearchRun(distributions=dists, history=history, seed=int(seed))


def average_run(run: SearchRun) -> ProbabilityVector:
    """Arithmetic mean over the run's emitted distribution sequence.

    Accumulates rows sequentially, matching the batch kernels bit for bit.
    """
    if run.budget < 1:
        raise InvalidArgumentError("run has no distributions to average")
    acc = np.zeros(run.distributions.shape[1])
    for row in run.distributions:
        acc += row
    return ProbabilityVector(acc / run.budget)


def estimate_pbar(alg: "SearchAlgorithm", space: SearchSpace,
                  resource: "InformationResource", budget: int,
                  replicates: int, seed: int,
                  backend: str | None = None) -> AveragedDistribution:
    """Estimate the expected averaged distribution over replicate runs.

    Replicate r uses the derived stream seed ``derive_seed(seed, r)``, so
    the estimate equals the mean of ``average_run(run_search(...))`` over
    those seeds exactly, while running in one batched kernel call.
    """
    _check_run_args(alg, space, resource, budget)
    if replicates < 1:
        raise InvalidArgumentError(f"replicates must be >= 1, got {replicates}")
    kind, params = alg.kernel_spec()
    rows = get_backend(backend).batch_averages(
        kind, resource.table, int(budget), seeds_array(seed, replicates), params
    )
    if (rows == rows[0]).all():
        # zero run-to-run variance: the mean is the row itself, exactly
        pbar = rows[0].copy()
        stderr = np.zeros_like(pbar)
    else:
        pbar = rows.mean(axis=0)
        stderr = rows.std(axis=0, ddof=1) / np.sqrt(replicates)
    return AveragedDistribution(ProbabilityVector(pbar), replicates, stderr)


def per_query_success(t: TargetFunction, pbar: ProbabilityVector) -> float:
    """Probability mass the averaged distribution places on the target."""
    if t.n != pbar.n:
        raise InvalidArgumentError(
            f"target has length {t.n}, distribution has length {pbar.n}"
        )
    value = float(np.dot(t.bits.astype(np.float64), pbar.normalized))
    return min(max(value, 0.0), 1.0)
