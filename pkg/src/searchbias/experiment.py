"""Declarative experiment configs, seeded execution, and report writing.

A config is one YAML (or JSON) document describing space, target,
algorithm, ensemble, and run settings. Execution is a pure function of
(config, master seed): reruns produce byte-identical artifacts. Three
files are written per run: ``q_table.csv`` (per-resource success rates),
``bias_report.json`` (bias, divergence, baseline), and ``checks.jsonl``
(one bound-check record per line).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bias_metrics
from .battery import structurally_unbiased
from .errors import InvalidArgumentError, ResourceLimitError
from .resource_models import ResourceEnsemble, SearchAlgorithm, make_fitness_table
from .rng import derive_seed
from .search_core import SearchSpace, TargetFunction, estimate_pbar, per_query_success
from .theorem_harness import (
    ENUM_GUARD,
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
)

_REQUIRED_KEYS = ("n", "target", "algorithm", "ensemble", "budget", "replicates",
                  "q_min", "seed")
_OPTIONAL_KEYS = ("samples", "out_dir", "checks")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description plus its canonical digest."""

    n: int
    target: dict
    algorithm: SearchAlgorithm
    ensemble: dict
    budget: int
    replicates: int
    q_min: tuple[float, ...]
    samples: int
    seed: int
    out_dir: str | None
    checks: str
    digest: str

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise InvalidArgumentError("config root must be a mapping")
        unknown = set(raw) - set(_REQUIRED_KEYS) - set(_OPTIONAL_KEYS)
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
        missing = [key for key in _REQUIRED_KEYS if key not in raw]
        if missing:
            raise InvalidArgumentError(f"missing config keys: {missing}")

        n = int(raw["n"])
        if n < 1:
            raise InvalidArgumentError("n must be >= 1")
        budget = int(raw["budget"])
        replicates = int(raw["replicates"])
        if budget < 1 or replicates < 1:
            raise InvalidArgumentError("budget and replicates must be >= 1")
        q_min = tuple(float(q) for q in raw["q_min"])
        if not q_min or any(not 0.0 < q <= 1.0 for q in q_min):
            raise InvalidArgumentError("q_min values must lie in (0, 1]")
        samples = int(raw.get("samples", 10000))
        if samples < 1000:
            raise InvalidArgumentError("samples must be >= 1000")
        seed = int(raw["seed"])
        if seed < 0:
            raise InvalidArgumentError("seed must be nonnegative")
        checks = raw.get("checks", "auto")
        if checks not in ("auto", "full"):
            raise InvalidArgumentError("checks must be 'auto' or 'full'")

        target = raw["target"]
        if not isinstance(target, dict) or not ({"bits"} <= set(target)
                                                or {"k", "seed"} <= set(target)):
            raise InvalidArgumentError(
                "target must give either 'bits' or 'k' and 'seed'"
            )
        algorithm = SearchAlgorithm.from_json(dict(raw["algorithm"]))
        ensemble = raw["ensemble"]
        if not isinstance(ensemble, dict) or not ({"path"} <= set(ensemble)
                                                  or {"generator", "count", "seed"}
                                                  <= set(ensemble)):
            raise InvalidArgumentError(
                "ensemble must give 'path' or 'generator'/'count'/'seed'"
            )

        canonical = {key: raw[key] for key in _REQUIRED_KEYS}
        canonical["samples"] = samples
        digest = hashlib.sha256(
            json.dumps(canonical, sort_keys=True, separators=(",", ":"),
                       default=str).encode("utf-8")
        ).hexdigest()
        return cls(
            n=n, target=dict(target), algorithm=algorithm,
            ensemble=dict(ensemble), budget=budget, replicates=replicates,
            q_min=q_min, samples=samples, seed=seed,
            out_dir=raw.get("out_dir"), checks=checks, digest=digest,
        )

    def build_target(self) -> TargetFunction:
        if "bits" in self.target:
            t = TargetFunction.from_bits(self.target["bits"])
            if t.n != self.n:
                raise InvalidArgumentError("target bits length must equal n")
            return t
        return TargetFunction.random(self.n, int(self.target["k"]),
                                     int(self.target["seed"]))

    def build_ensemble(self, config_dir: Path) -> ResourceEnsemble:
        if "path" in self.ensemble:
            path = Path(self.ensemble["path"])
            if not path.is_absolute():
                path = config_dir / path
            ensemble = ResourceEnsemble.load(path)
        else:
            space = SearchSpace(self.n)
            count = int(self.ensemble["count"])
            if count < 1:
                raise InvalidArgumentError("ensemble count must be >= 1")
            gen_seed = int(self.ensemble["seed"])
            params = self.ensemble.get("params") or {}
            resources = tuple(
                make_fitness_table(space, self.ensemble["generator"], dict(params),
                                   seed=derive_seed(gen_seed, i))
                for i in range(count)
            )
            weights_spec = self.ensemble.get("weights")
            weights = None if weights_spec in (None, "uniform") else np.asarray(
                weights_spec, dtype=np.float64
            )
            ensemble = ResourceEnsemble(resources, weights)
        if ensemble.n != self.n:
            raise InvalidArgumentError("ensemble table length must equal n")
        return ensemble


@dataclass(frozen=True)
class ResultRecord:
    """Everything one run produced, keyed by the config digest."""

    config_digest: str
    q_rows: tuple[tuple[str, float, float], ...]
    p: float
    bias_set: float
    bias_dist: float
    divergence_deg: float
    checks: tuple[BoundCheckResult, ...]

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.checks)


def _check_battery(config: ExperimentConfig, ensemble, target, pbars,
                   backend) -> list[BoundCheckResult]:
    checks: list[BoundCheckResult] = []
    unbiased = structurally_unbiased(config.algorithm, ensemble)
    enumerable = math.comb(config.n, target.k) <= ENUM_GUARD
    if config.checks == "full" and not enumerable:
        raise ResourceLimitError(
            f"checks: full requires enumerating C({config.n},{target.k}) "
            f"targets, which exceeds the guard {ENUM_GUARD}"
        )

    weights = ensemble.effective_weights()
    mix = weights @ np.stack([ad.pbar.normalized for ad in pbars])

    for q_min in config.q_min:
        checks.append(check_improbability(ensemble, pbars, target, q_min))
        checks.append(
            check_improbability(ensemble, pbars, target, q_min, variant="geometric")
        )
        checks.append(check_famine_resources(ensemble, pbars, target, q_min))
        if unbiased:
            checks.append(
                check_improbability(ensemble, pbars, target, q_min,
                                    variant="unbiased")
            )
            checks.append(
                check_famine_resources(ensemble, pbars, target, q_min,
                                       variant="unbiased")
            )
            if config.algorithm.kind == "genetic":
                checks.append(
                    check_famine_resources(ensemble, pbars, target, q_min,
                                           variant="fitness")
                )
        checks.append(
            check_famine_distributions(ensemble, pbars, target, q_min,
                                       config.samples, derive_seed(config.seed, 71))
        )
        if enumerable:
            checks.append(check_famine_targets(mix, target.k, q_min))

    checks.append(
        check_bias_over_distributions(ensemble, pbars, target, config.samples,
                                      derive_seed(config.seed, 72))
    )
    checks.append(check_simplex_expectation(pbars, weights))
    if enumerable:
        checks.append(check_conservation(mix, target.k))
        checks.append(
            check_conservation_over_distributions(
                ensemble, pbars, target.k, config.samples,
                derive_seed(config.seed, 73),
            )
        )
    if unbiased:
        checks.append(
            check_futility(config.algorithm, ensemble, target, config.budget,
                           config.replicates, derive_seed(config.seed, 74),
                           backend=backend)
        )
    return checks


def run_experiment(config: ExperimentConfig, config_dir: Path,
                   backend: str | None = None) -> ResultRecord:
    """Execute a validated config; deterministic in (config, seed)."""
    space = SearchSpace(config.n)
    target = config.build_target()
    ensemble = config.build_ensemble(config_dir)

    pbars = [
        estimate_pbar(config.algorithm, space, resource, config.budget,
                      config.replicates, derive_seed(config.seed, 1000 + i),
                      backend=backend)
        for i, resource in enumerate(ensemble.resources)
    ]

    idx = target.indices
    q_rows = tuple(
        (
            resource.label,
            per_query_success(target, ad.pbar),
            float(np.sqrt((ad.stderr[idx] ** 2).sum())),
        )
        for resource, ad in zip(ensemble.resources, pbars)
    )
    p = bias_metrics.baseline_p(config.n, target.k)
    bias_set = bias_metrics.bias_set(pbars, target).value
    bias_dist = bias_metrics.bias_dist(
        pbars, ensemble.effective_weights(), target
    ).value
    weights = ensemble.effective_weights()
    mix = weights @ np.stack([ad.pbar.normalized for ad in pbars])
    divergence = bias_metrics.target_divergence(target, mix).theta

    checks = _check_battery(config, ensemble, target, pbars, backend)
    return ResultRecord(
        config_digest=config.digest,
        q_rows=q_rows,
        p=p,
        bias_set=bias_set,
        bias_dist=bias_dist,
        divergence_deg=divergence,
        checks=tuple(checks),
    )


def check_to_json(check: BoundCheckResult) -> dict:
    return {
        "name": check.name,
        "empirical": check.empirical,
        "bound": check.bound,
        "satisfied": check.satisfied,
        "mc_stderr": check.mc_stderr,
        "instance_summary": check.instance_summary,
    }


def write_outputs(record: ResultRecord, out_dir: Path) -> None:
    """Write q_table.csv, bias_report.json, checks.jsonl (LF, deterministic)."""
    out_dir.mkdir(parents=True, exist_ok=True)

    lines = ["resource_label,q,stderr"]
    lines += [f"{label},{q!r},{se!r}" for label, q, se in record.q_rows]
    (out_dir / "q_table.csv").write_bytes(("\n".join(lines) + "\n").encode("utf-8"))

    report = {
        "config_digest": record.config_digest,
        "p": record.p,
        "bias_set": record.bias_set,
        "bias_dist": record.bias_dist,
        "divergence_deg": record.divergence_deg,
        "all_satisfied": record.all_satisfied,
    }
    (out_dir / "bias_report.json").write_bytes(
        (json.dumps(report, indent=2, sort_keys=True) + "\n").encode("utf-8")
    )

    check_lines = [
        json.dumps(check_to_json(c), sort_keys=True) for c in record.checks
    ]
    (out_dir / "checks.jsonl").write_bytes(
        ("\n".join(check_lines) + "\n").encode("utf-8")
    )
