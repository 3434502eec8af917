"""Bias values, target divergence, and closed-form bound right-hand sides.

Bias is average target mass minus the uniform-sampling baseline k/n:
positive means the algorithm concentrates more mass on the target than
blind uniform sampling would, negative means less. The divergence angle
is the geometric reading of the same alignment. Bound helpers return the
raw right-hand sides; values above 1 are legitimate (vacuous) bounds and
are never clamped here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import InvalidArgumentError, PrecisionError
from .search_core import AveragedDistribution, ProbabilityVector, TargetFunction

_RANGE_TOL = 1e-9


@dataclass(frozen=True)
class BiasValue:
    """Bias together with its baseline p = k/n; value lies in [-p, 1-p]."""

    value: float
    p: float

    def __post_init__(self):
        if not -self.p - _RANGE_TOL <= self.value <= 1.0 - self.p + _RANGE_TOL:
            raise InvalidArgumentError(
                f"bias {self.value} outside [-p, 1-p] for p={self.p}"
            )


@dataclass(frozen=True)
class DivergenceAngle:
    """Angle in degrees between a target vector and a distribution."""

    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 180.0:
            raise InvalidArgumentError(f"angle {self.theta} outside [0, 180]")

    @property
    def radians(self) -> float:
        return math.radians(self.theta)


def _masses(pbars) -> np.ndarray:
    """Stack renormalized masses from ProbabilityVector / AveragedDistribution."""
    if len(pbars) == 0:
        raise InvalidArgumentError("need at least one averaged distribution")
    rows = []
    for pv in pbars:
        if isinstance(pv, AveragedDistribution):
            pv = pv.pbar
        if not isinstance(pv, ProbabilityVector):
            pv = ProbabilityVector(np.asarray(pv, dtype=np.float64))
        rows.append(pv.normalized)
    lengths = {r.size for r in rows}
    if len(lengths) != 1:
        raise InvalidArgumentError("averaged distributions differ in length")
    return np.stack(rows)


def baseline_p(n: int, k: int) -> float:
    """Single-query success probability of uniform random sampling."""
    if n < 1 or not 1 <= k <= n:
        raise InvalidArgumentError(f"need 1 <= k <= n, got k={k}, n={n}")
    return k / n


def bias_set(pbars, t: TargetFunction) -> BiasValue:
    """Bias of a finite resource set: mean target mass minus k/n."""
    rows = _masses(pbars)
    if rows.shape[1] != t.n:
        raise InvalidArgumentError("target length does not match distributions")
    p = baseline_p(t.n, t.k)
    tvec = t.bits.astype(np.float64)
    value = float(tvec @ rows.mean(axis=0)) - p
    return BiasValue(value, p)


def bias_dist(pbars, weights, t: TargetFunction) -> BiasValue:
    """Bias of a weighted resource distribution; uniform weights = bias_set."""
    rows = _masses(pbars)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (rows.shape[0],):
        raise InvalidArgumentError("one weight per averaged distribution required")
    if (weights < 0).any() or abs(float(weights.sum()) - 1.0) > 1e-9:
        raise InvalidArgumentError("weights must form a simplex vector")
    if rows.shape[1] != t.n:
        raise InvalidArgumentError("target length does not match distributions")
    p = baseline_p(t.n, t.k)
    tvec = t.bits.astype(np.float64)
    value = float(tvec @ (weights @ rows)) - p
    return BiasValue(value, p)


def target_divergence(t: TargetFunction, v) -> DivergenceAngle:
    """Angle between the target vector and a (nonzero) expected distribution."""
    vec = v.normalized if isinstance(v, ProbabilityVector) else np.asarray(v, dtype=np.float64)
    if vec.shape != (t.n,):
        raise InvalidArgumentError("vector length does not match target")
    norm_sq = float(vec @ vec)
    if norm_sq == 0.0:
        raise InvalidArgumentError("cannot measure divergence against the zero vector")
    # one sqrt of the product keeps perfectly aligned cases at exactly 1
    cos = float(t.bits.astype(np.float64) @ vec) / math.sqrt(t.k * norm_sq)
    cos = min(1.0, max(-1.0, cos))
    return DivergenceAngle(math.degrees(math.acos(cos)))


def _check_qmin(q_min: float) -> None:
    if not 0.0 < q_min <= 1.0:
        raise InvalidArgumentError(f"q_min must lie in (0, 1], got {q_min}")


def markov_success_bound(p: float, bias: float, q_min: float) -> float:
    """Tail bound (p + bias) / q_min on the chance of success >= q_min."""
    _check_qmin(q_min)
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"p must lie in [0, 1], got {p}")
    if not -p - _RANGE_TOL <= bias <= 1.0 - p + _RANGE_TOL:
        raise InvalidArgumentError(f"bias {bias} outside [-p, 1-p]")
    return (p + bias) / q_min


def geometric_success_bound(k: int, theta, q_min: float) -> float:
    """Geometric tail bound sqrt(k) * cos(theta) / q_min."""
    _check_qmin(q_min)
    if k < 1:
        raise InvalidArgumentError("k must be >= 1")
    angle = theta if isinstance(theta, DivergenceAngle) else DivergenceAngle(float(theta))
    return math.sqrt(k) * math.cos(angle.radians) / q_min


def famine_target_bound(p: float, q_min: float) -> tuple[float, float]:
    """(tight, loose) caps on the proportion of high-bias targets."""
    _check_qmin(q_min)
    if not 0.0 < p <= 1.0:
        raise InvalidArgumentError(f"p must lie in (0, 1], got {p}")
    return p / (p + q_min), p / q_min


def log2_bound(log2_n: float, log2_k: float, q_min: float, bias: float = 0.0) -> float:
    """log2 of (k/n + bias) / q_min without materializing n = 2**log2_n.

    With zero bias this is exact in log space. With nonzero bias the value
    is computed in extended precision; scales where k/n + bias cancels to
    a nonpositive value raise PrecisionError.
    """
    _check_qmin(q_min)
    if log2_k > log2_n:
        raise InvalidArgumentError("log2_k must not exceed log2_n")
    if bias == 0.0:
        return log2_k - log2_n - math.log2(q_min)
    if not -1.0 <= bias <= 1.0:
        raise InvalidArgumentError(f"bias {bias} outside [-1, 1]")
    with mpmath.workprec(max(96, int(abs(log2_n)) + 96)):
        p = mpmath.power(2, mpmath.mpf(log2_k) - mpmath.mpf(log2_n))
        value = (p + mpmath.mpf(bias)) / mpmath.mpf(q_min)
        if value <= 0:
            raise PrecisionError(
                "p + bias is nonpositive at this scale; bound has no finite log"
            )
        return float(mpmath.log(value) / mpmath.log(2))


def is_vacuous(bound: float) -> bool:
    """True when an upper bound exceeds 1 and therefore constrains nothing."""
    return bound > 1.0
