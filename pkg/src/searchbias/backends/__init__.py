"""Simulation kernel selection.

Two interchangeable kernel implementations exist:

* ``numba_backend`` -- compiled per-run loops (default when numba imports).
* ``numpy_backend``  -- pure numpy, vectorized across replicates.

Both consume one SplitMix64 stream per replicate with an identical draw
protocol, so for the same seeds they return identical results. Selection:
the ``SEARCHBIAS_BACKEND`` environment variable (``numba`` or ``numpy``),
falling back to numba when it is importable and numpy otherwise.

Draw protocol (per replicate stream; kinds: 0 uniform, 1 greedy_exploit,
2 genetic):

* genetic init: one unit draw per population slot.
* each step, genetic breeding: per child, two roulette unit draws, one
  crossover-gate unit draw, one raw mask word, then one unit draw per
  genotype bit for mutation. Draw counts never depend on outcomes.
* each step, all kinds: one unit draw to sample the queried element from
  the emitted distribution (inverse CDF over its running cumulative sum).
"""

from __future__ import annotations

import importlib
import os
from typing import NamedTuple

from ..errors import InvalidArgumentError

ENV_VAR = "SEARCHBIAS_BACKEND"

KIND_CODES = {"uniform": 0, "greedy_exploit": 1, "genetic": 2}


class AlgoParams(NamedTuple):
    """Flat scalar bundle handed to the kernels; unused fields are ignored."""

    epsilon: float = 0.0
    beta: float = 0.0
    pop_size: int = 2
    mut_rate: float = 0.0
    cross_rate: float = 0.0


_cache: dict[str, object] = {}


def _numba_available() -> bool:
    try:
        importlib.import_module("numba")
    except ImportError:
        return False
    return True


def backend_name(name: str | None = None) -> str:
    """Resolve the backend to use: explicit arg > env var > auto."""
    resolved = name or os.environ.get(ENV_VAR, "").strip().lower() or None
    if resolved is None:
        resolved = "numba" if _numba_available() else "numpy"
    if resolved not in ("numba", "numpy"):
        raise InvalidArgumentError(
            f"unknown backend {resolved!r}; expected 'numba' or 'numpy'"
        )
    return resolved


def get_backend(name: str | None = None):
    """Import (once) and return the kernel module for `name`."""
    resolved = backend_name(name)
    if resolved not in _cache:
        _cache[resolved] = importlib.import_module(
            f".{resolved}_backend", package=__name__
        )
    return _cache[resolved]
