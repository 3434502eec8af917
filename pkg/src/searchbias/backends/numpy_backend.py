"""Pure-numpy simulation kernels, vectorized across replicates.

Every replicate owns a SplitMix64 stream (`states` holds one uint64 per
replicate) and the per-step draw order matches the compiled backend
exactly, so both backends yield identical outputs for identical seeds.
All float reductions that feed results are running cumulative sums, the
same left-to-right order the compiled loops use, and exp goes through
libm scalar calls: numpy's vectorized exp can differ from libm in the
last ulp, which would break bit parity with the compiled loops.
"""

from __future__ import annotations

import math

import numpy as np

from ..rng import next_units, next_words


def _pick_rows(cum: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Per row: first index where cum > x, else the last index."""
    hit = cum > x[:, None]
    idx = hit.argmax(axis=1)
    idx[~hit[:, -1]] = cum.shape[1] - 1
    return idx


def _genotype_width(n: int) -> int:
    width = 1
    while (1 << width) < n:
        width += 1
    return width


def _init_population(states, n, pop_size):
    r = states.shape[0]
    pop = np.empty((r, pop_size), dtype=np.int64)
    for m in range(pop_size):
        ids = (next_units(states) * n).astype(np.int64)
        pop[:, m] = np.minimum(ids, n - 1)
    return pop


def _greedy_distributions(seen, val, epsilon, beta, n):
    any_seen = seen.any(axis=1)
    vmax = np.where(seen, val, -np.inf).max(axis=1)
    vmax = np.where(any_seen, vmax, 0.0)
    args = beta * (val - vmax[:, None])
    w = np.zeros_like(val)
    rows, cols = np.nonzero(seen)
    w[rows, cols] = [math.exp(x) for x in args[rows, cols].tolist()]
    total = np.cumsum(w, axis=1)[:, -1]
    safe = np.where(total > 0.0, total, 1.0)
    dist = epsilon / n + (1.0 - epsilon) * w / safe[:, None]
    return np.where(any_seen[:, None], dist, 1.0 / n)


def _breed(states, pop, seen, val, obs_sum, obs_cnt, n, mut_rate, cross_rate):
    """Advance every replicate's population one generation; in place."""
    r, pop_size = pop.shape
    width = _genotype_width(n)
    mask_bits = np.uint64((1 << width) - 1)
    rows = np.arange(r)

    default = obs_sum / np.maximum(obs_cnt, 1)
    est = np.where(seen, val, default[:, None])
    w = np.take_along_axis(est, pop, axis=1)
    sel = w - w.min(axis=1)[:, None]
    total = np.cumsum(sel, axis=1)[:, -1]
    degenerate = total <= 0.0
    sel = np.where(degenerate[:, None], 1.0, sel)
    total = np.where(degenerate, float(pop_size), total)
    cumsel = np.cumsum(sel, axis=1)

    new_pop = np.empty_like(pop)
    for c in range(pop_size):
        a = _pick_rows(cumsel, next_units(states) * total)
        b = _pick_rows(cumsel, next_units(states) * total)
        gate = next_units(states)
        mask = (next_words(states) & mask_bits).astype(np.int64)
        pa = pop[rows, a]
        pb = pop[rows, b]
        child = np.where(gate < cross_rate, (pa & mask) | (pb & ~mask), pa)
        for bit in range(width):
            flip = next_units(states) < mut_rate
            child = np.where(flip, child ^ (1 << bit), child)
        new_pop[:, c] = child % n
    pop[:] = new_pop


def _population_distributions(pop, n):
    r, pop_size = pop.shape
    counts = np.zeros((r, n))
    np.add.at(counts, (np.arange(r)[:, None], pop), 1.0)
    return counts / pop_size


def _simulate(kind, table, budget, seeds, params, record):
    n = table.shape[0]
    r = seeds.shape[0]
    states = seeds.astype(np.uint64).copy()
    rows = np.arange(r)

    seen = np.zeros((r, n), dtype=bool)
    val = np.zeros((r, n))
    acc = np.zeros((r, n))
    if kind == 2:
        pop = _init_population(states, n, params.pop_size)
        obs_sum = np.zeros(r)
        obs_cnt = np.zeros(r, dtype=np.int64)

    if record:
        dists = np.empty((budget, n))
        omegas = np.empty(budget, dtype=np.int64)
        evals = np.empty(budget)

    for i in range(budget):
        if kind == 0:
            dist = np.full((r, n), 1.0 / n)
        elif kind == 1:
            dist = _greedy_distributions(seen, val, params.epsilon, params.beta, n)
        else:
            _breed(states, pop, seen, val, obs_sum, obs_cnt, n,
                   params.mut_rate, params.cross_rate)
            dist = _population_distributions(pop, n)

        cum = np.cumsum(dist, axis=1)
        omega = _pick_rows(cum, next_units(states))
        v = table[omega]
        seen[rows, omega] = True
        val[rows, omega] = v
        if kind == 2:
            obs_sum += v
            obs_cnt += 1
        acc += dist
        if record:
            dists[i] = dist[0]
            omegas[i] = omega[0]
            evals[i] = v[0]

    avg = acc / budget
    if record:
        return avg, (dists, omegas, evals)
    return avg, None


def batch_averages(kind, table, budget, seeds, params):
    """Per-replicate time-averaged emitted distributions, shape [R, n]."""
    avg, _ = _simulate(kind, table, budget, seeds, params, record=False)
    return avg


def trace_run(kind, table, budget, seed, params):
    """One full run: (per-step distributions, queried ids, evaluations)."""
    seeds = np.array([seed], dtype=np.uint64)
    _, trace = _simulate(kind, table, budget, seeds, params, record=True)
    return trace
