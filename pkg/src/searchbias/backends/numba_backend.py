"""Compiled simulation kernels: one sequential loop per replicate.

Mirrors numpy_backend operation for operation. Reductions are running
left-to-right sums and the SplitMix64 draw order is identical, so both
backends return the same bits for the same seeds.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_U_M1 = np.uint64(0xBF58476D1CE4E5B9)
_U_M2 = np.uint64(0x94D049BB133111EB)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_TWO_NEG53 = 2.0**-53


@njit(cache=True)
def _next_word(state):
    state = state + _U_GAMMA
    z = state
    z = (z ^ (z >> _U30)) * _U_M1
    z = (z ^ (z >> _U27)) * _U_M2
    return state, z ^ (z >> _U31)


@njit(cache=True)
def _next_unit(state):
    state, word = _next_word(state)
    return state, np.float64(word >> _U11) * _TWO_NEG53


@njit(cache=True)
def _pick(cum, x):
    j = 0
    last = cum.shape[0] - 1
    while j < last and cum[j] <= x:
        j += 1
    return j


@njit(cache=True)
def _run_one(kind, table, budget, seed, epsilon, beta, pop_size, mut_rate,
             cross_rate, avg_out, dists, omegas, evals, record):
    n = table.shape[0]
    state = seed
    seen = np.zeros(n, np.bool_)
    val = np.zeros(n, np.float64)
    dist = np.empty(n, np.float64)
    wbuf = np.empty(n, np.float64)
    cum = np.empty(n, np.float64)

    width = 1
    while (1 << width) < n:
        width += 1
    mask_bits = np.uint64((1 << width) - 1)
    pop = np.empty(pop_size, np.int64)
    new_pop = np.empty(pop_size, np.int64)
    sel = np.empty(pop_size, np.float64)
    cumsel = np.empty(pop_size, np.float64)
    obs_sum = 0.0
    obs_cnt = 0

    if kind == 2:
        for m in range(pop_size):
            state, u = _next_unit(state)
            idx = np.int64(u * n)
            if idx > n - 1:
                idx = n - 1
            pop[m] = idx

    for i in range(budget):
        if kind == 0:
            for j in range(n):
                dist[j] = 1.0 / n
        elif kind == 1:
            any_seen = False
            vmax = -np.inf
            for j in range(n):
                if seen[j]:
                    any_seen = True
                    if val[j] > vmax:
                        vmax = val[j]
            if not any_seen:
                for j in range(n):
                    dist[j] = 1.0 / n
            else:
                total = 0.0
                for j in range(n):
                    if seen[j]:
                        wbuf[j] = np.exp(beta * (val[j] - vmax))
                    else:
                        wbuf[j] = 0.0
                    total += wbuf[j]
                for j in range(n):
                    dist[j] = epsilon / n + (1.0 - epsilon) * wbuf[j] / total
        else:
            # fitness-proportional selection over observed estimates
            if obs_cnt > 0:
                default = obs_sum / obs_cnt
            else:
                default = 0.0
            wmin = np.inf
            for m in range(pop_size):
                g = pop[m]
                e = val[g] if seen[g] else default
                sel[m] = e
                if e < wmin:
                    wmin = e
            total = 0.0
            for m in range(pop_size):
                sel[m] = sel[m] - wmin
                total += sel[m]
            if total <= 0.0:
                for m in range(pop_size):
                    sel[m] = 1.0
                total = float(pop_size)
            c = 0.0
            for m in range(pop_size):
                c += sel[m]
                cumsel[m] = c
            for child_i in range(pop_size):
                state, u1 = _next_unit(state)
                a = _pick(cumsel, u1 * total)
                state, u2 = _next_unit(state)
                b = _pick(cumsel, u2 * total)
                state, gate = _next_unit(state)
                state, word = _next_word(state)
                mask = np.int64(word & mask_bits)
                if gate < cross_rate:
                    child = (pop[a] & mask) | (pop[b] & ~mask)
                else:
                    child = pop[a]
                for bit in range(width):
                    state, ub = _next_unit(state)
                    if ub < mut_rate:
                        child = child ^ (1 << bit)
                new_pop[child_i] = child % n
            for m in range(pop_size):
                pop[m] = new_pop[m]
            for j in range(n):
                dist[j] = 0.0
            for m in range(pop_size):
                dist[pop[m]] += 1.0
            for j in range(n):
                dist[j] /= pop_size

        c = 0.0
        for j in range(n):
            c += dist[j]
            cum[j] = c
        state, u = _next_unit(state)
        omega = _pick(cum, u)
        v = table[omega]
        seen[omega] = True
        val[omega] = v
        if kind == 2:
            obs_sum += v
            obs_cnt += 1
        for j in range(n):
            avg_out[j] += dist[j]
        if record:
            for j in range(n):
                dists[i, j] = dist[j]
            omegas[i] = omega
            evals[i] = v

    for j in range(n):
        avg_out[j] /= budget


@njit(cache=True)
def _batch(kind, table, budget, seeds, epsilon, beta, pop_size, mut_rate,
           cross_rate):
    reps = seeds.shape[0]
    n = table.shape[0]
    out = np.zeros((reps, n))
    dists = np.empty((1, 1))
    omegas = np.empty(1, np.int64)
    evals = np.empty(1)
    for r in range(reps):
        _run_one(kind, table, budget, seeds[r], epsilon, beta, pop_size,
                 mut_rate, cross_rate, out[r], dists, omegas, evals, False)
    return out


@njit(cache=True)
def _trace(kind, table, budget, seed, epsilon, beta, pop_size, mut_rate,
           cross_rate):
    n = table.shape[0]
    avg = np.zeros(n)
    dists = np.empty((budget, n))
    omegas = np.empty(budget, np.int64)
    evals = np.empty(budget)
    _run_one(kind, table, budget, seed, epsilon, beta, pop_size, mut_rate,
             cross_rate, avg, dists, omegas, evals, True)
    return dists, omegas, evals


def batch_averages(kind, table, budget, seeds, params):
    """Per-replicate time-averaged emitted distributions, shape [R, n]."""
    table = np.ascontiguousarray(table, dtype=np.float64)
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    return _batch(kind, table, budget, seeds, float(params.epsilon),
                  float(params.beta), int(params.pop_size),
                  float(params.mut_rate), float(params.cross_rate))


def trace_run(kind, table, budget, seed, params):
    """One full run: (per-step distributions, queried ids, evaluations)."""
    table = np.ascontiguousarray(table, dtype=np.float64)
    return _trace(kind, table, budget, np.uint64(seed), float(params.epsilon),
                  float(params.beta), int(params.pop_size),
                  float(params.mut_rate), float(params.cross_rate))
