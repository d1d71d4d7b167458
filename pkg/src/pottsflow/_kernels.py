"""numba inner loops for the two chains.

The kernels consume random numbers in exactly the same order as the
pure-Python `step` functions, so for equal generator states they follow the
same trajectory.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def pick(weights, u01):
    """Index i with probability weights[i] / sum(weights), using one uniform u01."""
    total = 0.0
    for i in range(weights.shape[0]):
        total += weights[i]
    u = u01 * total
    acc = 0.0
    last = 0
    for i in range(weights.shape[0]):
        if weights[i] > 0.0:
            last = i
            acc += weights[i]
            if u < acc:
                return i
    return last


@numba.njit(cache=True, nogil=True)
def flow_chain_run(vals, support, ptr, edges, signs, q, xpow, steps, rng, a, w):
    """Run `steps` heat-bath moves in place; returns (support, edge touches)."""
    r = ptr.shape[0] - 1
    ops = 0
    for _ in range(steps):
        c = rng.integers(0, r)
        lo, hi = ptr[c], ptr[c + 1]
        for t in range(q):
            a[t] = 0
        for k in range(lo, hi):
            t = (-signs[k] * vals[edges[k]]) % q
            a[t] += 1
        ops += hi - lo
        amax = 0
        for t in range(q):
            if a[t] > amax:
                amax = a[t]
        for t in range(q):
            w[t] = xpow[amax - a[t]]
        t = pick(w, rng.random())
        if t != 0:
            for k in range(lo, hi):
                e = edges[k]
                old = vals[e]
                new = (old + t * signs[k]) % q
                vals[e] = new
                support += (new != 0) - (old != 0)
            ops += hi - lo
    return support, ops


@numba.njit(cache=True, nogil=True)
def flow_chain_support_hist(vals, support, ptr, edges, signs, q, xpow, steps, rng, a, w, hist):
    """flow_chain_run, also counting the support size after every step into `hist`."""
    ops = 0
    for _ in range(steps):
        support, k = flow_chain_run(vals, support, ptr, edges, signs, q, xpow, 1, rng, a, w)
        ops += k
        hist[support] += 1
    return support, ops


@numba.njit(cache=True, nogil=True)
def joint_chain_run(vals, in_f, ptr, edges, signs, live, q, x, p, steps, rng):
    """Run `steps` joint flow/edge moves in place; returns edge touches."""
    r = ptr.shape[0] - 1
    m = live.shape[0]
    ops = 0
    for _ in range(steps):
        if rng.random() < p:
            c = rng.integers(0, r)
            t = rng.integers(0, q)
            if t == 0:
                continue
            lo, hi = ptr[c], ptr[c + 1]
            inside = True
            for k in range(lo, hi):
                ops += 1
                if not in_f[edges[k]]:
                    inside = False
                    break
            if inside:
                for k in range(lo, hi):
                    e = edges[k]
                    vals[e] = (vals[e] + t * signs[k]) % q
                ops += hi - lo
        else:
            e = live[rng.integers(0, m)]
            ops += 1
            if not in_f[e]:
                if rng.random() < x:
                    in_f[e] = True
            elif vals[e] == 0:
                if rng.random() < 1.0 - x:
                    in_f[e] = False
    return ops


@numba.njit(cache=True, nogil=True)
def flow_ratio_samples(n_edges_total, ptr, edges, signs, q, xpow, steps, n_samples, target, rng):
    """Count independent chain runs (each from the zero flow) ending with value 0 on `target`."""
    vals = np.zeros(n_edges_total, dtype=np.int64)
    a = np.zeros(q, dtype=np.int64)
    w = np.zeros(q, dtype=np.float64)
    zeros = 0
    for _ in range(n_samples):
        vals[:] = 0
        flow_chain_run(vals, 0, ptr, edges, signs, q, xpow, steps, rng, a, w)
        if vals[target] == 0:
            zeros += 1
    return zeros


@numba.njit(cache=True, nogil=True)
def joint_ratio_samples(n_edges_total, ptr, edges, signs, live, q, x, p, steps, n_samples, target, rng):
    """Joint-chain analogue of flow_ratio_samples, each run from (0, E)."""
    vals = np.zeros(n_edges_total, dtype=np.int64)
    in_f = np.zeros(n_edges_total, dtype=np.bool_)
    zeros = 0
    for _ in range(n_samples):
        vals[:] = 0
        in_f[:] = False
        for k in range(live.shape[0]):
            in_f[live[k]] = True
        joint_chain_run(vals, in_f, ptr, edges, signs, live, q, x, p, steps, rng)
        if vals[target] == 0:
            zeros += 1
    return zeros
