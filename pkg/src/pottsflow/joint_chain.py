"""Joint chain on pairs (flow f, edge set F) with supp(f) ⊆ F."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cycles import EvenGenSet
from .flow_chain import OutOfRange, RunStats
from .flows import FlowState, add_multiple, zero_flow
from .graph import EdgeSubset, OrientedMultigraph
from .rng import as_generator


@dataclass(frozen=True, eq=False)
class JointState:
    f: FlowState
    F: EdgeSubset

    def __post_init__(self):
        if not self.f.support() <= self.F:
            raise ValueError("flow support is not contained in F")

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.f.key(), tuple(sorted(self.F))


def threshold(q: int, ell: int, s: int) -> float:
    return 1.0 - q / ((q - 1) * ell * s)


def compute_p(x: float, q: int, ell: int, s: int, m: int, r: int) -> tuple[float, float]:
    """Flow-move probability p and contraction rate alpha balancing both coupling cases.

    Raises OutOfRange unless x > 1 - q/((q-1)·ell·s).
    """
    th = threshold(q, ell, s)
    if not th < x < 1.0:
        raise OutOfRange(f"x = {x} must exceed 1 - q/((q-1)·ell·s) = {th:.6g}", th)
    lead = q * r * ell * (1 - x)
    denom = q * r + (q - 1) * s * m + q * m + lead
    p = (q * r + lead) / denom
    alpha = (q - (q - 1) * ell * s * (1 - x)) / denom
    return p, alpha


@dataclass(frozen=True)
class JointChainConfig:
    x: float
    q: int
    gens: EvenGenSet
    p: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.x < 1.0:
            raise ValueError(f"x must lie in (0, 1), got {self.x}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if self.gens.r == 0:
            raise ValueError("the generating set is empty")

    @classmethod
    def solved(cls, g: OrientedMultigraph, x: float, q: int, gens: EvenGenSet, ell: int, s: int, seed: int = 0):
        """Config with p from compute_p for this graph's m and the set's r."""
        p, _ = compute_p(x, q, ell, s, g.n_edges, gens.r)
        return cls(x, q, gens, p, seed)


def initial_state(g: OrientedMultigraph, q: int) -> JointState:
    return JointState(zero_flow(g, q), frozenset(g.live_edges))


def step(st: JointState, g: OrientedMultigraph, cfg: JointChainConfig, rng: np.random.Generator) -> JointState:
    f, F = st.f, st.F
    if rng.random() < cfg.p:
        C = cfg.gens.generators[rng.integers(0, cfg.gens.r)]
        t = int(rng.integers(0, cfg.q))
        if t != 0 and all(e in F for e in C.edges):
            return JointState(add_multiple(f, t, C), F)
        return st
    live = g.live_edges
    e = live[rng.integers(0, len(live))]
    if e not in F:
        if rng.random() < cfg.x:
            return JointState(f, F | {e})
    elif f.values[e] == 0:
        if rng.random() < 1.0 - cfg.x:
            return JointState(f, F - {e})
    return st


def transition_law(st: JointState, g: OrientedMultigraph, cfg: JointChainConfig) -> dict:
    """Exact one-step law from st; holding mass is whatever no move claims."""
    law: dict = {}

    def put(key, pr):
        law[key] = law.get(key, 0.0) + pr

    f, F = st.f, st.F
    r, q = cfg.gens.r, cfg.q
    for C in cfg.gens.generators:
        inside = all(e in F for e in C.edges)
        for t in range(q):
            nxt = st if (t == 0 or not inside) else JointState(add_multiple(f, t, C), F)
            put(nxt.key(), cfg.p / (q * r))
    live = g.live_edges
    m = len(live)
    for e in live:
        base = (1 - cfg.p) / m
        if e not in F:
            put(JointState(f, F | {e}).key(), base * cfg.x)
            put(st.key(), base * (1 - cfg.x))
        elif f.values[e] == 0:
            put(JointState(f, F - {e}).key(), base * (1 - cfg.x))
            put(st.key(), base * cfg.x)
        else:
            put(st.key(), base)
    return law


def run(st: JointState, g: OrientedMultigraph, cfg: JointChainConfig, steps: int, rng=None, stats: RunStats | None = None) -> JointState:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rng = as_generator(cfg.seed if rng is None else rng)
    vals = np.array(st.f.values, dtype=np.int64)
    in_f = np.zeros(g.m_total, dtype=np.bool_)
    in_f[list(st.F)] = True
    ptr, edges, signs = cfg.gens.csr
    live = np.array(g.live_edges, dtype=np.int64)
    ops = _kernels.joint_chain_run(vals, in_f, ptr, edges, signs, live, cfg.q, cfg.x, cfg.p, steps, rng)
    if stats is not None:
        stats.steps += steps
        stats.edge_touches += int(ops)
    f = FlowState(cfg.q, vals, int(np.count_nonzero(vals)))
    return JointState(f, frozenset(np.flatnonzero(in_f).tolist()))


def mixing_time_bound(g: OrientedMultigraph, cfg: JointChainConfig, ell: int, s: int, delta: float) -> int | None:
    """Step bound for delta-closeness, or None when x <= 1 - q/((q-1)·ell·s)."""
    if ell < 3 or s < 2 or cfg.q < 2:
        raise ValueError(f"the bound needs ell >= 3, s >= 2, q >= 2; got ell={ell}, s={s}, q={cfg.q}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    xi = cfg.x - threshold(cfg.q, ell, s)
    if xi <= 0:
        return None
    m, r = g.n_edges, cfg.gens.r
    return math.ceil(2 * (m + r) / ell * math.log((2 * m + r) / delta) / xi)


def bound_params(cfg: JointChainConfig, ell: int | None = None, s: int | None = None) -> tuple[int, int]:
    p = cfg.gens.params
    return (max(3, p.ell) if ell is None else ell), (max(2, p.s) if s is None else s)


def sample(g, cfg: JointChainConfig, ell: int, s: int, delta: float, rng=None, steps: int | None = None) -> JointState:
    """Run from (0, E) for the mixing bound (or an explicit step count)."""
    if steps is None:
        steps = mixing_time_bound(g, cfg, ell, s, delta)
        if steps is None:
            th = threshold(cfg.q, ell, s)
            raise OutOfRange(f"x = {cfg.x} must exceed 1 - q/((q-1)·ell·s) = {th:.6g}", th)
    return run(initial_state(g, cfg.q), g, cfg, steps, rng)
