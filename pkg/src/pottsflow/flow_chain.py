"""Heat-bath chain on ℤ_q-flows moving along even generators, and its mixing bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .cycles import EvenGenSet
from .flows import FlowState, add_multiple, zero_count_on, zero_flow
from .graph import OrientedMultigraph
from .rng import as_generator


class OutOfRange(ValueError):
    """The fugacity lies outside the range where a mixing bound applies."""

    def __init__(self, message: str, threshold: float):
        super().__init__(message)
        self.threshold = threshold


@dataclass(frozen=True)
class FlowChainConfig:
    x: float
    q: int
    gens: EvenGenSet
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.x <= 1.0:
            raise ValueError(f"x must lie in (0, 1), got {self.x}")
        if self.q < 2:
            raise ValueError(f"q must be at least 2, got {self.q}")
        if self.gens.r == 0:
            raise ValueError("the generating set is empty")

    @property
    def xpow(self) -> np.ndarray:
        """x**k for k = 0..ell, the only weights a heat-bath move needs."""
        ell = max(len(C) for C in self.gens.generators)
        return self.x ** np.arange(ell + 1, dtype=np.float64)


def heat_bath_weights(a: np.ndarray, xpow: np.ndarray) -> np.ndarray:
    """Unnormalized x**(-a_t), rescaled by x**a_max so the largest weight is 1."""
    return xpow[a.max() - a]


def step(f: FlowState, cfg: FlowChainConfig, rng: np.random.Generator) -> FlowState:
    """One move: pick a generator uniformly, then a shift t by heat bath (t = 0 included)."""
    C = cfg.gens.generators[rng.integers(0, cfg.gens.r)]
    w = heat_bath_weights(zero_count_on(f, C), cfg.xpow)
    t = _kernels.pick(w, rng.random())
    return f if t == 0 else add_multiple(f, t, C)


def transition_law(f: FlowState, cfg: FlowChainConfig) -> dict[tuple[int, ...], float]:
    """Exact one-step law from f, keyed by flow value tuples."""
    law: dict[tuple[int, ...], float] = {}
    r = cfg.gens.r
    xpow = cfg.xpow
    for C in cfg.gens.generators:
        w = heat_bath_weights(zero_count_on(f, C), xpow)
        w = w / w.sum()
        for t in range(cfg.q):
            key = (f if t == 0 else add_multiple(f, t, C)).key()
            law[key] = law.get(key, 0.0) + w[t] / r
    return law


@dataclass
class RunStats:
    steps: int = 0
    edge_touches: int = 0


def run(f0: FlowState, cfg: FlowChainConfig, steps: int, rng=None, stats: RunStats | None = None) -> FlowState:
    """Iterate `step` `steps` times (compiled); deterministic given the generator state.

    `rng` defaults to a stream seeded by `cfg.seed`.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if f0.q != cfg.q:
        raise ValueError("flow and chain disagree on q")
    rng = as_generator(cfg.seed if rng is None else rng)
    vals = np.array(f0.values, dtype=np.int64)
    ptr, edges, signs = cfg.gens.csr
    a = np.zeros(cfg.q, dtype=np.int64)
    w = np.zeros(cfg.q, dtype=np.float64)
    support, ops = _kernels.flow_chain_run(
        vals, f0.support_size, ptr, edges, signs, cfg.q, cfg.xpow, steps, rng, a, w
    )
    if stats is not None:
        stats.steps += steps
        stats.edge_touches += int(ops)
    return FlowState(cfg.q, vals, int(support))


def support_histogram(f0: FlowState, cfg: FlowChainConfig, steps: int, rng=None) -> tuple[FlowState, np.ndarray]:
    """Run like `run` and return hist[k] = number of steps that ended with support size k."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rng = as_generator(cfg.seed if rng is None else rng)
    vals = np.array(f0.values, dtype=np.int64)
    ptr, edges, signs = cfg.gens.csr
    hist = np.zeros(len(vals) + 1, dtype=np.int64)
    a = np.zeros(cfg.q, dtype=np.int64)
    w = np.zeros(cfg.q, dtype=np.float64)
    support, _ = _kernels.flow_chain_support_hist(
        vals, f0.support_size, ptr, edges, signs, cfg.q, cfg.xpow, steps, rng, a, w, hist
    )
    return FlowState(cfg.q, vals, int(support)), hist


def threshold(d: int, iota: int) -> float:
    return 1.0 - 2.0 / ((d + 1) * iota)


def mixing_time_bound(cfg: FlowChainConfig, d: int, iota: int, delta: float) -> int | None:
    """Step count after which the chain is delta-close to stationarity, or None.

    None means x does not exceed 1 - 2/((d+1)·iota) and the bound says nothing.
    `d` and `iota` may be any upper bounds on the generating set's parameters.
    """
    if d < 2 or iota < 1:
        raise ValueError(f"the bound needs d >= 2 and iota >= 1, got d={d}, iota={iota}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    xi = cfg.x - threshold(d, iota)
    if xi <= 0 or cfg.x >= 1.0:
        return None
    r = cfg.gens.r
    return math.ceil(4 * r / (d * iota) * math.log(r / delta) / xi)


def bound_params(cfg: FlowChainConfig, d: int | None = None, iota: int | None = None) -> tuple[int, int]:
    """Instance (d, iota) raised to the bound's minimum (2, 1) unless given explicitly."""
    p = cfg.gens.params
    return (max(2, p.d) if d is None else d), (max(1, p.iota) if iota is None else iota)


def sample(
    g: OrientedMultigraph,
    cfg: FlowChainConfig,
    d: int,
    iota: int,
    delta: float,
    rng=None,
    steps: int | None = None,
) -> FlowState:
    """Run from the zero flow for the mixing bound (or an explicit step count)."""
    if steps is None:
        steps = mixing_time_bound(cfg, d, iota, delta)
        if steps is None:
            th = threshold(d, iota)
            raise OutOfRange(f"x = {cfg.x} must exceed 1 - 2/((d+1)·iota) = {th:.6g}", th)
    return run(zero_flow(g, cfg.q), cfg, steps, rng)
