"""Approximate Z_flow (and Z_Potts) by telescoping edge-contraction ratios.

Contracting the edges of a spanning forest one at a time turns G into a
bouquet of loops whose flow partition function is (1 + (q-1)x)^{loops}. Each
ratio Z(G_i/e)/Z(G_i) equals 1/x - (1-x)/x · P[f(e) = 0] under the flow
measure of G_i, and that probability is estimated with a Markov chain sampler.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .couplings import x_from_potts
from .cycles import EvenGenSet, GenParams, contract_set
from .flow_chain import FlowChainConfig
from .flow_chain import mixing_time_bound as flow_bound
from .flow_chain import threshold as flow_threshold
from .flow_chain import OutOfRange
from .graph import OrientedMultigraph, components, contract
from .joint_chain import JointChainConfig, compute_p
from .joint_chain import mixing_time_bound as joint_bound
from .joint_chain import threshold as joint_threshold
from .rng import Purpose, stream


@dataclass
class EstimateConfig:
    epsilon: float
    chain: str = "flow"  # "flow" | "joint"
    samples_per_ratio: int | None = None  # default ceil(48 t / eps^2)
    delta_per_sample: float | None = None  # default eps / (16 t)
    seed: int = 0
    median_of: int = 1
    threads: int = 1
    bound_params: GenParams | None = None  # upper bounds used in the mixing-time bounds

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.chain not in ("flow", "joint"):
            raise ValueError(f"unknown chain {self.chain!r}")
        if self.samples_per_ratio is not None and self.samples_per_ratio < 1:
            raise ValueError("samples_per_ratio must be at least 1")
        if self.median_of < 1:
            raise ValueError("median_of must be at least 1")

    def samples(self, t: int) -> int:
        if self.samples_per_ratio is not None:
            return self.samples_per_ratio
        return math.ceil(48 * max(t, 1) / self.epsilon**2)

    def delta(self, t: int) -> float:
        if self.delta_per_sample is not None:
            return self.delta_per_sample
        return self.epsilon / (16 * max(t, 1))


@dataclass
class RatioEstimate:
    edge: int
    y: float  # Y^i, mean of the Y_j
    zero_fraction: float  # mean of the X_j
    samples: int
    steps_per_sample: int


@dataclass
class EstimateReport:
    zeta: float
    model: str
    q: int
    x: float
    epsilon: float
    chain: str
    contraction_sequence: list[int]
    loops: int
    ratios: list[RatioEstimate] = field(default_factory=list)
    total_chain_steps: int = 0
    wall_time: float = 0.0
    replicate_zetas: list[float] = field(default_factory=list)

    def as_dict(self, timings: bool = False) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("wall_time")
        return d


def contraction_sequence(g: OrientedMultigraph) -> list[int]:
    """Lowest live non-loop edge first, until every component is one vertex."""
    seq = []
    while True:
        e = next((e for e in g.live_edges if not g.is_loop(e)), None)
        if e is None:
            return seq
        seq.append(e)
        g = contract(g, e)


def _resolve_bound_params(gens: EvenGenSet, override: GenParams | None) -> GenParams:
    if override is not None:
        return override
    p = gens.params
    return GenParams(d=max(2, p.d), iota=max(1, p.iota), ell=max(3, p.ell), s=max(2, p.s))


def _check_x(q: int, x: float, cfg: EstimateConfig, bp: GenParams) -> None:
    if not 1 / 3 <= x < 1:
        raise ValueError(f"x must lie in [1/3, 1), got {x}")
    th = flow_threshold(bp.d, bp.iota) if cfg.chain == "flow" else joint_threshold(q, bp.ell, bp.s)
    if x <= th:
        raise OutOfRange(f"x = {x} is not above the {cfg.chain} chain threshold {th:.6g}", th)


def estimate_ratio(
    g: OrientedMultigraph,
    gens: EvenGenSet,
    e: int,
    q: int,
    x: float,
    cfg: EstimateConfig,
    t: int,
    rng: np.random.Generator,
    bp: GenParams | None = None,
) -> RatioEstimate:
    """Estimate Z(g/e)/Z(g) from M independent approximate samples on g."""
    if not 1 / 3 <= x <= 1:
        raise ValueError(f"x must lie in [1/3, 1], got {x}")
    if not g.is_live(e) or g.is_loop(e):
        raise ValueError(f"edge {e} must be a live non-loop edge")
    M, delta = cfg.samples(t), cfg.delta(t)
    if x == 1.0:
        return RatioEstimate(e, 1.0, 1.0, M, 0)
    if gens.r == 0:  # the flow space is {0}: every sample vanishes on e
        return RatioEstimate(e, 1.0, 1.0, M, 0)
    bp = _resolve_bound_params(gens, bp or cfg.bound_params)
    ptr, edges, signs = gens.csr
    if cfg.chain == "flow":
        chain_cfg = FlowChainConfig(x, q, gens)
        steps = flow_bound(chain_cfg, bp.d, bp.iota, delta)
        if steps is None:
            raise OutOfRange(f"x = {x} outside the flow chain range", flow_threshold(bp.d, bp.iota))
        zeros = _kernels.flow_ratio_samples(g.m_total, ptr, edges, signs, q, chain_cfg.xpow, steps, M, e, rng)
    else:
        p, _ = compute_p(x, q, bp.ell, bp.s, g.n_edges, gens.r)
        chain_cfg = JointChainConfig(x, q, gens, p)
        steps = joint_bound(g, chain_cfg, bp.ell, bp.s, delta)
        if steps is None:
            raise OutOfRange(f"x = {x} outside the joint chain range", joint_threshold(q, bp.ell, bp.s))
        live = np.array(g.live_edges, dtype=np.int64)
        zeros = _kernels.joint_ratio_samples(g.m_total, ptr, edges, signs, live, q, x, p, steps, M, e, rng)
    frac = zeros / M
    y = 1 / x - (1 - x) / x * frac
    return RatioEstimate(e, float(y), float(frac), M, int(steps))


def _one_estimate(g, gens, q, x, cfg: EstimateConfig, bp, replicate: int):
    seq = contraction_sequence(g)
    t = len(seq)
    graphs, sets = [], []
    gi, si = g, gens
    for e in seq:
        graphs.append(gi)
        sets.append(si)
        si = contract_set(si, gi, e)
        gi = contract(gi, e)

    def work(i):
        rng = stream(cfg.seed, replicate * 1_000_003 + i, Purpose.RATIO)
        return estimate_ratio(graphs[i], sets[i], seq[i], q, x, cfg, t, rng, bp)

    if cfg.threads > 1 and t > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            ratios = list(pool.map(work, range(t)))
    else:
        ratios = [work(i) for i in range(t)]
    loops = g.n_edges - g.n_vertices + components(g)
    log_zeta = loops * math.log1p((q - 1) * x) - sum(math.log(r.y) for r in ratios)
    return math.exp(log_zeta), seq, loops, ratios


def estimate_z_flow(g: OrientedMultigraph, gens: EvenGenSet, q: int, x: float, cfg: EstimateConfig) -> EstimateReport:
    """zeta ≈ Z_flow(g; q, x) within e^{±eps} with probability >= 3/4 (per replicate).

    With `median_of` = k > 1, k independent replicates are run and the median
    reported.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    bp = _resolve_bound_params(gens, cfg.bound_params)
    _check_x(q, x, cfg, bp)
    start = time.perf_counter()
    results = [_one_estimate(g, gens, q, x, cfg, bp, k) for k in range(cfg.median_of)]
    zetas = [r[0] for r in results]
    best = int(np.argsort(zetas)[(len(zetas) - 1) // 2])
    zeta, seq, loops, ratios = results[best]
    total = sum(r.samples * r.steps_per_sample for res in results for r in res[3])
    return EstimateReport(
        zeta=float(np.median(zetas)) if cfg.median_of > 1 else zeta,
        model="flow",
        q=q,
        x=x,
        epsilon=cfg.epsilon,
        chain=cfg.chain,
        contraction_sequence=seq,
        loops=loops,
        ratios=ratios,
        total_chain_steps=total,
        wall_time=time.perf_counter() - start,
        replicate_zetas=zetas,
    )


def potts_from_flow(zeta_flow: float, g: OrientedMultigraph, q: int, x: float) -> float:
    """Z_Potts = q^|V| (1-x)^{-|E|} Z_flow."""
    return math.exp(g.n_vertices * math.log(q) - g.n_edges * math.log1p(-x) + math.log(zeta_flow))


def estimate_z_potts(g: OrientedMultigraph, gens: EvenGenSet, q: int, w: float, cfg: EstimateConfig) -> EstimateReport:
    x = x_from_potts(w, q)
    if x <= 0:
        raise ValueError(f"w = {w} maps to x = {x}, outside [1/3, 1)")
    rep = estimate_z_flow(g, gens, q, x, cfg)
    rep.model = "potts"
    rep.replicate_zetas = [potts_from_flow(z, g, q, x) for z in rep.replicate_zetas]
    rep.zeta = potts_from_flow(rep.zeta, g, q, x)
    return rep
