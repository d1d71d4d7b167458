"""Grid duality between the flow chain and Potts Glauber dynamics, and exact TV curves.

On the (L+1) × (L+1) grid G the L² faces are in bijection with the vertices
of the L × L grid H. A colouring sigma of H maps to the flow
phi(sigma) = sum_i sigma(v_i) · chi_{C_i} (mod q), faces taken row-major and
oriented counterclockwise. An edge shared by two faces then carries
±(sigma_i - sigma_j) and an outer edge carries ±sigma_i, so the outer face
acts as a frozen neighbour of colour q (≡ 0). The heat-bath weight of giving
face v the colour i is x^{#non-zero edges of C_v}, which is proportional to
(1/x)^{m(i)} with m(i) counting agreeing neighbours, frozen ones included.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import lattices, oracle
from ._kernels import pick
from .couplings import PottsConfig
from .cycles import EvenGenSet
from .flow_chain import FlowChainConfig, transition_law
from .flows import FlowState
from .graph import OrientedMultigraph


def glauber_law(
    sigma: PottsConfig, g: OrientedMultigraph, v: int, w: float, frozen: dict[int, list[int]] | None = None
) -> np.ndarray:
    """Conditional law of the colour of v (index i-1 for colour i): proportional to w^{m(i)}.

    `frozen[v]` lists colours of extra fixed neighbours of v.
    """
    q = sigma.q
    counts = np.zeros(q, dtype=np.int64)
    for e in g.incidence[v]:
        a, b = g.tails[e], g.heads[e]
        if a == b:
            continue  # a loop agrees with every colour
        u = b if a == v else a
        counts[sigma.spins[u] - 1] += 1
    for c in (frozen or {}).get(v, ()):
        counts[c - 1] += 1
    weights = float(w) ** (counts - counts.max()).astype(np.float64)
    return weights / weights.sum()


def potts_glauber_step(
    sigma: PottsConfig, g: OrientedMultigraph, w: float, rng: np.random.Generator, frozen=None
) -> PottsConfig:
    """Pick a live vertex uniformly and resample its colour from the heat-bath law."""
    verts = g.live_vertices
    v = verts[rng.integers(0, len(verts))]
    law = glauber_law(sigma, g, v, w, frozen)
    colour = pick(law, rng.random()) + 1
    spins = list(sigma.spins)
    spins[v] = int(colour)
    return PottsConfig(sigma.q, tuple(spins))


def glauber_matrix(g: OrientedMultigraph, q: int, w: float, frozen=None):
    states = [tuple(int(c) for c in row) for row in oracle.enumerate_colourings(g, q)]
    index = {s: i for i, s in enumerate(states)}
    verts = g.live_vertices
    rows, cols, vals = [], [], []
    for i, s in enumerate(states):
        sigma = PottsConfig(q, s)
        for v in verts:
            law = glauber_law(sigma, g, v, w, frozen)
            for c in range(q):
                nxt = list(s)
                nxt[v] = c + 1
                rows.append(i)
                cols.append(index[tuple(nxt)])
                vals.append(law[c] / len(verts))
    P = sp.csr_matrix((vals, (rows, cols)), shape=(len(states), len(states)))
    P.sum_duplicates()
    return states, P


def outer_face_neighbours(L: int, q: int) -> dict[int, list[int]]:
    """Frozen neighbours of colour q standing for the outer face of the (L+1)-grid."""
    H = lattices.grid(L, L).graph
    return {v: [q] * (4 - len(H.incidence[v])) for v in H.live_vertices}


def phi(sigma: tuple[int, ...], gens: EvenGenSet, m: int, q: int) -> tuple[int, ...]:
    vals = np.zeros(m, dtype=np.int64)
    for colour, C in zip(sigma, gens.generators):
        for e, s in C:
            vals[e] += colour * s
    return tuple(int(v) for v in vals % q)


@dataclass
class DualityReport:
    L: int
    q: int
    x: float
    states: int
    bijective: bool
    max_entry_diff: float

    @property
    def ok(self) -> bool:
        return self.bijective and self.max_entry_diff <= 1e-12


def verify_duality(L: int, q: int, x: float) -> DualityReport:
    """Compare Glauber on the L×L grid with the face flow chain on the (L+1)×(L+1) grid."""
    if q ** (L * L) > 10**4:
        raise oracle.TooLarge(f"{q}^{L * L} states exceed the duality limit")
    if L < 1:
        raise ValueError("L must be at least 1")
    G = lattices.grid(L + 1, L + 1)
    H = lattices.grid(L, L).graph
    cfg = FlowChainConfig(x, q, G.gens)
    states, P = glauber_matrix(H, q, 1.0 / x, outer_face_neighbours(L, q))
    image = [phi(s, G.gens, G.graph.m_total, q) for s in states]
    bijective = len(set(image)) == len(states) == q ** G.graph.cyclomatic_number()
    index = {f: i for i, f in enumerate(image)}
    Q = sp.lil_matrix((len(states), len(states)))
    for i, f in enumerate(image):
        fs = FlowState(q, np.array(f, dtype=np.int64), sum(v != 0 for v in f))
        for key, p in transition_law(fs, cfg).items():
            Q[i, index[key]] += p
    diff = abs(P - Q.tocsr())
    return DualityReport(L, q, x, len(states), bijective, float(diff.max()) if diff.nnz else 0.0)


def tv_curve(
    g: OrientedMultigraph, gens: EvenGenSet, q: int, xs, t_max: int, start: str = "zero"
) -> list[tuple[int, float, float]]:
    """Rows (t, x, TV(mu_t, mu_flow)) of the flow chain.

    start="zero" runs from the zero flow; start="worst" reports the maximum
    over all starting flows.
    """
    if start not in ("zero", "worst"):
        raise ValueError(f"unknown start {start!r}")
    rows = []
    for x in xs:
        chain = oracle.flow_chain_matrix(g, FlowChainConfig(x, q, gens))
        tvs = oracle.tv_decay(chain, t_max) if start == "zero" else oracle.worst_tv_decay(chain, t_max)
        for t, tv in enumerate(tvs):
            rows.append((t, float(x), float(tv)))
    return rows


def tv_curve_csv(rows) -> str:
    lines = ["t,x,tv"] + [f"{t},{x:g},{tv:.12g}" for t, x, tv in rows]
    return "\n".join(lines) + "\n"
