"""Exact transforms between flow, random-cluster and Potts samples.

Each randomized map comes with its exact law (`*_law`) so pushforwards of
enumerated distributions can be computed without sampling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .flows import FlowState, uniform_flow_on
from .graph import EdgeSubset, OrientedMultigraph, component_labels


@dataclass(frozen=True)
class PottsConfig:
    """Colours in 1..q per vertex id; tombstoned vertex ids hold 0."""

    q: int
    spins: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= s <= self.q for s in self.spins):
            raise ValueError("spin out of range")


def monochromatic_edges(g: OrientedMultigraph, sigma: PottsConfig) -> int:
    """m(sigma): live edges whose endpoints share a colour (loops count)."""
    return sum(sigma.spins[g.tails[e]] == sigma.spins[g.heads[e]] for e in g.live_edges)


# -- parameter maps ---------------------------------------------------------------


@dataclass(frozen=True)
class ParamMap:
    q: int
    x: float

    @property
    def y_rc(self) -> float:
        return rc_param(self.x, self.q)

    @property
    def w_potts(self) -> float:
        return potts_param(self.x, self.q)

    def as_dict(self) -> dict:
        return {"q": self.q, "x": self.x, "y_rc": self.y_rc, "w_potts": self.w_potts}


def rc_param(x, q):
    """y = qx/(1-x)."""
    return q * x / (1 - x)


def potts_param(x, q):
    """w = (1 + (q-1)x)/(1-x); equals y + 1."""
    return (1 + (q - 1) * x) / (1 - x)


def x_from_potts(w, q):
    return (w - 1) / (w + q - 1)


def x_from_rc(y, q):
    return y / (y + q)


# -- samplers ----------------------------------------------------------------------


def flow_to_rc(g: OrientedMultigraph, f: FlowState, x: float, rng: np.random.Generator) -> EdgeSubset:
    """supp(f) plus each other live edge independently with probability x."""
    supp = f.support()
    rest = [e for e in g.live_edges if e not in supp]
    coins = rng.random(len(rest)) < x
    return frozenset(supp | {e for e, c in zip(rest, coins) if c})


def rc_to_flow(g: OrientedMultigraph, F: EdgeSubset, q: int, rng: np.random.Generator) -> FlowState:
    return uniform_flow_on(g, F, q, rng)


def rc_to_potts(g: OrientedMultigraph, F: EdgeSubset, q: int, rng: np.random.Generator) -> PottsConfig:
    """Colour every component of (V, F) independently and uniformly."""
    labels = component_labels(g, F)
    roots = sorted(set(labels.values()))
    colours = dict(zip(roots, (rng.integers(0, q, size=len(roots)) + 1).tolist()))
    spins = [0] * g.n_total
    for v, root in labels.items():
        spins[v] = colours[root]
    return PottsConfig(q, tuple(spins))


def flow_to_potts(g: OrientedMultigraph, f: FlowState, x: float, rng: np.random.Generator) -> PottsConfig:
    return rc_to_potts(g, flow_to_rc(g, f, x, rng), f.q, rng)


# -- exact laws ----------------------------------------------------------------------


def flow_to_rc_law(g: OrientedMultigraph, f: FlowState, x: float) -> dict[EdgeSubset, float]:
    supp = f.support()
    rest = [e for e in g.live_edges if e not in supp]
    law = {}
    for coins in itertools.product((0, 1), repeat=len(rest)):
        k = sum(coins)
        F = frozenset(supp | {e for e, c in zip(rest, coins) if c})
        law[F] = x**k * (1 - x) ** (len(rest) - k)
    return law


def rc_to_potts_law(g: OrientedMultigraph, F: EdgeSubset, q: int) -> dict[tuple[int, ...], float]:
    labels = component_labels(g, F)
    roots = sorted(set(labels.values()))
    pr = float(q) ** -len(roots)
    law = {}
    for cols in itertools.product(range(1, q + 1), repeat=len(roots)):
        colour = dict(zip(roots, cols))
        spins = [0] * g.n_total
        for v, root in labels.items():
            spins[v] = colour[root]
        law[tuple(spins)] = pr
    return law


def rc_to_flow_law(g: OrientedMultigraph, F: EdgeSubset, q: int) -> dict[tuple[int, ...], float]:
    """Uniform law on flows supported inside F, enumerated via free non-forest values."""
    from .oracle import enumerate_flows_within

    flows = enumerate_flows_within(g, q, F)
    pr = 1.0 / len(flows)
    return {tuple(int(v) for v in row): pr for row in flows}
