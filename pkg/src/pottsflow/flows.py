"""ℤ_q-flows: values, support bookkeeping, flow algebra and uniform sampling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .cycles import SignedEvenSet
from .graph import EdgeSubset, OrientedMultigraph, spanning_forest


@dataclass(frozen=True, eq=False)
class FlowState:
    """A ℤ_q-flow. `values` has one slot per edge id; tombstoned slots hold 0.

    Sign convention: an edge contributes +value at its head and -value at its tail.
    """

    q: int
    values: np.ndarray
    support_size: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be at least 2, got {self.q}")
        self.values.setflags(write=False)

    def support(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.values).tolist())

    def key(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, FlowState) and self.q == other.q and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.q, self.key()))

    def __repr__(self) -> str:
        return f"FlowState(q={self.q}, values={self.key()}, support={self.support_size})"


def from_values(q: int, values: Iterable[int]) -> FlowState:
    vals = np.asarray(list(values), dtype=np.int64) % q
    return FlowState(q, vals, int(np.count_nonzero(vals)))


def zero_flow(g: OrientedMultigraph, q: int) -> FlowState:
    if q < 2:
        raise ValueError(f"q must be at least 2, got {q}")
    return FlowState(q, np.zeros(g.m_total, dtype=np.int64), 0)


def is_flow(g: OrientedMultigraph, f: FlowState) -> bool:
    """Conservation mod q at every live vertex, and zeros on dead edges."""
    vals = f.values
    if np.any(vals[~g.alive_array] != 0) or np.any((vals < 0) | (vals >= f.q)):
        return False
    net = np.zeros(g.n_total, dtype=np.int64)
    live = g.alive_array
    np.add.at(net, g.heads_array[live], vals[live])
    np.subtract.at(net, g.tails_array[live], vals[live])
    return bool(np.all(net % f.q == 0))


def add_multiple(f: FlowState, t: int, C: SignedEvenSet) -> FlowState:
    """f + t·chi_C, touching only the edges of C."""
    q = f.q
    vals = f.values.copy()
    support = f.support_size
    for e, s in C:
        old = int(vals[e])
        new = (old + t * s) % q
        vals[e] = new
        support += (new != 0) - (old != 0)
    return FlowState(q, vals, int(support))


def zero_count_on(f: FlowState, C: SignedEvenSet) -> np.ndarray:
    """a_t = #{e in C : (f + t·chi_C)(e) = 0} for t = 0..q-1.

    Edge e vanishes for exactly one shift, t = -sign(e)·f(e) mod q, so the
    counts sum to |C|.
    """
    q = f.q
    a = np.zeros(q, dtype=np.int64)
    for e, s in C:
        a[(-s * int(f.values[e])) % q] += 1
    return a


def uniform_flow_on(g: OrientedMultigraph, F: EdgeSubset, q: int, rng: np.random.Generator) -> FlowState:
    """Uniform ℤ_q-flow among those supported inside F.

    Non-forest edges of a DFS spanning forest of (V, F) receive independent
    uniform residues; forest edges are then fixed by peeling leaves.
    """
    F = frozenset(F)
    order, parent_edge, forest = spanning_forest(g, sorted(F))
    in_forest = set(forest)
    vals = np.zeros(g.m_total, dtype=np.int64)
    free = [e for e in sorted(F) if e not in in_forest]
    if free:
        vals[free] = rng.integers(0, q, size=len(free))
    complete_forest(g, vals, order, parent_edge, F, q)
    return FlowState(q, vals, int(np.count_nonzero(vals)))


def complete_forest(g, vals, order, parent_edge, F, q) -> None:
    """Fill forest-edge values in place so every vertex conserves flow mod q.

    Vertices are processed in reverse discovery order, so each non-root vertex
    is a leaf of the remaining forest when reached. With q=None the completion
    is carried out over the integers.
    """
    net = {v: 0 for v in g.live_vertices}
    tree_edges = {pe for pe in parent_edge.values() if pe >= 0}
    for e in F:
        if e in tree_edges:
            continue
        net[g.heads[e]] += vals[e]
        net[g.tails[e]] -= vals[e]
    for v in reversed(order):
        pe = parent_edge[v]
        if pe < 0:
            continue
        # choose vals[pe] so that the net inflow at v vanishes
        val = -net[v] if g.heads[pe] == v else net[v]
        if q is not None:
            val %= q
        if g.heads[pe] == v:
            net[g.tails[pe]] -= val
        else:
            net[g.heads[pe]] += val
        vals[pe] = val
        net[v] = 0


def flow_to_json(f: FlowState, g: OrientedMultigraph) -> dict:
    vals = [int(v) if alive else -1 for v, alive in zip(f.values, g.edge_alive)]
    return {"q": f.q, "values": vals}


def flow_from_json(obj: dict) -> FlowState:
    q = int(obj["q"])
    vals = [max(int(v), 0) for v in obj["values"]]
    return from_values(q, vals)
