"""Oriented multigraphs with tombstoned deletion and contraction.

Edge ids are stable: deleting or contracting an edge marks it dead and never
reindexes the others, so a contraction sequence G_0, G_1, ... can refer to the
same edge id in every graph. Vertices merged away by a contraction are
tombstoned in the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

EdgeSubset = frozenset  # set of live edge ids, e.g. F or A in F ⊆ E


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OrientedMultigraph:
    n_total: int
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    edge_alive: tuple[bool, ...]
    vertex_alive: tuple[bool, ...]

    # -- sizes ---------------------------------------------------------------
    @property
    def m_total(self) -> int:
        """Number of edge slots, dead ones included."""
        return len(self.tails)

    @cached_property
    def live_edges(self) -> tuple[int, ...]:
        return tuple(e for e, a in enumerate(self.edge_alive) if a)

    @cached_property
    def live_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, a in enumerate(self.vertex_alive) if a)

    @property
    def n_vertices(self) -> int:
        return len(self.live_vertices)

    @property
    def n_edges(self) -> int:
        return len(self.live_edges)

    def endpoints(self, e: int) -> tuple[int, int]:
        return self.tails[e], self.heads[e]

    def is_loop(self, e: int) -> bool:
        return self.tails[e] == self.heads[e]

    def is_live(self, e: int) -> bool:
        return 0 <= e < self.m_total and self.edge_alive[e]

    @cached_property
    def incidence(self) -> dict[int, tuple[int, ...]]:
        """Live vertex -> live incident edge ids in increasing order (loops once)."""
        inc: dict[int, list[int]] = {v: [] for v in self.live_vertices}
        for e in self.live_edges:
            u, v = self.tails[e], self.heads[e]
            inc[u].append(e)
            if v != u:
                inc[v].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def tails_array(self) -> np.ndarray:
        a = np.array(self.tails, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def heads_array(self) -> np.ndarray:
        a = np.array(self.heads, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def alive_array(self) -> np.ndarray:
        a = np.array(self.edge_alive, dtype=bool)
        a.setflags(write=False)
        return a

    def cyclomatic_number(self) -> int:
        """|E| - |V| + c(G): the dimension of the flow space."""
        return self.n_edges - self.n_vertices + components(self)

    def __repr__(self) -> str:
        return f"OrientedMultigraph(n={self.n_vertices}, m={self.n_edges}, slots={self.m_total})"


def from_edge_list(n: int, pairs: Iterable[tuple[int, int]]) -> OrientedMultigraph:
    """Build a graph on vertices 0..n-1 with edges oriented tail -> head."""
    if n < 0:
        raise GraphError(f"negative vertex count {n}")
    tails, heads = [], []
    for u, v in pairs:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has a vertex outside 0..{n - 1}")
        tails.append(u)
        heads.append(v)
    return OrientedMultigraph(
        n_total=n,
        tails=tuple(tails),
        heads=tuple(heads),
        edge_alive=(True,) * len(tails),
        vertex_alive=(True,) * n,
    )


def _require_live(g: OrientedMultigraph, e: int) -> None:
    if not g.is_live(e):
        raise GraphError(f"edge {e} is not a live edge")


def delete(g: OrientedMultigraph, e: int) -> OrientedMultigraph:
    _require_live(g, e)
    alive = list(g.edge_alive)
    alive[e] = False
    return OrientedMultigraph(g.n_total, g.tails, g.heads, tuple(alive), g.vertex_alive)


def contract(g: OrientedMultigraph, e: int) -> OrientedMultigraph:
    """Merge the head of `e` into its tail; parallel edges to `e` become loops."""
    _require_live(g, e)
    u, v = g.endpoints(e)
    if u == v:
        raise GraphError(f"cannot contract loop {e}")
    tails = tuple(u if t == v else t for t in g.tails)
    heads = tuple(u if h == v else h for h in g.heads)
    alive = list(g.edge_alive)
    alive[e] = False
    valive = list(g.vertex_alive)
    valive[v] = False
    return OrientedMultigraph(g.n_total, tails, heads, tuple(alive), tuple(valive))


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def component_labels(g: OrientedMultigraph, edges: Iterable[int] | None = None) -> dict[int, int]:
    """Map each live vertex to a component representative over `edges` (default: all live)."""
    dsu = _DSU(g.n_total)
    for e in g.live_edges if edges is None else edges:
        dsu.union(g.tails[e], g.heads[e])
    return {v: dsu.find(v) for v in g.live_vertices}


def components(g: OrientedMultigraph, edges: Iterable[int] | None = None) -> int:
    """c(V, F): number of connected components of the live vertices over `edges`."""
    return len(set(component_labels(g, edges).values()))


def spanning_forest(g: OrientedMultigraph, edges: Iterable[int] | None = None):
    """Deterministic DFS spanning forest over `edges` (default: all live edges).

    Returns (order, parent_edge, forest_edges): `order` lists vertices in DFS
    discovery order, roots included; `parent_edge[v]` is the tree edge to v's
    parent or -1 for roots. Vertices and incident edges are scanned in
    increasing id order, so the result is reproducible.
    """
    allowed = None if edges is None else set(edges)
    parent_edge = {v: -1 for v in g.live_vertices}
    seen: set[int] = set()
    order: list[int] = []
    forest: list[int] = []
    inc = g.incidence
    for root in g.live_vertices:
        if root in seen:
            continue
        seen.add(root)
        order.append(root)
        stack = [(root, iter(inc[root]))]
        while stack:
            v, it = stack[-1]
            for e in it:
                if allowed is not None and e not in allowed:
                    continue
                a, b = g.tails[e], g.heads[e]
                w = b if a == v else a
                if w in seen:
                    continue
                seen.add(w)
                order.append(w)
                parent_edge[w] = e
                forest.append(e)
                stack.append((w, iter(inc[w])))
                break
            else:
                stack.pop()
    return order, parent_edge, forest


def fundamental_cycles(g: OrientedMultigraph) -> list[dict[int, int]]:
    """Signed fundamental cycle of each non-forest live edge (edge id -> ±1)."""
    order, parent_edge, forest = spanning_forest(g)
    in_forest = set(forest)
    depth: dict[int, int] = {}
    for v in order:
        pe = parent_edge[v]
        depth[v] = 0 if pe < 0 else depth[_other(g, pe, v)] + 1

    cycles = []
    for e in g.live_edges:
        if e in in_forest:
            continue
        # traverse e from tail to head, then return head -> tail through the tree
        cyc = {e: 1}
        a, b = g.heads[e], g.tails[e]  # walk from a back to b
        path_a, path_b = [], []
        while a != b:
            if depth[a] >= depth[b]:
                pe = parent_edge[a]
                nxt = _other(g, pe, a)
                path_a.append((pe, a, nxt))
                a = nxt
            else:
                pe = parent_edge[b]
                nxt = _other(g, pe, b)
                path_b.append((pe, nxt, b))
                b = nxt
        for pe, frm, to in path_a + path_b[::-1]:
            sign = 1 if (g.tails[pe], g.heads[pe]) == (frm, to) else -1
            cyc[pe] = cyc.get(pe, 0) + sign
        cycles.append(cyc)
    return cycles


def _other(g: OrientedMultigraph, e: int, v: int) -> int:
    a, b = g.tails[e], g.heads[e]
    return b if a == v else a


# -- text format ----------------------------------------------------------------


def parse_graph(text: str) -> OrientedMultigraph:
    """Parse "n m" followed by m lines "tail head" (0-based)."""
    tokens = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not tokens or len(tokens[0]) != 2:
        raise GraphError("graph header must be 'n m'")
    n, m = int(tokens[0][0]), int(tokens[0][1])
    body = tokens[1:]
    if len(body) != m:
        raise GraphError(f"header declares {m} edges, found {len(body)}")
    pairs = []
    for row in body:
        if len(row) != 2:
            raise GraphError(f"bad edge line {' '.join(row)!r}")
        pairs.append((int(row[0]), int(row[1])))
    return from_edge_list(n, pairs)


def format_graph(g: OrientedMultigraph) -> str:
    """Serialize live structure, compacting vertex and edge ids."""
    vmap = {v: i for i, v in enumerate(g.live_vertices)}
    lines = [f"{g.n_vertices} {g.n_edges}"]
    lines += [f"{vmap[g.tails[e]]} {vmap[g.heads[e]]}" for e in g.live_edges]
    return "\n".join(lines) + "\n"


def edge_subset(g: OrientedMultigraph, edges: Sequence[int]) -> EdgeSubset:
    F = frozenset(int(e) for e in edges)
    for e in F:
        _require_live(g, e)
    return F
