"""Even generating sets of the flow space: construction checks, parameters, contraction."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .graph import GraphError, OrientedMultigraph, fundamental_cycles


class NotAFlowError(ValueError):
    """A generator violates the conservation law (or is not an even subgraph)."""


class SignedEvenSet:
    """Sparse signed indicator vector chi_C: edge id -> ±1, sorted by edge id."""

    __slots__ = ("edges", "signs")

    def __init__(self, entries: Mapping[int, int] | Iterable[tuple[int, int]]):
        items = dict(entries.items() if isinstance(entries, Mapping) else entries)
        pairs = sorted((int(e), int(s)) for e, s in items.items() if s != 0)
        for e, s in pairs:
            if s not in (1, -1):
                raise ValueError(f"sign of edge {e} must be ±1, got {s}")
        self.edges: tuple[int, ...] = tuple(e for e, _ in pairs)
        self.signs: tuple[int, ...] = tuple(s for _, s in pairs)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(zip(self.edges, self.signs))

    def __eq__(self, other) -> bool:
        return isinstance(other, SignedEvenSet) and (self.edges, self.signs) == (other.edges, other.signs)

    def __hash__(self) -> int:
        return hash((self.edges, self.signs))

    def __repr__(self) -> str:
        body = " ".join(f"{e}{'+' if s > 0 else '-'}" for e, s in self)
        return f"SignedEvenSet({body})"

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.edges, self.signs))

    def dropped(self, e: int) -> "SignedEvenSet":
        return SignedEvenSet((a, s) for a, s in self if a != e)


def flow_defect(g: OrientedMultigraph, values: Mapping[int, int]) -> dict[int, int]:
    """Net inflow (head minus tail contributions) over ℤ at every vertex touched by `values`."""
    net: dict[int, int] = {}
    for e, val in values.items():
        t, h = g.tails[e], g.heads[e]
        net[h] = net.get(h, 0) + val
        net[t] = net.get(t, 0) - val
    return net


def check_generator(g: OrientedMultigraph, C: SignedEvenSet) -> None:
    for e in C.edges:
        if not g.is_live(e):
            raise NotAFlowError(f"{C!r} uses edge {e}, which is not live")
    bad = {v: d for v, d in flow_defect(g, C.as_dict()).items() if d}
    if bad:
        raise NotAFlowError(f"{C!r} violates conservation at vertices {sorted(bad)}")
    degree: dict[int, int] = {}
    for e in C.edges:
        degree[g.tails[e]] = degree.get(g.tails[e], 0) + 1
        degree[g.heads[e]] = degree.get(g.heads[e], 0) + 1
    odd = [v for v, d in degree.items() if d % 2]
    if odd:  # unreachable for ±1 flows, kept as a guard on the invariant
        raise NotAFlowError(f"{C!r} has odd degree at {odd}")


class GenParams(NamedTuple):
    d: int
    iota: int
    ell: int
    s: int


@dataclass(frozen=True, eq=False)
class EvenGenSet:
    generators: tuple[SignedEvenSet, ...]
    m_total: int

    def __post_init__(self):
        for C in self.generators:
            if C.edges and C.edges[-1] >= self.m_total:
                raise ValueError(f"{C!r} references an edge beyond {self.m_total - 1}")

    @property
    def r(self) -> int:
        return len(self.generators)

    @cached_property
    def edge_index(self) -> dict[int, tuple[int, ...]]:
        """Inverted index: edge id -> ids of generators containing it."""
        idx: dict[int, list[int]] = {}
        for i, C in enumerate(self.generators):
            for e in C.edges:
                idx.setdefault(e, []).append(i)
        return {e: tuple(v) for e, v in idx.items()}

    @cached_property
    def params(self) -> GenParams:
        return params(self)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(ptr, edges, signs) arrays for the numba kernels."""
        ptr = np.zeros(self.r + 1, dtype=np.int64)
        for i, C in enumerate(self.generators):
            ptr[i + 1] = ptr[i] + len(C)
        edges = np.fromiter((e for C in self.generators for e in C.edges), dtype=np.int64, count=ptr[-1])
        signs = np.fromiter((s for C in self.generators for s in C.signs), dtype=np.int64, count=ptr[-1])
        for a in (ptr, edges, signs):
            a.setflags(write=False)
        return ptr, edges, signs


def make_gen_set(g: OrientedMultigraph, gens: Iterable[SignedEvenSet | Mapping[int, int]], check: bool = True) -> EvenGenSet:
    out = tuple(C if isinstance(C, SignedEvenSet) else SignedEvenSet(C) for C in gens)
    if check:
        for C in out:
            check_generator(g, C)
    return EvenGenSet(out, g.m_total)


def params(gs: EvenGenSet) -> GenParams:
    """(d, iota, ell, s) of a generating set; d = iota = 0 when there are no pairs."""
    gens = gs.generators
    idx = gs.edge_index
    d = iota = 0
    for i, C in enumerate(gens):
        overlap: dict[int, int] = {}
        for e in C.edges:
            for j in idx[e]:
                if j != i:
                    overlap[j] = overlap.get(j, 0) + 1
        d = max(d, len(overlap))
        if overlap:
            iota = max(iota, max(overlap.values()))
    ell = max((len(C) for C in gens), default=0)
    s = max((len(v) for v in idx.values()), default=0)
    return GenParams(d, iota, ell, s)


# -- Z-linear span membership ---------------------------------------------------


def _echelon(rows: list[dict[int, int]]) -> list[tuple[int, dict[int, int]]]:
    """Integer row echelon form (Hermite-style, unimodular row operations).

    Returns (pivot column, row) pairs in increasing pivot order; the row lattice
    is unchanged.
    """
    active = [dict(r) for r in rows if r]
    cols = sorted({c for r in active for c in r})
    pivots = []
    for c in cols:
        holders = [r for r in active if r.get(c, 0)]
        if not holders:
            continue
        others = [r for r in active if not r.get(c, 0)]
        while len(holders) > 1:
            holders.sort(key=lambda r: abs(r[c]))
            piv = holders[0]
            nxt = [piv]
            for r in holders[1:]:
                k = r[c] // piv[c]
                _axpy(r, -k, piv)
                if r.get(c, 0):
                    nxt.append(r)
                elif r:
                    others.append(r)
            holders = nxt
        piv = holders[0]
        if piv[c] < 0:
            for k in piv:
                piv[k] = -piv[k]
        pivots.append((c, piv))
        active = others
    return pivots


def _axpy(row: dict[int, int], k: int, other: dict[int, int]) -> None:
    if k == 0:
        return
    for col, val in other.items():
        nv = row.get(col, 0) + k * val
        if nv:
            row[col] = nv
        else:
            row.pop(col, None)


def _in_lattice(pivots: list[tuple[int, dict[int, int]]], target: Mapping[int, int]) -> bool:
    v = {c: x for c, x in target.items() if x}
    for c, row in pivots:
        a = v.get(c, 0)
        if a:
            k, rem = divmod(a, row[c])
            if rem:
                return False
            _axpy(v, -k, row)
    return not v


def verify_generates(gs: EvenGenSet, g: OrientedMultigraph, q: int | None = None) -> bool:
    """True iff `gs` generates the ℤ-flows of `g`, hence the ℤ_q-flows for every q.

    Each fundamental cycle of the DFS spanning forest must lie in the integer
    row lattice of the generators. `q` is accepted for interface symmetry; the
    integer check implies every modulus.
    """
    if q is not None and q < 1:
        raise ValueError("q must be positive")
    for C in gs.generators:
        check_generator(g, C)
    pivots = _echelon([C.as_dict() for C in gs.generators])
    return all(_in_lattice(pivots, cyc) for cyc in fundamental_cycles(g))


def contract_set(gs: EvenGenSet, g: OrientedMultigraph, e: int) -> EvenGenSet:
    """C/e for every generator; `g` is the host graph before contracting `e`."""
    if not g.is_live(e):
        raise GraphError(f"edge {e} is not live")
    if g.is_loop(e):
        raise GraphError(f"cannot contract loop {e}")
    return EvenGenSet(tuple(C.dropped(e) for C in gs.generators), gs.m_total)


# -- text format ------------------------------------------------------------------


def parse_gens(text: str, g: OrientedMultigraph, check: bool = True) -> EvenGenSet:
    """Parse "r" then r lines "k e1 s1 ... ek sk" with s in {+,-}."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 1:
        raise ValueError("generating-set header must be 'r'")
    r = int(lines[0][0])
    if len(lines) - 1 != r:
        raise ValueError(f"header declares {r} generators, found {len(lines) - 1}")
    gens = []
    for row in lines[1:]:
        k = int(row[0])
        if len(row) != 1 + 2 * k:
            raise ValueError(f"generator line declares {k} edges but has {len(row) - 1} fields")
        entries = {}
        for i in range(k):
            e, sgn = int(row[1 + 2 * i]), row[2 + 2 * i]
            if sgn not in "+-" or len(sgn) != 1:
                raise ValueError(f"bad sign {sgn!r}")
            entries[e] = 1 if sgn == "+" else -1
        gens.append(SignedEvenSet(entries))
    return make_gen_set(g, gens, check=check)


def format_gens(gs: EvenGenSet) -> str:
    lines = [str(gs.r)]
    for C in gs.generators:
        body = " ".join(f"{e} {'+' if s > 0 else '-'}" for e, s in C)
        lines.append(f"{len(C)} {body}".rstrip())
    return "\n".join(lines) + "\n"
