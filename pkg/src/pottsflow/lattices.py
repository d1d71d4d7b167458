"""Lattice graphs with their face (elementary square) generating sets."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .cycles import EvenGenSet, GenParams, SignedEvenSet, make_gen_set, verify_generates
from .graph import GraphError, OrientedMultigraph, from_edge_list, parse_graph

# Parameters of the face sets on large enough pieces of each lattice; they upper
# bound the parameters of every finite piece and of every contraction of one.
LATTICE_PARAMS = {
    "grid": GenParams(d=4, iota=1, ell=4, s=2),
    "grid3": GenParams(d=12, iota=1, ell=4, s=4),
    "tri": GenParams(d=3, iota=1, ell=3, s=2),
    "hex": GenParams(d=6, iota=1, ell=6, s=2),
}


@dataclass(frozen=True)
class Lattice:
    kind: str
    graph: OrientedMultigraph
    gens: EvenGenSet

    @property
    def class_params(self) -> GenParams:
        return LATTICE_PARAMS[self.kind]


def _assemble(n, edge_pairs, faces, kind, debug):
    """Keep only edges used by some face, compact vertex ids, sign each face walk."""
    used_edges = set()
    pair_id = {}
    for i, (u, v) in enumerate(edge_pairs):
        pair_id[frozenset((u, v))] = i
    for walk in faces:
        for a, b in zip(walk, walk[1:] + walk[:1]):
            used_edges.add(pair_id[frozenset((a, b))])
    if faces:
        keep = sorted(used_edges)
    else:
        keep = list(range(len(edge_pairs)))
    used_vertices = sorted({x for i in keep for x in edge_pairs[i]} | (set(range(n)) if not faces else set()))
    vmap = {v: k for k, v in enumerate(used_vertices)}
    emap = {old: k for k, old in enumerate(keep)}
    g = from_edge_list(len(used_vertices), [(vmap[edge_pairs[i][0]], vmap[edge_pairs[i][1]]) for i in keep])
    gens = []
    for walk in faces:
        entries = {}
        for a, b in zip(walk, walk[1:] + walk[:1]):
            old = pair_id[frozenset((a, b))]
            tail, _ = edge_pairs[old]
            entries[emap[old]] = 1 if tail == a else -1
        gens.append(SignedEvenSet(entries))
    gs = make_gen_set(g, gens)
    if debug and not verify_generates(gs, g):
        raise AssertionError(f"{kind} faces do not generate the flow space")
    return Lattice(kind, g, gs)


def grid(w: int, h: int, debug: bool = False) -> Lattice:
    """w × h vertex grid; vertex (x, y) has id y*w + x, faces row-major and counterclockwise."""
    if w < 1 or h < 1:
        raise GraphError(f"degenerate grid {w}x{h}")
    vid = lambda x, y: y * w + x
    edges = [(vid(x, y), vid(x + 1, y)) for y in range(h) for x in range(w - 1)]
    edges += [(vid(x, y), vid(x, y + 1)) for y in range(h - 1) for x in range(w)]
    faces = [
        [vid(x, y), vid(x + 1, y), vid(x + 1, y + 1), vid(x, y + 1)]
        for y in range(h - 1)
        for x in range(w - 1)
    ]
    g = from_edge_list(w * h, edges)
    gens = []
    pid = {e: i for i, e in enumerate(edges)}
    for walk in faces:
        entries = {}
        for a, b in zip(walk, walk[1:] + walk[:1]):
            if (a, b) in pid:
                entries[pid[(a, b)]] = 1
            else:
                entries[pid[(b, a)]] = -1
        gens.append(SignedEvenSet(entries))
    gs = make_gen_set(g, gens)
    if debug and not verify_generates(gs, g):
        raise AssertionError("grid faces do not generate the flow space")
    return Lattice("grid", g, gs)


def grid_faces(w: int, h: int, debug: bool = False) -> EvenGenSet:
    if w < 2 or h < 2:
        raise GraphError(f"grid faces need w, h >= 2, got {w}x{h}")
    return grid(w, h, debug).gens


def grid3(w: int, h: int, dd: int, debug: bool = False) -> Lattice:
    """3D grid with one generator per elementary square (a generating set, not a basis)."""
    if min(w, h, dd) < 1:
        raise GraphError(f"degenerate grid {w}x{h}x{dd}")
    vid = lambda x, y, z: (z * h + y) * w + x
    pts = [(x, y, z) for z in range(dd) for y in range(h) for x in range(w)]
    edges = []
    for axis in range(3):
        for x, y, z in pts:
            p = [x, y, z]
            p[axis] += 1
            if p[0] < w and p[1] < h and p[2] < dd:
                edges.append((vid(x, y, z), vid(*p)))
    faces = []
    for a1, a2 in ((0, 1), (0, 2), (1, 2)):
        for x, y, z in pts:
            base = [x, y, z]
            p1 = list(base)
            p1[a1] += 1
            p12 = list(p1)
            p12[a2] += 1
            p2 = list(base)
            p2[a2] += 1
            if max(p12[0] - w, p12[1] - h, p12[2] - dd) < 0:
                faces.append([vid(*base), vid(*p1), vid(*p12), vid(*p2)])
    if not faces:
        return _assemble(w * h * dd, edges, [], "grid3", debug)
    return _assemble(w * h * dd, edges, faces, "grid3", debug)


def cube_squares(w: int, h: int, dd: int, debug: bool = False) -> EvenGenSet:
    if min(w, h, dd) < 2:
        raise GraphError(f"3D grid squares need all sides >= 2, got {w}x{h}x{dd}")
    return grid3(w, h, dd, debug).gens


def tri(w: int, h: int, debug: bool = False) -> Lattice:
    """Triangular lattice: the w × h grid plus the (x, y)-(x+1, y+1) diagonals."""
    if w < 2 or h < 2:
        raise GraphError(f"triangular lattice needs w, h >= 2, got {w}x{h}")
    vid = lambda x, y: y * w + x
    edges = [(vid(x, y), vid(x + 1, y)) for y in range(h) for x in range(w - 1)]
    edges += [(vid(x, y), vid(x, y + 1)) for y in range(h - 1) for x in range(w)]
    edges += [(vid(x, y), vid(x + 1, y + 1)) for y in range(h - 1) for x in range(w - 1)]
    faces = []
    for y in range(h - 1):
        for x in range(w - 1):
            faces.append([vid(x, y), vid(x + 1, y), vid(x + 1, y + 1)])
            faces.append([vid(x, y), vid(x + 1, y + 1), vid(x, y + 1)])
    return _assemble(w * h, edges, faces, "tri", debug)


def tri_faces(w: int, h: int, debug: bool = False) -> EvenGenSet:
    return tri(w, h, debug).gens


def hexagonal(w: int, h: int, debug: bool = False) -> Lattice:
    """Honeycomb (brick-wall drawing) with w × h hexagons."""
    if w < 1 or h < 1:
        raise GraphError(f"honeycomb needs w, h >= 1, got {w}x{h}")
    cols, rows = 2 * w + 2, h + 1
    vid = lambda i, j: j * cols + i
    edges = [(vid(i, j), vid(i + 1, j)) for j in range(rows) for i in range(cols - 1)]
    edges += [(vid(i, j), vid(i, j + 1)) for j in range(rows - 1) for i in range(cols) if (i + j) % 2 == 0]
    faces = []
    for j in range(h):
        for k in range(w):
            i = j % 2 + 2 * k
            faces.append([vid(i, j), vid(i + 1, j), vid(i + 2, j), vid(i + 2, j + 1), vid(i + 1, j + 1), vid(i, j + 1)])
    return _assemble(cols * rows, edges, faces, "hex", debug)


def hex_faces(w: int, h: int, debug: bool = False) -> EvenGenSet:
    return hexagonal(w, h, debug).gens


_SOURCE = re.compile(r"^(grid|grid3|tri|hex):(\d+)x(\d+)(?:x(\d+))?$")


def load_source(source: str) -> tuple[OrientedMultigraph, Lattice | None]:
    """Resolve a CLI graph source: a lattice spec like "grid:3x3" or a graph file path."""
    m = _SOURCE.match(source.strip())
    if m:
        kind, a, b, c = m.group(1), int(m.group(2)), int(m.group(3)), m.group(4)
        if (kind == "grid3") != (c is not None):
            raise GraphError(f"bad lattice spec {source!r}")
        lat = {
            "grid": lambda: grid(a, b),
            "grid3": lambda: grid3(a, b, int(c or 0)),
            "tri": lambda: tri(a, b),
            "hex": lambda: hexagonal(a, b),
        }[kind]()
        return lat.graph, lat
    return parse_graph(Path(source).read_text()), None
