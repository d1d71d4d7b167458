"""Brute-force ground truth for small instances.

Partition functions are accumulated as integer coefficient tables and
evaluated in exact rational arithmetic, so the identities between the three
models can be checked without cancellation error.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np
import scipy.sparse as sp

from . import flow_chain, joint_chain
from .couplings import potts_param, rc_param
from .flows import FlowState, complete_forest
from .graph import EdgeSubset, OrientedMultigraph, _DSU, components, spanning_forest

MAX_ENUM = 10**6
MAX_CHAIN_STATES = 10**4


class TooLarge(ValueError):
    pass


# -- enumeration --------------------------------------------------------------------


def completion_matrix(g: OrientedMultigraph, F: Sequence[int]) -> tuple[list[int], np.ndarray]:
    """(free edges, B) with B[:, k] the integer flow obtained from a unit value on free edge k."""
    F = sorted(F)
    order, parent_edge, forest = spanning_forest(g, F)
    in_forest = set(forest)
    free = [e for e in F if e not in in_forest]
    B = np.zeros((g.m_total, len(free)), dtype=np.int64)
    for k, e in enumerate(free):
        vals = [0] * g.m_total
        vals[e] = 1
        complete_forest(g, vals, order, parent_edge, F, None)
        B[:, k] = vals
    return free, B


def enumerate_flows_within(g: OrientedMultigraph, q: int, F=None) -> np.ndarray:
    """All ℤ_q-flows supported inside F (default: every live edge), one per row."""
    F = g.live_edges if F is None else sorted(F)
    free, B = completion_matrix(g, F)
    if q ** len(free) > MAX_ENUM:
        raise TooLarge(f"{q}^{len(free)} flows exceed the enumeration limit")
    coeffs = np.array(list(itertools.product(range(q), repeat=len(free))), dtype=np.int64)
    coeffs = coeffs.reshape(q ** len(free), len(free))
    return (coeffs @ B.T) % q


def enumerate_colourings(g: OrientedMultigraph, q: int) -> np.ndarray:
    """All colourings of live vertices (colours 1..q) as rows indexed by vertex id."""
    verts = g.live_vertices
    if q ** len(verts) > MAX_ENUM:
        raise TooLarge(f"{q}^{len(verts)} colourings exceed the enumeration limit")
    cols = np.array(list(itertools.product(range(1, q + 1), repeat=len(verts))), dtype=np.int64)
    cols = cols.reshape(q ** len(verts), len(verts))
    out = np.zeros((cols.shape[0], g.n_total), dtype=np.int64)
    out[:, list(verts)] = cols
    return out


def enumerate_subsets(g: OrientedMultigraph):
    """Yield (F, c(F)) for every F ⊆ E."""
    live = g.live_edges
    if 2 ** len(live) > MAX_ENUM:
        raise TooLarge(f"2^{len(live)} edge subsets exceed the enumeration limit")
    for mask in range(2 ** len(live)):
        F = [e for k, e in enumerate(live) if mask >> k & 1]
        yield frozenset(F), components(g, F)


# -- partition functions ----------------------------------------------------------------


def _poly_eval(coeffs: dict[int, int], x):
    """sum_k coeffs[k] * x**k, exactly; floats come back as float."""
    exact = not isinstance(x, float)
    X = Fraction(x)
    total = sum(c * X**k for k, c in coeffs.items())
    return total if exact else float(total)


def flow_polynomial(g: OrientedMultigraph, q: int) -> dict[int, int]:
    """Number of ℤ_q-flows by support size."""
    flows = enumerate_flows_within(g, q)
    sizes = np.count_nonzero(flows, axis=1)
    return {int(k): int(c) for k, c in zip(*np.unique(sizes, return_counts=True))}


def potts_polynomial(g: OrientedMultigraph, q: int) -> dict[int, int]:
    """Number of colourings by monochromatic edge count."""
    cols = enumerate_colourings(g, q)
    live = list(g.live_edges)
    mono = (cols[:, [g.tails[e] for e in live]] == cols[:, [g.heads[e] for e in live]]).sum(axis=1)
    return {int(k): int(c) for k, c in zip(*np.unique(mono, return_counts=True))}


def rc_table(g: OrientedMultigraph) -> dict[tuple[int, int], int]:
    """Number of edge subsets by (components, size)."""
    table: dict[tuple[int, int], int] = {}
    for F, c in enumerate_subsets(g):
        table[(c, len(F))] = table.get((c, len(F)), 0) + 1
    return table


def exact_z_flow(g: OrientedMultigraph, q: int, x):
    return _poly_eval(flow_polynomial(g, q), x)


def exact_z_potts(g: OrientedMultigraph, q: int, w):
    return _poly_eval(potts_polynomial(g, q), w)


def exact_z_rc(g: OrientedMultigraph, q: int, y):
    exact = not isinstance(y, float)
    Y = Fraction(y)
    total = sum(n * Fraction(q) ** c * Y**k for (c, k), n in rc_table(g).items())
    return total if exact else float(total)


# -- identities -------------------------------------------------------------------------


@dataclass
class IdentityReport:
    q: int
    x: float
    flow_side: Fraction
    potts_side: Fraction
    rc_side: Fraction
    potts_rel_err: float
    rc_rel_err: float
    flow_count_checked: int
    flow_count_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.potts_rel_err <= 1e-9 and self.rc_rel_err <= 1e-9 and not self.flow_count_failures


def _rel(a: Fraction, b: Fraction) -> float:
    if a == b:
        return 0.0
    return float(abs(a - b) / max(abs(a), abs(b)))


def flow_count_failures(g: OrientedMultigraph, q: int) -> tuple[int, list]:
    """Check #{flows with support ⊆ F} = q^{|F|-|V|+c(F)} for every F ⊆ E.

    Left side: histogram of enumerated flow supports summed over subsets of F.
    """
    live = list(g.live_edges)
    m = len(live)
    if 2**m > MAX_ENUM:
        raise TooLarge(f"2^{m} edge subsets exceed the enumeration limit")
    flows = enumerate_flows_within(g, q)
    bits = (flows[:, live] != 0).astype(np.int64) @ (1 << np.arange(m, dtype=np.int64))
    cnt = np.bincount(bits, minlength=2**m).astype(np.int64)
    masks = np.arange(2**m)
    for i in range(m):
        has = (masks >> i) & 1 == 1
        cnt[has] += cnt[masks[has] ^ (1 << i)]
    failures = []
    n = g.n_vertices
    for mask in range(2**m):
        F = [e for k, e in enumerate(live) if mask >> k & 1]
        expected = q ** (len(F) - n + components(g, F))
        if cnt[mask] != expected:
            failures.append((tuple(F), int(cnt[mask]), expected))
    return 2**m, failures


def identity_suite(g: OrientedMultigraph, q: int, x, check_flow_count: bool = True) -> IdentityReport:
    """q^|V| Z_flow(x) = (1-x)^|E| Z_Potts(w(x)) = (1-x)^|E| Z_RC(y(x)), in exact arithmetic."""
    X = Fraction(x)
    if X == 1:
        raise ValueError("x = 1 is a pole of the parameter maps")
    n, m = g.n_vertices, g.n_edges
    flow_side = Fraction(q) ** n * exact_z_flow(g, q, X)
    potts_side = (1 - X) ** m * exact_z_potts(g, q, potts_param(X, q))
    rc_side = (1 - X) ** m * exact_z_rc(g, q, rc_param(X, q))
    checked, failures = flow_count_failures(g, q) if check_flow_count else (0, [])
    return IdentityReport(
        q=q,
        x=float(x),
        flow_side=flow_side,
        potts_side=potts_side,
        rc_side=rc_side,
        potts_rel_err=_rel(flow_side, potts_side),
        rc_rel_err=_rel(flow_side, rc_side),
        flow_count_checked=checked,
        flow_count_failures=failures,
    )


# -- distributions ----------------------------------------------------------------------


@dataclass
class ExactDistribution:
    states: list
    probs: np.ndarray

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate states")
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {self.probs.sum()!r}")

    @classmethod
    def from_weights(cls, states, weights) -> "ExactDistribution":
        w = [Fraction(v) for v in weights]
        total = sum(w)
        return cls(list(states), np.array([float(v / total) for v in w]))

    @classmethod
    def from_dict(cls, d: dict) -> "ExactDistribution":
        keys = list(d)
        return cls(keys, np.array([d[k] for k in keys], dtype=np.float64))

    def as_dict(self) -> dict:
        return dict(zip(self.states, self.probs.tolist()))

    @property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def tv(self, other: "ExactDistribution | dict") -> float:
        a = self.as_dict()
        b = other.as_dict() if isinstance(other, ExactDistribution) else other
        return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b))

    def max_abs_diff(self, other: "ExactDistribution | dict") -> float:
        a = self.as_dict()
        b = other.as_dict() if isinstance(other, ExactDistribution) else other
        return max(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b))


def flow_distribution(g: OrientedMultigraph, q: int, x) -> ExactDistribution:
    flows = enumerate_flows_within(g, q)
    sizes = np.count_nonzero(flows, axis=1)
    X = Fraction(x)
    return ExactDistribution.from_weights([tuple(int(v) for v in r) for r in flows], [X ** int(k) for k in sizes])


def rc_distribution(g: OrientedMultigraph, q: int, y) -> ExactDistribution:
    Y = Fraction(y)
    states, weights = [], []
    for F, c in enumerate_subsets(g):
        states.append(F)
        weights.append(Fraction(q) ** c * Y ** len(F))
    return ExactDistribution.from_weights(states, weights)


def potts_distribution(g: OrientedMultigraph, q: int, w) -> ExactDistribution:
    cols = enumerate_colourings(g, q)
    live = list(g.live_edges)
    mono = (cols[:, [g.tails[e] for e in live]] == cols[:, [g.heads[e] for e in live]]).sum(axis=1)
    W = Fraction(w)
    return ExactDistribution.from_weights([tuple(int(v) for v in r) for r in cols], [W ** int(k) for k in mono])


def joint_distribution(g: OrientedMultigraph, q: int, x) -> ExactDistribution:
    """Pairs (f, F), supp(f) ⊆ F, weighted x^|F| (1-x)^|E∖F|."""
    X = Fraction(x)
    m = g.n_edges
    states, weights = [], []
    for F, _ in enumerate_subsets(g):
        wt = X ** len(F) * (1 - X) ** (m - len(F))
        for row in enumerate_flows_within(g, q, F):
            states.append((tuple(int(v) for v in row), tuple(sorted(F))))
            weights.append(wt)
    return ExactDistribution.from_weights(states, weights)


def pushforward(dist: ExactDistribution, kernel) -> dict:
    """Law of kernel(state) when state ~ dist; `kernel` returns {outcome: prob}."""
    out: dict = {}
    for s, p in zip(dist.states, dist.probs):
        if p == 0:
            continue
        for o, k in kernel(s).items():
            out[o] = out.get(o, 0.0) + p * k
    return out


# -- chains -----------------------------------------------------------------------------


@dataclass
class ChainMatrix:
    states: list
    P: sp.csr_matrix
    mu: np.ndarray
    start: int

    @property
    def row_sum_error(self) -> float:
        return float(np.abs(np.asarray(self.P.sum(axis=1)).ravel() - 1.0).max())

    @property
    def detailed_balance_error(self) -> float:
        M = sp.diags(self.mu) @ self.P
        D = (M - M.T).tocoo()
        return float(np.abs(D.data).max()) if D.nnz else 0.0

    @property
    def fixed_point_residual(self) -> float:
        """||mu P - mu||_1."""
        return float(np.abs(self.P.T @ self.mu - self.mu).sum())

    def stationary(self) -> np.ndarray:
        """Stationary vector by power iteration on the lazy chain (P + I)/2."""
        v = np.full(len(self.states), 1.0 / len(self.states))
        L = (self.P.T + sp.identity(len(self.states), format="csr")) * 0.5
        for _ in range(100_000):
            nv = L @ v
            if np.abs(nv - v).sum() < 1e-15:
                return nv
            v = nv
        return v


def _assemble(states: list, laws, mu, start_key) -> ChainMatrix:
    index = {s: i for i, s in enumerate(states)}
    rows, cols, vals = [], [], []
    for i, law in enumerate(laws):
        for key, p in law.items():
            if key not in index:
                raise KeyError(f"transition leaves the state space: {key}")
            rows.append(i)
            cols.append(index[key])
            vals.append(p)
    n = len(states)
    P = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    P.sum_duplicates()
    return ChainMatrix(states, P, mu, index[start_key])


def flow_chain_matrix(g: OrientedMultigraph, cfg: flow_chain.FlowChainConfig) -> ChainMatrix:
    dist = flow_distribution(g, cfg.q, cfg.x)
    if len(dist.states) > MAX_CHAIN_STATES:
        raise TooLarge(f"{len(dist.states)} states exceed the chain limit")
    laws = (flow_chain.transition_law(FlowState(cfg.q, np.array(s, dtype=np.int64), sum(v != 0 for v in s)), cfg) for s in dist.states)
    return _assemble(dist.states, laws, dist.probs, tuple([0] * g.m_total))


def joint_chain_matrix(g: OrientedMultigraph, cfg: joint_chain.JointChainConfig, max_states: int = MAX_CHAIN_STATES) -> ChainMatrix:
    dist = joint_distribution(g, cfg.q, cfg.x)
    if len(dist.states) > max_states:
        raise TooLarge(f"{len(dist.states)} states exceed the chain limit")

    def law(s):
        vals, F = s
        f = FlowState(cfg.q, np.array(vals, dtype=np.int64), sum(v != 0 for v in vals))
        return joint_chain.transition_law(joint_chain.JointState(f, frozenset(F)), g, cfg)

    start = (tuple([0] * g.m_total), tuple(g.live_edges))
    return _assemble(dist.states, (law(s) for s in dist.states), dist.probs, start)


def tv_decay(chain: ChainMatrix, t_max: int, start: int | None = None) -> np.ndarray:
    """TV(mu_t, mu) for t = 0..t_max, started from a point mass."""
    v = np.zeros(len(chain.states))
    v[chain.start if start is None else start] = 1.0
    PT = chain.P.T.tocsr()
    out = np.empty(t_max + 1)
    for t in range(t_max + 1):
        out[t] = 0.5 * np.abs(v - chain.mu).sum()
        v = PT @ v
    return out


def worst_tv_decay(chain: ChainMatrix, t_max: int) -> np.ndarray:
    """max over starting states of TV(P^t(s, .), mu) for t = 0..t_max (dense powers)."""
    n = len(chain.states)
    if n > 2000:
        raise TooLarge(f"{n} states are too many for dense matrix powers")
    P = chain.P.toarray()
    M = np.eye(n)
    out = np.empty(t_max + 1)
    for t in range(t_max + 1):
        out[t] = 0.5 * np.abs(M - chain.mu).sum(axis=1).max()
        M = M @ P
    return out


@dataclass
class TVDecay:
    tv: np.ndarray
    row_sum_error: float
    detailed_balance_error: float
    fixed_point_residual: float


def exact_tv_decay(chain: ChainMatrix, t_max: int) -> TVDecay:
    return TVDecay(
        tv=tv_decay(chain, t_max),
        row_sum_error=chain.row_sum_error,
        detailed_balance_error=chain.detailed_balance_error,
        fixed_point_residual=chain.fixed_point_residual,
    )


# -- sum-of-minima inequality -------------------------------------------------------------


def _softmin_terms(x: float, a: np.ndarray) -> np.ndarray:
    """x^{-a_i} / sum_j x^{-a_j}, rescaled by the largest exponent."""
    w = x ** (a.max(axis=-1, keepdims=True) - a).astype(np.float64)
    return w / w.sum(axis=-1, keepdims=True)


def lemma34_bound(x: float, iota: int) -> float:
    xi = x**iota
    return 1.0 - (1.0 - xi) / (1.0 + xi)


def lemma34_check(x: float, iota: int, a: Sequence[int], b: Sequence[int]) -> tuple[float, float, bool]:
    """(S, bound, S >= bound - 1e-12) for the sum of coordinatewise minima."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("a and b must be sequences of equal length")
    if not 0 < x < 1 or iota < 0:
        raise ValueError("need x in (0, 1) and iota >= 0")
    if a.sum() != b.sum():
        raise ValueError("constraint violated: sum(a) != sum(b)")
    if np.abs(a - b).sum() > 2 * iota:
        raise ValueError("constraint violated: sum |a - b| > 2 iota")
    S = float(np.minimum(_softmin_terms(x, a), _softmin_terms(x, b)).sum())
    bound = lemma34_bound(x, iota)
    return S, bound, S >= bound - 1e-12


@dataclass
class SweepResult:
    cases: int
    failures: int
    worst_slack: float


def lemma34_sweep(qs=(2, 3, 4), max_entry: int = 4, iotas=(0, 1, 2, 3), xs=None) -> SweepResult:
    """Every admissible (a, b) with entries in 0..max_entry, vectorized per (q, iota, x)."""
    xs = [k / 10 for k in range(1, 10)] if xs is None else xs
    cases = failures = 0
    worst = math.inf
    for q in qs:
        grid = np.array(list(itertools.product(range(max_entry + 1), repeat=q)), dtype=np.int64)
        sums = grid.sum(axis=1)
        for s in np.unique(sums):
            block = grid[sums == s]
            A = np.repeat(block, len(block), axis=0)
            B = np.tile(block, (len(block), 1))
            dist = np.abs(A - B).sum(axis=1)
            for iota in iotas:
                keep = dist <= 2 * iota
                if not keep.any():
                    continue
                Ak, Bk = A[keep], B[keep]
                for x in xs:
                    S = np.minimum(_softmin_terms(x, Ak), _softmin_terms(x, Bk)).sum(axis=1)
                    slack = S - lemma34_bound(x, iota)
                    cases += len(S)
                    failures += int((slack < -1e-12).sum())
                    worst = min(worst, float(slack.min()))
    return SweepResult(cases, failures, worst)
