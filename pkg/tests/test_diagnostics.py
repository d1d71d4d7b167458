import collections

import numpy as np
import pytest

from pottsflow import diagnostics, lattices
from pottsflow.couplings import PottsConfig
from pottsflow.graph import from_edge_list
from pottsflow.rng import stream


def test_isolated_vertex_is_uniform():
    g = from_edge_list(1, [])
    law = diagnostics.glauber_law(PottsConfig(3, (1,)), g, 0, 5.0)
    assert np.allclose(law, 1 / 3)


def test_w_one_is_uniform():
    g = lattices.grid(2, 2).graph
    law = diagnostics.glauber_law(PottsConfig(4, (1, 2, 2, 3)), g, 0, 1.0)
    assert np.allclose(law, 1 / 4)


def test_single_edge_law():
    g = from_edge_list(2, [(0, 1)])
    w = 3.0
    states, M = diagnostics.glauber_matrix(g, 2, w)
    M = M.toarray()
    i, j = states.index((1, 1)), states.index((1, 2))
    # pick a vertex (1/2), then it agrees with its neighbour w.p. w/(1+w)
    assert M[i, i] == pytest.approx(w / (1 + w))
    assert M[i, j] == pytest.approx(0.5 / (1 + w))
    assert np.allclose(M.sum(axis=1), 1)


def test_frozen_neighbours_count_as_agreement():
    g = from_edge_list(1, [])
    law = diagnostics.glauber_law(PottsConfig(2, (1,)), g, 0, 4.0, {0: [2, 2]})
    assert law[1] == pytest.approx(16 / 17)


def test_glauber_step_empirical():
    g = from_edge_list(2, [(0, 1)])
    rng = stream(0)
    sigma = PottsConfig(2, (1, 1))
    counts = collections.Counter(diagnostics.potts_glauber_step(sigma, g, 3.0, rng).spins for _ in range(20_000))
    assert counts[(1, 1)] / 20_000 == pytest.approx(0.75, abs=0.02)


@pytest.mark.parametrize("L,q,states", [(1, 2, 2), (1, 3, 3), (2, 2, 16), (2, 3, 81)])
def test_duality(L, q, states):
    rep = diagnostics.verify_duality(L, q, 0.7)
    assert rep.states == states and rep.bijective and rep.max_entry_diff <= 1e-12 and rep.ok


def test_duality_fails_without_the_boundary():
    from pottsflow import oracle
    from pottsflow.flow_chain import FlowChainConfig, transition_law

    # plain Glauber with weight x per agreeing pair is not the dual chain
    L, q, x = 2, 2, 0.7
    G = lattices.grid(L + 1, L + 1)
    H = lattices.grid(L, L).graph
    states, P = diagnostics.glauber_matrix(H, q, x)
    image = [diagnostics.phi(s, G.gens, G.graph.m_total, q) for s in states]
    idx = {f: i for i, f in enumerate(image)}
    Q = np.zeros((len(states), len(states)))
    cfg = FlowChainConfig(x, q, G.gens)
    from pottsflow.flows import from_values

    for i, f in enumerate(image):
        for key, p in transition_law(from_values(q, f), cfg).items():
            Q[i, idx[key]] += p
    assert np.abs(P.toarray() - Q).max() > 0.01


def test_duality_size_guard():
    from pottsflow.oracle import TooLarge

    with pytest.raises(TooLarge):
        diagnostics.verify_duality(3, 3, 0.5)


def test_tv_curve_zero_start_non_increasing():
    lat = lattices.grid(3, 3)
    rows = diagnostics.tv_curve(lat.graph, lat.gens, 2, [0.3, 0.6, 0.9], 40)
    by_x = collections.defaultdict(list)
    for t, x, tv in rows:
        by_x[x].append(tv)
    for tvs in by_x.values():
        assert len(tvs) == 41 and np.all(np.diff(tvs) <= 1e-15)


def test_tv_curve_worst_start_slower_for_smaller_x():
    lat = lattices.grid(3, 3)
    rows = diagnostics.tv_curve(lat.graph, lat.gens, 2, [0.3, 0.6, 0.9], 25, start="worst")
    by_x = collections.defaultdict(list)
    for t, x, tv in rows:
        by_x[x].append(tv)
    for t in range(1, 26):
        assert by_x[0.3][t] > by_x[0.6][t] > by_x[0.9][t]


def test_tv_curve_csv():
    text = diagnostics.tv_curve_csv([(0, 0.5, 0.25), (1, 0.5, 0.125)])
    assert text.splitlines() == ["t,x,tv", "0,0.5,0.25", "1,0.5,0.125"]
