import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from pottsflow import lattices
from pottsflow.flows import (
    add_multiple,
    flow_from_json,
    flow_to_json,
    from_values,
    is_flow,
    uniform_flow_on,
    zero_count_on,
    zero_flow,
)
from pottsflow.graph import contract, from_edge_list
from pottsflow.oracle import enumerate_flows_within
from pottsflow.rng import stream

from conftest import glued_triangles, loop_graph, triangle, triangle_gens


def test_zero_flow_examples():
    assert zero_flow(triangle(), 3).support_size == 0
    assert zero_flow(lattices.grid(3, 3).graph, 2).support_size == 0
    assert zero_flow(loop_graph(), 4).support_size == 0
    with pytest.raises(ValueError):
        zero_flow(triangle(), 1)


def test_add_multiple_and_inverse():
    g = triangle()
    C = triangle_gens(g).generators[0]
    for q in (2, 3, 5):
        f = add_multiple(zero_flow(g, q), 1, C)
        assert f.support_size == 3 and is_flow(g, f)
        assert add_multiple(f, q - 1, C).support_size == 0


def test_add_multiple_on_glued_triangles_matches_recount():
    g, gs = glued_triangles()
    C1, C2 = gs.generators
    for q in (2, 3, 4):
        f = add_multiple(add_multiple(zero_flow(g, q), 1, C1), 1, C2)
        assert f.support_size == np.count_nonzero(f.values)
        assert is_flow(g, f)
    # over ℤ_2 the shared edge cancels
    f = add_multiple(add_multiple(zero_flow(g, 2), 1, C1), 1, C2)
    assert f.support() == frozenset({0, 2, 3, 4})


def test_zero_count_examples():
    g = triangle()
    C = triangle_gens(g).generators[0]
    assert zero_count_on(zero_flow(g, 2), C).tolist() == [3, 0]
    assert zero_count_on(add_multiple(zero_flow(g, 2), 1, C), C).tolist() == [0, 3]


@given(st.integers(2, 5), st.lists(st.tuples(st.integers(0, 1), st.integers(0, 4)), max_size=6))
def test_flow_algebra_invariants(q, moves):
    g, gs = glued_triangles()
    f = zero_flow(g, q)
    for i, t in moves:
        f = add_multiple(f, t, gs.generators[i])
        assert is_flow(g, f)
        assert f.support_size == np.count_nonzero(f.values)
    for C in gs.generators:
        a = zero_count_on(f, C)
        assert a.sum() == len(C)
        brute = [len(C) - sum(add_multiple(f, t, C).values[e] != 0 for e in C.edges) for t in range(q)]
        assert a.tolist() == brute


def test_uniform_flow_on_triangle():
    g = triangle()
    rng = stream(1)
    counts = {}
    for _ in range(3000):
        key = uniform_flow_on(g, frozenset(g.live_edges), 3, rng).key()
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 3
    assert chisquare(list(counts.values())).pvalue > 1e-4


def test_uniform_flow_on_tree_is_zero():
    g = from_edge_list(4, [(0, 1), (1, 2), (1, 3)])
    rng = stream(2)
    assert all(uniform_flow_on(g, frozenset(g.live_edges), 5, rng).support_size == 0 for _ in range(20))


def test_uniform_flow_on_empty_set_and_subsets():
    g = lattices.grid(3, 3).graph
    rng = stream(3)
    assert uniform_flow_on(g, frozenset(), 3, rng).support_size == 0
    F = frozenset({0, 1, 6, 7, 8, 9})
    for _ in range(50):
        f = uniform_flow_on(g, F, 3, rng)
        assert is_flow(g, f) and f.support() <= F


def test_uniform_flow_on_grid_chi_square():
    g = lattices.grid(3, 3).graph
    flows = [tuple(r) for r in enumerate_flows_within(g, 2).tolist()]
    assert len(flows) == 16
    index = {f: i for i, f in enumerate(flows)}
    counts = np.zeros(16, dtype=np.int64)
    rng = stream(4)
    F = frozenset(g.live_edges)
    for _ in range(100_000):
        counts[index[uniform_flow_on(g, F, 2, rng).key()]] += 1
    assert chisquare(counts).pvalue > 1e-4


def test_uniform_flow_on_contracted_graph():
    g = contract(contract(lattices.grid(3, 3).graph, 0), 3)
    rng = stream(5)
    for _ in range(30):
        assert is_flow(g, uniform_flow_on(g, frozenset(g.live_edges), 4, rng))


def test_json_round_trip():
    g = contract(triangle(), 0)
    f = from_values(3, [0, 1, 2])
    obj = flow_to_json(f, g)
    assert obj == {"q": 3, "values": [-1, 1, 2]}
    assert flow_from_json(obj) == from_values(3, [0, 1, 2])
