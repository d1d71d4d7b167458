import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pottsflow import lattices
from pottsflow.flow_chain import OutOfRange
from pottsflow.flows import add_multiple, is_flow, zero_flow
from pottsflow.joint_chain import (
    JointChainConfig,
    JointState,
    bound_params,
    compute_p,
    initial_state,
    mixing_time_bound,
    run,
    sample,
    step,
    threshold,
    transition_law,
)
from pottsflow.rng import stream

from conftest import glued_triangles, triangle, triangle_gens


def test_compute_p_grid_example():
    p, alpha = compute_p(0.95, 2, 4, 2, 12, 4)
    assert p == pytest.approx(1 / 6, abs=1e-12)
    assert alpha == pytest.approx((2 - 1 * 4 * 2 * 0.05) / 57.6, abs=1e-12)


@given(
    q=st.integers(2, 6),
    ell=st.integers(3, 8),
    s=st.integers(2, 6),
    m=st.integers(1, 500),
    r=st.integers(1, 300),
    u=st.floats(0.001, 0.999),
)
def test_compute_p_in_unit_interval_and_closed_form(q, ell, s, m, r, u):
    th = threshold(q, ell, s)
    x = th + u * (1 - th)
    if not th < x < 1:
        return
    p, alpha = compute_p(x, q, ell, s, m, r)
    assert 0 < p < 1
    assert alpha > 0
    denom = q * r + (q - 1) * s * m + q * m + q * r * ell * (1 - x)
    assert p == pytest.approx((q * r + q * r * ell * (1 - x)) / denom, rel=1e-12)
    assert alpha == pytest.approx((q - (q - 1) * ell * s * (1 - x)) / denom, rel=1e-12)


def test_compute_p_out_of_range():
    with pytest.raises(OutOfRange) as err:
        compute_p(0.7, 2, 4, 2, 12, 4)
    assert err.value.threshold == pytest.approx(0.75)


def test_grid_bound_example():
    lat = lattices.grid(3, 3)
    cfg = JointChainConfig.solved(lat.graph, 0.95, 2, lat.gens, 4, 2)
    assert mixing_time_bound(lat.graph, cfg, 4, 2, 0.01) == 318 == math.ceil(8 * math.log(2800) / 0.2)


def test_bound_out_of_range_at_threshold():
    lat = lattices.grid(3, 3)
    cfg = JointChainConfig(0.75, 2, lat.gens, 0.5)
    assert mixing_time_bound(lat.graph, cfg, 4, 2, 0.01) is None


@pytest.mark.parametrize("q", [2, 3, 4])
@pytest.mark.parametrize("u", [0.01, 0.3, 0.7, 0.99])
def test_bound_lower_estimate_carries_q_factor(q, u):
    lat = lattices.grid(4, 4)
    g = lat.graph
    th = threshold(q, 4, 2)
    cfg = JointChainConfig.solved(g, th + u * (1 - th), q, lat.gens, 4, 2)
    m, r = g.n_edges, lat.gens.r
    for delta in (0.5, 0.01, 1e-6):
        lower = 2 * 2 * (m + r) * (q - 1) / q * math.log((2 * m + r) / delta)
        assert mixing_time_bound(g, cfg, 4, 2, delta) >= lower


def test_lower_estimate_without_q_factor_fails():
    # xi <= q/((q-1)·ell·s), so the bound can drop below 2s(m+r)·log((2m+r)/delta)
    lat = lattices.grid(4, 4)
    g = lat.graph
    cfg = JointChainConfig.solved(g, 0.99, 2, lat.gens, 4, 2)
    bound = mixing_time_bound(g, cfg, 4, 2, 0.5)
    assert bound == 326
    assert bound < 2 * 2 * (24 + 9) * math.log((2 * 24 + 9) / 0.5)


def test_bound_monotone_in_delta():
    lat = lattices.grid(3, 3)
    cfg = JointChainConfig.solved(lat.graph, 0.95, 2, lat.gens, 4, 2)
    assert mixing_time_bound(lat.graph, cfg, 4, 2, 0.5) <= mixing_time_bound(lat.graph, cfg, 4, 2, 0.01)


def test_removal_from_full_set():
    g = triangle()
    cfg = JointChainConfig(0.6, 2, triangle_gens(g), 0.3)
    st0 = initial_state(g, 2)
    law = transition_law(st0, g, cfg)
    for e in range(3):
        key = JointState(st0.f, st0.F - {e}).key()
        assert law[key] == pytest.approx((1 - 0.3) / 3 * 0.4)


def test_nonzero_edge_always_holds():
    g = triangle()
    gs = triangle_gens(g)
    cfg = JointChainConfig(0.6, 3, gs, 0.3)
    f = add_multiple(zero_flow(g, 3), 1, gs.generators[0])
    st0 = JointState(f, frozenset({0, 1, 2}))
    law = transition_law(st0, g, cfg)
    # no edge move changes anything, and flow moves keep F
    assert all(F == (0, 1, 2) for _, F in law)


def test_flow_move_blocked_when_cycle_not_in_f():
    g = triangle()
    cfg = JointChainConfig(0.6, 2, triangle_gens(g), 0.9)
    st0 = JointState(zero_flow(g, 2), frozenset({0, 1}))
    law = transition_law(st0, g, cfg)
    assert all(not any(vals) for vals, _ in law)


def test_transition_law_sums_to_one():
    g, gs = glued_triangles()
    cfg = JointChainConfig(0.8, 3, gs, 0.4)
    st0 = JointState(add_multiple(zero_flow(g, 3), 2, gs.generators[1]), frozenset({0, 1, 3, 4}))
    assert sum(transition_law(st0, g, cfg).values()) == pytest.approx(1.0, abs=1e-14)


def test_python_step_matches_compiled_run():
    lat = lattices.grid(4, 3)
    g = lat.graph
    for q, x, p in ((2, 0.8, 0.3), (3, 0.9, 0.6)):
        cfg = JointChainConfig(x, q, lat.gens, p)
        s, rng = initial_state(g, q), stream(5)
        for _ in range(600):
            s = step(s, g, cfg, rng)
            assert s.f.support() <= s.F
        t = run(initial_state(g, q), g, cfg, 600, stream(5))
        assert t.key() == s.key()
        assert is_flow(g, t.f)


def test_invariant_enforced():
    g = triangle()
    f = add_multiple(zero_flow(g, 2), 1, triangle_gens(g).generators[0])
    with pytest.raises(ValueError):
        JointState(f, frozenset({0, 1}))


def test_sample_reproducible_and_clamped_params():
    g = triangle()
    gs = triangle_gens(g)
    cfg = JointChainConfig.solved(g, 0.95, 2, gs, *bound_params(JointChainConfig(0.95, 2, gs, 0.5)))
    assert bound_params(cfg) == (3, 2)
    a = sample(g, cfg, 3, 2, 0.01, stream(8))
    b = sample(g, cfg, 3, 2, 0.01, stream(8))
    assert a.key() == b.key()
