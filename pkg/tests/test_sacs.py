import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abmbench.engine import torus_distance
from abmbench.sacs import (SacsModel, SacsParams, SetupError, build_field,
                           live_queries, metrics, move_devices, sacs_invariants, setup, step_queries)
from abmbench.vomas import register, violations

import oracles


def small(**kw):
    base = dict(width=30, height=30, n_gw=0, n_cs=0, n_srchs=0, k=1)
    base.update(kw)
    return SacsParams(**base)


def brute_adjacency(world, pos, r):
    n = len(pos)
    return [[j for j in range(n) if j != i and torus_distance(pos[i], pos[j], world.width, world.height) <= r]
            for i in range(n)]


def test_line_labels():
    w = build_field(small(sacs_radius=2), [(10, 10), (11.5, 10), (13, 10)], goals=[0])
    assert list(w.globals["devices"].sacs_distance) == [0, 1, 2]


def test_radius_zero_leaves_initial_labels():
    w = build_field(small(sacs_radius=0), [(10, 10), (11.5, 10), (13, 10)], goals=[0])
    assert list(w.globals["devices"].sacs_distance) == [0, 0, 0]
    assert w.globals["devices"].goal.tolist() == [True, False, False]


def test_y_topology_min_rule():
    # two goals, each two hops from the hub; the arms do not see each other
    pos = [(17, 20), (18.5, 20), (20, 20), (20, 21.5), (20, 23)]
    w = build_field(small(sacs_radius=5), pos, goals=[0, 4])
    assert list(w.globals["devices"].sacs_distance) == [0, 1, 2, 1, 0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 60), st.integers(0, 6))
def test_gradient_matches_bfs_oracle(seed, n, radius):
    rng = np.random.default_rng(seed)
    pos = rng.uniform(0, 12, (n, 2))
    goals = sorted(rng.choice(n, size=max(1, n // 10), replace=False).tolist())
    w = build_field(small(width=12, height=12, sacs_radius=radius), pos, goals=goals)
    dev = w.globals["devices"]
    adj = brute_adjacency(w, dev.pos, 2.0)
    expect = oracles.bfs_labels(adj, goals, radius)
    assert dev.sacs_distance.tolist() == expect


def test_moves_to_minimum_label():
    pos = [(20, 20), (21.5, 20), (20, 21.5), (18.5, 20)]
    p = small(sacs_radius=5)
    w = build_field(p, pos, starts=[0])
    dev = w.globals["devices"]
    dev.sacs_distance[:] = [5, 3, 1, 2]
    step_queries(w, p)
    (q,) = live_queries(w)
    assert q.attributes["loc"] == 2 and q.attributes["ttl"] == 9
    assert metrics(w).nhop == 1


def test_gateway_costs_and_succeeds():
    w = build_field(small(), [(10, 10), (11, 10)], gateways=[1], starts=[0])
    step_queries(w, small())
    assert metrics(w).nsucc == 1 and metrics(w).nhop == 10
    assert not live_queries(w)


def test_ttl_exhaustion():
    p = small(max_ttl=1)
    w = build_field(p, [(10, 10), (11, 10)], starts=[0])
    step_queries(w, p)
    m = metrics(w)
    assert (m.nsucc, m.nhop, w.globals["ndead"]) == (0, 1, 1)


def test_isolated_query_dies():
    w = build_field(small(), [(10, 10), (20, 20)], starts=[0])
    step_queries(w, small())
    assert not live_queries(w) and metrics(w).nhop == 0


def test_single_hop_onto_goal():
    p = small(sacs_radius=3)
    w = build_field(p, [(10, 10), (11, 10)], starts=[0], goals=[1])
    m = metrics(w)
    assert (m.nsucc, m.nhop, m.ntot) == (0, 0, 1)
    step_queries(w, p)
    m = metrics(w)
    assert (m.nsucc, m.nhop) == (1, 1)


def test_roles_must_be_exclusive():
    with pytest.raises(SetupError):
        build_field(small(), [(1, 1), (2, 2)], goals=[0], starts=[0])


def test_no_devices_is_setup_error():
    with pytest.raises(SetupError):
        setup(SacsParams(device_probability=0), 1)


def test_default_setup_roles():
    w = setup(SacsParams(), 3)
    dev = w.globals["devices"]
    assert 2400 < len(dev) <= 2500
    assert (dev.gateway.sum(), dev.goal.sum(), dev.start.sum()) == (10, 10, 100)
    assert ((dev.gateway.astype(int) + dev.goal + dev.start) <= 1).all()
    m = metrics(w)
    assert (m.nsucc, m.nhop, m.ntot) == (0, 0, 500)
    assert (dev.sacs_distance[dev.goal] == 0).all()


def test_run_conserves_queries_and_bounds():
    p = SacsParams(sacs_radius=5)
    model = SacsModel(p, 11)
    handles = [register(model.world, inv) for inv in sacs_invariants()]
    while not model.finished():
        model.go()
    for h in handles:
        assert violations(h) == []
    m = metrics(model.world)
    assert 0 <= m.nsucc <= m.ntot == 500 and m.nhop >= m.nsucc
    assert model.world.tick <= p.cap
    for a in live_queries(model.world):
        assert 0 <= a.attributes["ttl"] <= p.max_ttl


def test_monotone_guidance():
    p = SacsParams(sacs_radius=4)
    w = setup(p, 5)
    dev = w.globals["devices"]
    before = {q.id: q.attributes["loc"] for q in live_queries(w)}
    step_queries(w, p)
    for q in live_queries(w):
        src = before[q.id]
        assert dev.sacs_distance[q.attributes["loc"]] == dev.sacs_distance[dev.neighbors(src)].min()


def test_mobility_fraction_zero_is_static():
    p = SacsParams(sacs_radius=3, mobility=True, mobile_fraction=0.0)
    w = setup(p, 2)
    pos = w.globals["devices"].pos.copy()
    move_devices(w, p)
    assert np.array_equal(pos, w.globals["devices"].pos)


def test_mobility_fraction_one_moves_all_and_relabels():
    p = SacsParams(width=15, height=15, n_gw=1, n_cs=3, n_srchs=5, sacs_radius=3,
                   mobility=True, mobile_fraction=1.0)
    w = setup(p, 2)
    dev = w.globals["devices"]
    pos = dev.pos.copy()
    move_devices(w, p)
    assert (np.abs(pos - dev.pos).sum(axis=1) > 0).all()
    adj = brute_adjacency(w, dev.pos, p.sens_radius)
    assert dev.sacs_distance.tolist() == oracles.bfs_labels(adj, np.flatnonzero(dev.goal).tolist(), 3)


def test_device_moved_out_of_range_gets_initial_label():
    p = small(sacs_radius=3, mobile_fraction=1.0, step_length=6.0)
    for seed in range(50):
        w = build_field(p, [(10, 10), (11, 10)], goals=[0], seed=seed)
        assert w.globals["devices"].sacs_distance[1] == 1
        move_devices(w, p)
        dev = w.globals["devices"]
        if torus_distance(dev.pos[0], dev.pos[1], 30, 30) > p.sens_radius:
            assert dev.sacs_distance[1] == 3
            return
    pytest.fail("no seed separated the devices")


# Six devices: 0 is the origin, 5 the goal.
#   0 - 1 - 2 - 5
#   |   |
#   3 - 4
SIX = [(10, 10), (11.5, 10), (13, 10), (10, 11.5), (11.5, 11.5), (14.5, 10)]


def enumerate_walks(adj, start, goal, ttl):
    """Exact success probability and expected hop count of one random walk."""
    p_succ, e_hops = 0.0, 0.0
    frontier = [(start, 1.0, 0)]
    while frontier:
        loc, prob, hops = frontier.pop()
        for nxt in adj[loc]:
            q = prob / len(adj[loc])
            if nxt == goal:
                p_succ += q
                e_hops += q * (hops + 1)
            elif hops + 1 == ttl:
                e_hops += q * (hops + 1)
            else:
                frontier.append((nxt, q, hops + 1))
    return p_succ, e_hops


def test_six_device_walks_match_enumeration():
    p = small(max_ttl=3, k=400)
    w0 = build_field(p, SIX, starts=[0], goals=[5])
    adj = brute_adjacency(w0, w0.globals["devices"].pos, p.sens_radius)
    assert adj == [[1, 3], [0, 2, 4], [1, 5], [0, 4], [1, 3], [2]]
    p_succ, e_hops = enumerate_walks(adj, 0, 5, 3)
    assert p_succ == pytest.approx(1 / 12)
    succ, hops, n = 0, 0, 0
    for seed in range(10):
        m = SacsModel(p, seed, world=build_field(p, SIX, starts=[0], goals=[5], seed=seed))
        while not m.finished():
            m.go()
        succ += metrics(m.world).nsucc
        hops += metrics(m.world).nhop
        n += p.k
    se = math.sqrt(p_succ * (1 - p_succ) / n)
    assert abs(succ / n - p_succ) < 4 * se
    assert hops / n == pytest.approx(e_hops, abs=0.05)
