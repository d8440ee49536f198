import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from abmbench.engine import torus_distance
from abmbench.flocksense import (FlockModel, FlockParams, boid_view, circular_mean, find_flockmates,
                                 flocksense_invariants,
                                 move_boids, sensor_view, setup, subtract_headings, turn_away,
                                 turn_towards, wsn_sense)
from abmbench.vomas import register, violations


def place(world, pos, heading):
    f = world.globals["flock"]
    f.pos = np.asarray(pos, dtype=float).reshape(-1, 2)
    f.heading = np.asarray(heading, dtype=float)
    f.nearest = np.full(len(f.pos), -1)
    f.tree = None


def circ_var(h):
    r = np.radians(h)
    return 1 - np.hypot(np.sin(r).mean(), np.cos(r).mean())


def test_heading_helpers():
    assert subtract_headings(10, 350) == 20
    assert subtract_headings(350, 10) == -20
    assert subtract_headings(0, 180) == 180
    assert circular_mean([0, 90]) == pytest.approx(45)
    assert circular_mean([0, 180]) is None
    assert abs(subtract_headings(circular_mean([350, 10]), 0)) < 1e-9


def test_rule_examples():
    assert turn_towards(40, circular_mean([0, 90]), 5) == pytest.approx(45)
    # flockmate due north: bearing from mate to self is 180, plus 180 gives 0
    assert turn_towards(10, (180 + 180) % 360, 3) == pytest.approx(7)
    assert turn_away(90, 90, 1.5) == pytest.approx(91.5)
    assert turn_away(90, 270, 1.5) == pytest.approx(90)
    assert turn_away(90, 80, 1.5) == pytest.approx(91.5)
    assert turn_away(90, 100, 1.5) == pytest.approx(88.5)
    assert turn_away(90, 90, 0) == 90
    assert turn_towards(40, 45, 0) == 40


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 359.99), st.floats(0, 359.99), st.floats(0, 30))
def test_turns_capped_and_normalized(own, target, cap):
    for new in (turn_towards(own, target, cap), turn_away(own, target, cap)):
        assert 0 <= new < 360
        assert abs(subtract_headings(new, own)) <= cap + 1e-9


def test_max_scen_grid():
    w = setup(FlockParams(width=10, height=10, max_scen=True, n_boids=0), 1)
    f = w.globals["flock"]
    assert len(f.sensor_pos) == 100
    assert set(map(tuple, f.sensor_pos)) == {(c + 0.5, r + 0.5) for r in range(10) for c in range(10)}


def test_setup_deterministic():
    a = setup(FlockParams(n=50, n_boids=10), 9).globals["flock"]
    b = setup(FlockParams(n=50, n_boids=10), 9).globals["flock"]
    assert np.array_equal(a.pos, b.pos) and np.array_equal(a.sensor_pos, b.sensor_pos)
    assert np.array_equal(a.heading, b.heading) and a.active.all()


def test_no_boids_never_sensed():
    m = FlockModel(FlockParams(n=100, n_boids=0), 2)
    for _ in range(20):
        m.go()
        assert m.world.globals["sensed"] == 0


def test_lone_boid_flies_straight():
    p = FlockParams(n=0, n_boids=1)
    w = setup(p, 1)
    place(w, [(5.0, 5.0)], [90.0])
    for _ in range(10):
        move_boids(w, p)
    f = w.globals["flock"]
    assert f.heading[0] == 90.0 and f.pos[0] == pytest.approx((15.0, 5.0))


def test_distant_boids_independent():
    p = FlockParams(n=0, n_boids=2)
    w = setup(p, 1)
    place(w, [(5.0, 5.0), (20.0, 20.0)], [0.0, 180.0])
    for _ in range(5):
        move_boids(w, p)
    f = w.globals["flock"]
    assert list(f.heading) == [0.0, 180.0]
    assert f.pos[0] == pytest.approx((5.0, 10.0)) and f.pos[1] == pytest.approx((20.0, 15.0))


def test_pair_align_and_cohere():
    p = FlockParams(n=0, n_boids=2)
    w = setup(p, 1)
    place(w, [(10.0, 10.0), (10.0, 12.0)], [10.0, 10.0])
    move_boids(w, p)
    f = w.globals["flock"]
    # the lower boid turns toward its northern mate, the upper one toward the south
    assert f.heading == pytest.approx([7.0, 13.0])


def test_pair_separates():
    p = FlockParams(n=0, n_boids=2)
    w = setup(p, 1)
    place(w, [(10.0, 10.0), (10.0, 10.5)], [90.0, 90.0])
    move_boids(w, p)
    assert w.globals["flock"].heading == pytest.approx([91.5, 91.5])


def test_nearest_is_flockmate():
    p = FlockParams(n=10, n_boids=60)
    w = setup(p, 4)
    move_boids(w, p)
    find_flockmates(w, p)
    f = w.globals["flock"]
    for k in range(len(f.pos)):
        v = boid_view(w, k)
        if v["flockmates"]:
            assert v["nearest-neighbor"] in v["flockmates"]
            d = [torus_distance(f.pos[k], f.pos[j], 33, 33) for j in range(len(f.pos)) if j != k]
            assert torus_distance(f.pos[k], f.pos[f.nearest[k]], 33, 33) == pytest.approx(min(d))
        else:
            assert v["nearest-neighbor"] is None


def test_one_boid_two_sensors():
    p = FlockParams(n=3, n_boids=1, relax_passes=0)
    w = setup(p, 1)
    f = w.globals["flock"]
    f.sensor_pos = np.array([(10.0, 10.0), (11.0, 10.0), (20.0, 20.0)])
    place(w, [(10.5, 10.0)], [0.0])
    assert wsn_sense(w, p) == (2, 3)
    assert sensor_view(w, 0, p)["boids-near"] == {int(f.boid_ids[0])}


def test_sensing_matches_brute_scan():
    p = FlockParams(n=200, n_boids=40)
    m = FlockModel(p, 6)
    for _ in range(30):
        m.go()
        f = m.world.globals["flock"]
        for k in range(len(f.sensor_pos)):
            near = any(torus_distance(f.sensor_pos[k], b, 33, 33) <= p.sensing_radius for b in f.pos)
            assert bool(f.sensed[k]) == (near and bool(f.active[k]))


def test_invariants_hold_over_100_ticks():
    p = FlockParams(n=300, n_boids=50, death_rate=0.01)
    m = FlockModel(p, 3)
    handles = [register(m.world, inv) for inv in flocksense_invariants(p, sample=None)]
    for _ in range(100):
        m.go()
        assert m.world.globals["sensed"] <= m.world.globals["active_sensors"]
    for h in handles:
        assert violations(h) == []


def test_empty_schedule_keeps_sensors():
    m = FlockModel(FlockParams(n=100, n_boids=20), 1)
    for _ in range(20):
        m.go()
        assert m.world.globals["active_sensors"] == 100


def test_kill_all_at_tick_10():
    m = FlockModel(FlockParams(n=100, n_boids=50, schedule={10: range(100)}), 1)
    for _ in range(20):
        m.go()
        t = m.world.tick
        assert m.world.globals["active_sensors"] == (100 if t < 10 else 0)
        if t >= 10:
            assert m.world.globals["sensed"] == 0


def test_death_rate_geometric_decay():
    n, r, t = 200, 0.05, 20
    counts = []
    for seed in range(50):
        m = FlockModel(FlockParams(n=n, n_boids=5, death_rate=r), seed)
        for _ in range(t):
            m.go()
        counts.append(m.world.globals["active_sensors"])
    expect = n * (1 - r) ** t
    assert abs(np.mean(counts) - expect) <= 0.05 * expect


def test_flock_forms():
    m = FlockModel(FlockParams(n=0, n_boids=50), 1)
    before = circ_var(m.world.globals["flock"].heading)
    for _ in range(1000):
        m.go()
    assert circ_var(m.world.globals["flock"].heading) < before


def test_sensed_proportional_to_sensor_count():
    ratios = []
    for n in (100, 500, 1000):
        vals = []
        for seed in range(10):
            m = FlockModel(FlockParams(n=n), seed)
            acc = 0
            for _ in range(200):
                m.go()
                acc += m.world.globals["sensed"]
            vals.append(acc / 200 / n)
        ratios.append(np.mean(vals))
    assert max(ratios) <= 1.15 * min(ratios)
