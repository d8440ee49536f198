"""Boids flocking over a field of binary proximity sensors.

Boids steer by separate / align / cohere with capped turns and move one
patch per tick.  Each active sensor reports whether any boid lies within
its sensing radius; the aggregate ``S(t)`` is the number of sensing
active sensors and can never exceed the active count ``N_s(t)``.

Boid and sensor attributes are held column-wise (numpy arrays) since
every tick touches all of them; per-agent views are built on request.
Heading updates are synchronous: every boid steers from the same
snapshot of the flock, then all move.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .engine import ConfigurationError, World, create_world, torus_delta
from .experiment import Model
from .network import ModelManifest


@dataclass
class FlockParams:
    n: int = 1000
    n_boids: int = 50
    visible: bool = True
    max_scen: bool = False
    vision: float = 3.0
    min_separation: float = 1.0
    max_align_turn: float = 5.0
    max_cohere_turn: float = 3.0
    max_separate_turn: float = 1.5
    sensing_radius: float = 1.5
    speed: float = 1.0
    width: int = 33
    height: int = 33
    relax_passes: int = 5
    death_rate: float = 0.0
    schedule: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.n < 0 or self.n_boids < 0:
            raise ConfigurationError("sensor and boid counts must be non-negative")
        if min(self.max_align_turn, self.max_cohere_turn, self.max_separate_turn) < 0:
            raise ConfigurationError("turn caps must be non-negative")
        if self.vision <= self.min_separation:
            raise ConfigurationError("vision must exceed min_separation")
        if self.sensing_radius < 0:
            raise ConfigurationError("sensing_radius must be non-negative")
        if not 0.0 <= self.death_rate <= 1.0:
            raise ConfigurationError("death_rate must lie in [0, 1]")


# -- heading arithmetic (0 = north, clockwise) -------------------------

def subtract_headings(h1, h2):
    """Signed smallest turn taking ``h2`` onto ``h1``, in (-180, 180]."""
    d = np.mod(np.asarray(h1, dtype=float) - np.asarray(h2, dtype=float), 360.0)
    return np.where(d > 180.0, d - 360.0, d)


def normalize(heading):
    """Heading folded into [0, 360); float modulo of a tiny negative gives 360."""
    h = np.mod(heading, 360.0)
    return np.where(h >= 360.0, 0.0, h)


def turn_at_most(heading, turn, cap):
    t = np.clip(turn, -cap, cap)
    return normalize(heading + t)


def heading_of(dx, dy):
    """Heading of the vector (dx, dy); north is +y."""
    return normalize(np.degrees(np.arctan2(dx, dy)))


def turn_towards(own, target, cap):
    return turn_at_most(own, subtract_headings(target, own), cap)


def turn_away(own, other, cap):
    """Turn away from ``other`` by at most ``cap``.

    Identical headings turn clockwise by ``cap``; exact opposition does
    not turn.
    """
    own = np.asarray(own, dtype=float)
    d = subtract_headings(own, other)
    step = np.where(d == 0.0, cap, np.clip(d, -cap, cap))
    step = np.where(np.abs(d) == 180.0, 0.0, step)
    return normalize(own + step)


def circular_mean(headings) -> float | None:
    """Vector-sum mean heading, or None for a zero resultant."""
    r = np.radians(np.asarray(headings, dtype=float))
    x, y = np.sin(r).sum(), np.cos(r).sum()
    if abs(x) < 1e-12 and abs(y) < 1e-12:
        return None
    return float(heading_of(x, y))


# -- state ---------------------------------------------------------------

@dataclass
class Flock:
    boid_ids: np.ndarray
    pos: np.ndarray
    heading: np.ndarray
    nearest: np.ndarray  # index of nearest flockmate, -1 if none
    n_flockmates: np.ndarray
    sensor_ids: np.ndarray
    sensor_pos: np.ndarray
    active: np.ndarray
    sensed: np.ndarray
    mates: tuple = (np.zeros(0, int), np.zeros(0, int))
    pair_delta: tuple = (np.zeros(0), np.zeros(0))
    tree: cKDTree | None = None


def _relax(world: World, pos: np.ndarray, rng, passes: int) -> np.ndarray:
    """Re-draw sensors that sit much closer to another sensor than the mean spacing."""
    n = len(pos)
    if n < 2 or passes <= 0:
        return pos
    d_min = 0.5 * np.sqrt(world.width * world.height / n)
    for _ in range(passes):
        tree = cKDTree(pos, boxsize=(world.width, world.height))
        d, _ = tree.query(pos, k=2)
        crowded = np.flatnonzero(d[:, 1] < d_min)
        if crowded.size == 0:
            break
        # move only one of each crowded pair so the pair actually separates
        crowded = crowded[rng.random(crowded.size) < 0.5]
        pos[crowded] = _uniform(world, rng, crowded.size)
    return pos


def _tdist(world: World, a, b) -> np.ndarray:
    return np.hypot(torus_delta(b[..., 0] - a[..., 0], world.width),
                    torus_delta(b[..., 1] - a[..., 1], world.height))


def _uniform(world: World, rng, n: int) -> np.ndarray:
    p = np.column_stack([rng.uniform(0, world.width, n), rng.uniform(0, world.height, n)])
    return np.mod(p, (world.width, world.height))


def setup(params: FlockParams, seed: int) -> World:
    params.validate()
    world = create_world(params.width, params.height, seed, wrap=True)
    rng = world.rng
    if params.max_scen:
        rows, cols = np.mgrid[0:world.height, 0:world.width]
        spos = np.column_stack([cols.ravel() + 0.5, rows.ravel() + 0.5]).astype(float)
    else:
        spos = _relax(world, _uniform(world, rng, params.n), rng, params.relax_passes)
    ns = len(spos)
    sids = np.array([world.new_id() for _ in range(ns)], dtype=np.int64)
    nb = params.n_boids
    bpos = _uniform(world, rng, nb)
    bhead = rng.uniform(0, 360, nb)
    bids = np.array([world.new_id() for _ in range(nb)], dtype=np.int64)
    flock = Flock(bids, bpos, bhead, np.full(nb, -1), np.zeros(nb, int),
                  sids, spos, np.ones(ns, dtype=bool), np.zeros(ns, dtype=bool))
    world.globals["flock"] = flock
    deactivate_sensors(world, params)
    wsn_sense(world, params)
    return world


def boid_tree(world: World) -> cKDTree:
    """Periodic KD-tree over current boid positions, cached until boids move."""
    f: Flock = world.globals["flock"]
    if f.tree is None:
        p = np.mod(f.pos, (world.width, world.height))
        # float modulo can land on the upper bound, which cKDTree rejects
        p[p >= (world.width, world.height)] = 0.0
        f.pos = p
        f.tree = cKDTree(p, boxsize=(world.width, world.height))
    return f.tree


def find_flockmates(world: World, params: FlockParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Undirected mate pairs (a, b) within vision and their distances.

    Also refreshes each boid's nearest flockmate and flockmate count.
    """
    f: Flock = world.globals["flock"]
    n = len(f.pos)
    empty = np.zeros(0, dtype=np.intp)
    if n < 2:
        f.mates = (empty, empty)
        f.nearest = np.full(n, -1)
        f.n_flockmates = np.zeros(n, int)
        return empty, empty, np.zeros(0)
    tree = boid_tree(world)
    pairs = tree.query_pairs(params.vision, output_type="ndarray")
    a, b = pairs[:, 0], pairs[:, 1]
    dist, idx = tree.query(f.pos, k=2, distance_upper_bound=params.vision)
    # a coincident mate may be listed before the boid itself
    self_first = idx[:, 0] == np.arange(n)
    nearest = np.where(self_first, idx[:, 1], idx[:, 0])
    nearest[nearest >= n] = -1
    f.nearest = nearest
    f.n_flockmates = np.bincount(a, minlength=n) + np.bincount(b, minlength=n)
    f.mates = (a, b)
    dx = torus_delta(f.pos[b, 0] - f.pos[a, 0], world.width)
    dy = torus_delta(f.pos[b, 1] - f.pos[a, 1], world.height)
    f.pair_delta = (dx, dy)
    return a, b, np.hypot(dx, dy)


def move_boids(world: World, params: FlockParams) -> None:
    f: Flock = world.globals["flock"]
    n = len(f.pos)
    if n == 0:
        return
    a, b, d = find_flockmates(world, params)
    h = f.heading
    new = h.copy()
    has = f.nearest >= 0
    if has.any():
        near_d = np.full(n, np.inf)
        idx = np.flatnonzero(has)
        near_d[idx] = _tdist(world, f.pos[idx], f.pos[f.nearest[idx]])
        sep = has & (near_d < params.min_separation)
        flock = has & ~sep
        if sep.any():
            new[sep] = turn_away(h[sep], h[f.nearest[sep]], params.max_separate_turn)
        if flock.any():
            hr = np.radians(h)
            sx, cy_ = np.sin(hr), np.cos(hr)
            ax = np.bincount(a, sx[b], n) + np.bincount(b, sx[a], n)
            ay = np.bincount(a, cy_[b], n) + np.bincount(b, cy_[a], n)
            ok = flock & ~((np.abs(ax) < 1e-12) & (np.abs(ay) < 1e-12))
            new[ok] = turn_towards(h[ok], heading_of(ax[ok], ay[ok]), params.max_align_turn)
            dx, dy = f.pair_delta
            # unit bearing a -> b; b sees the reverse; co-located pairs are skipped
            apart = d > 0
            w = np.where(apart, 1.0 / np.where(apart, d, 1.0), 0.0)
            ux, uy = dx * w, dy * w
            cx = np.bincount(a, ux, n) - np.bincount(b, ux, n)
            cy = np.bincount(a, uy, n) - np.bincount(b, uy, n)
            ok = flock & ~((np.abs(cx) < 1e-12) & (np.abs(cy) < 1e-12))
            new[ok] = turn_towards(new[ok], heading_of(cx[ok], cy[ok]), params.max_cohere_turn)
    new = normalize(new)
    f.heading = new
    r = np.radians(new)
    f.pos = f.pos + params.speed * np.column_stack([np.sin(r), np.cos(r)])
    f.tree = None
    boid_tree(world)


def wsn_sense(world: World, params: FlockParams) -> tuple[int, int]:
    """Refresh every active sensor; returns (S, N_s)."""
    f: Flock = world.globals["flock"]
    if len(f.sensor_pos) == 0 or len(f.pos) == 0:
        f.sensed = np.zeros(len(f.sensor_pos), dtype=bool)
    else:
        # nearest-boid search with a cutoff; the bound is nudged so the disk is closed
        bound = np.nextafter(params.sensing_radius, np.inf)
        d, _ = boid_tree(world).query(f.sensor_pos, k=1, distance_upper_bound=bound)
        f.sensed = np.isfinite(d) & f.active
    s, ns = int(f.sensed.sum()), int(f.active.sum())
    world.globals["sensed"] = s
    world.globals["active_sensors"] = ns
    return s, ns


def deactivate_sensors(world: World, params: FlockParams, tick: int | None = None) -> None:
    """Apply the death schedule for the current tick, then the random death rate.

    ``schedule`` maps tick -> sensor indices; the rate kills each active
    sensor independently with probability ``death_rate`` per step.
    """
    f: Flock = world.globals["flock"]
    tick = world.tick if tick is None else tick
    listed = params.schedule.get(tick)
    if listed is not None:
        f.active[np.asarray(list(listed), dtype=int)] = False
    if params.death_rate > 0 and tick > 0:
        f.active &= world.rng.random(len(f.active)) >= params.death_rate
    f.sensed &= f.active


def _go(world: World, params: FlockParams) -> None:
    move_boids(world, params)
    # the tick counter advances after behaviors, so deaths are keyed on the next tick
    deactivate_sensors(world, params, world.tick + 1)
    wsn_sense(world, params)


class FlockModel(Model):
    def __init__(self, params: FlockParams, seed: int):
        self.params = params
        self.world = setup(params, seed)
        self.behaviors = [lambda w: _go(w, params)]
        g = self.world.globals
        self.reporters = {
            "sensed": lambda: g["sensed"],
            "active_sensors": lambda: g["active_sensors"],
        }


def boid_view(world: World, k: int) -> dict:
    f: Flock = world.globals["flock"]
    a, b = f.mates
    mates = {int(f.boid_ids[m]) for m in np.concatenate([b[a == k], a[b == k]])}
    nn = int(f.nearest[k])
    return {"id": int(f.boid_ids[k]), "position": tuple(f.pos[k]), "heading": float(f.heading[k]),
            "flockmates": mates, "nearest-neighbor": None if nn < 0 else int(f.boid_ids[nn])}


def sensor_view(world: World, k: int, params: FlockParams) -> dict:
    f: Flock = world.globals["flock"]
    near = set()
    if f.active[k] and len(f.pos):
        d = _tdist(world, f.pos, np.broadcast_to(f.sensor_pos[k], f.pos.shape))
        near = {int(f.boid_ids[b]) for b in np.flatnonzero(d <= params.sensing_radius)}
    return {"id": int(f.sensor_ids[k]), "position": tuple(f.sensor_pos[k]),
            "active?": bool(f.active[k]), "sensed?": bool(f.sensed[k]), "boids-near": near}


def flocksense_invariants(params: FlockParams, sample: int = 20):
    from .vomas import Invariant

    def bounded(world, _ctx):
        return 0 <= world.globals["sensed"] <= world.globals["active_sensors"]

    def matches_scan(world, k):
        f: Flock = world.globals["flock"]
        if not f.active[k]:
            return not f.sensed[k]
        if len(f.pos) == 0:
            return not f.sensed[k]
        d = _tdist(world, f.pos, np.broadcast_to(f.sensor_pos[k], f.pos.shape))
        return bool(f.sensed[k]) == bool((d <= params.sensing_radius).any())

    def headings_normal(world, _ctx):
        h = world.globals["flock"].heading
        return bool(((h >= 0) & (h < 360)).all())

    return [
        Invariant("sensed-within-active", bounded),
        Invariant("sensed-matches-scan", matches_scan,
                  contexts=lambda w: range(len(w.globals["flock"].sensor_pos)), sample=sample),
        Invariant("headings-normalized", headings_normal),
    ]


def flocksense_manifest() -> ModelManifest:
    """DREAM manifest of the boids-and-sensors model."""
    plain = ["Setup", "make-wsn", "init-node", "make-reg-wsn", "make-boids", "move-boids",
             "Separate", "Align", "Cohere", "wsn-sense", "do-plot"]
    return ModelManifest(
        input_globals=["N", "n-boids", "visible?", "max-scen?"],
        agent_breeds={"Boid": ["Flockmates", "nearest-neighbor"], "Node": ["Boids-Near", "sensed?"]},
        procedures={**{p: "plain" for p in plain},
                    "Go": "forever", "go80": "forever",
                    "average-flockmate-heading": "reporter",
                    "average-heading-towards-flockmates": "reporter",
                    "sensor-data": "reporter",
                    "turn-away": "argumented", "turn-towards": "argumented",
                    "data-of": "reporter-argumented"},
        experiments=["vary-boids", "vary-sensors"],
    )
