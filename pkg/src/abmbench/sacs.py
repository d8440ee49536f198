"""Content search among scattered devices with self-advertising content sources.

Devices sit roughly one per patch on a torus.  Content sources (goals)
flood hop-count labels up to ``sacs_radius`` hops; query walkers launched
from search origins descend those labels, or walk at random where the
labels are flat.  Reaching a goal or a gateway counts as success.

Devices are stored column-wise (one numpy array per attribute) because
the gradient and neighbor queries run over all of them at once; queries
are ordinary registry agents.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .engine import ConfigurationError, World, create_world
from .experiment import Model


class SetupError(ConfigurationError):
    pass


@dataclass
class SacsParams:
    width: int = 50
    height: int = 50
    device_probability: float = 100.0
    jitter: float = 0.5
    n_gw: int = 10
    n_cs: int = 10
    n_srchs: int = 100
    k: int = 5
    max_ttl: int = 10
    sacs_radius: int = 0
    sens_radius: float = 2.0
    gw_cost: int = 10
    mobility: bool = False
    mobile_fraction: float = 0.05
    step_length: float = 1.0
    tick_cap: int | None = None

    def validate(self) -> None:
        if self.max_ttl < 1:
            raise ConfigurationError("max_ttl must be at least 1")
        if self.sacs_radius < 0:
            raise ConfigurationError("sacs_radius must be non-negative")
        if self.k < 0 or self.n_gw < 0 or self.n_cs < 0 or self.n_srchs < 0:
            raise ConfigurationError("role counts must be non-negative")
        if not 0 <= self.device_probability <= 100:
            raise ConfigurationError("device_probability must lie in [0, 100]")
        if not 0 <= self.mobile_fraction <= 1:
            raise ConfigurationError("mobile_fraction must lie in [0, 1]")
        if self.sens_radius < 0:
            raise ConfigurationError("sens_radius must be non-negative")

    @property
    def cap(self) -> int:
        return self.tick_cap if self.tick_cap is not None else 10 * self.max_ttl


@dataclass
class Devices:
    ids: np.ndarray
    pos: np.ndarray
    gateway: np.ndarray
    start: np.ndarray
    goal: np.ndarray
    explored: np.ndarray
    sacs_distance: np.ndarray
    indptr: np.ndarray = field(default=None, repr=False)
    indices: np.ndarray = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.ids)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def record(self, i: int) -> dict:
        return {"id": int(self.ids[i]), "position": tuple(self.pos[i]),
                "gateway?": bool(self.gateway[i]), "start?": bool(self.start[i]),
                "goal?": bool(self.goal[i]), "explored?": bool(self.explored[i]),
                "sacs-distance": int(self.sacs_distance[i])}


def rebuild_neighbors(world: World, devices: Devices, sens_radius: float) -> None:
    """CSR adjacency of the proximity graph (toroidal distance <= sens_radius)."""
    n = len(devices)
    if n == 0:
        devices.indptr = np.zeros(1, dtype=np.int64)
        devices.indices = np.zeros(0, dtype=np.int64)
        return
    box = (world.width, world.height) if world.wrap else None
    pts = np.mod(devices.pos, (world.width, world.height)) if world.wrap else devices.pos
    tree = cKDTree(pts, boxsize=box)
    pairs = tree.query_pairs(sens_radius, output_type="ndarray")
    src = np.concatenate([pairs[:, 0], pairs[:, 1]])
    dst = np.concatenate([pairs[:, 1], pairs[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    devices.indptr = np.concatenate([[0], np.cumsum(np.bincount(src, minlength=n))]).astype(np.int64)
    devices.indices = dst.astype(np.int64)


def _pick(rng, candidates: np.ndarray, count: int, what: str) -> np.ndarray:
    if count > len(candidates):
        raise SetupError(f"need {count} {what} but only {len(candidates)} eligible devices")
    return np.sort(rng.choice(candidates, size=count, replace=False)) if count else np.zeros(0, int)


def setup(params: SacsParams, seed: int) -> World:
    params.validate()
    world = create_world(params.width, params.height, seed, wrap=True)
    rng = world.rng
    sprout = rng.random((params.height, params.width)) * 100 < params.device_probability
    rows, cols = np.nonzero(sprout)
    n = len(rows)
    pos = np.column_stack([cols + 0.5, rows + 0.5]).astype(float)
    if n:
        pos += rng.uniform(-params.jitter, params.jitter, (n, 2))
        pos %= (params.width, params.height)
    devices = _add_devices(world, params, pos)

    everyone = np.arange(n)
    devices.gateway[_pick(rng, everyone, params.n_gw, "gateways")] = True
    _separate_gateways(world, devices, rng)
    devices.start[_pick(rng, everyone[~devices.gateway], params.n_srchs, "search origins")] = True
    devices.goal[_pick(rng, everyone[~devices.gateway & ~devices.start], params.n_cs,
                       "content sources")] = True
    _launch(world, params)
    return world


def build_field(params: SacsParams, positions, gateways=(), starts=(), goals=(),
                seed: int = 0) -> World:
    """Device field with hand-placed devices and roles (indices into ``positions``)."""
    params.validate()
    world = create_world(params.width, params.height, seed, wrap=True)
    devices = _add_devices(world, params, np.asarray(positions, dtype=float).reshape(-1, 2))
    for flags, which in ((devices.gateway, gateways), (devices.start, starts), (devices.goal, goals)):
        flags[list(which)] = True
    if ((devices.gateway.astype(int) + devices.start + devices.goal) > 1).any():
        raise SetupError("a device can hold at most one role")
    _launch(world, params)
    return world


def _add_devices(world: World, params: SacsParams, pos: np.ndarray) -> Devices:
    n = len(pos)
    ids = np.array([world.new_id() for _ in range(n)], dtype=np.int64)
    flags = lambda: np.zeros(n, dtype=bool)  # noqa: E731
    devices = Devices(ids, pos, flags(), flags(), flags(), flags(),
                      np.full(n, params.sacs_radius, dtype=np.int64))
    world.globals["devices"] = devices
    return devices


def _launch(world: World, params: SacsParams) -> None:
    """Neighbor structure, k walkers per origin, and the initial gradient."""
    devices: Devices = world.globals["devices"]
    rebuild_neighbors(world, devices, params.sens_radius)
    world.globals.update(nsucc=0, ntot=0, nhop=0, ndead=0, successes=[])
    for i in np.flatnonzero(devices.start):
        for _ in range(params.k):
            world.spawn("query", tuple(devices.pos[i]), loc=int(i), ttl=params.max_ttl, target="content")
            world.globals["ntot"] += 1
    establish_gradient(world, params)


def _separate_gateways(world: World, devices: Devices, rng) -> None:
    """Nudge gateways off any device sitting at exactly the same spot."""
    for g in np.flatnonzero(devices.gateway):
        for _ in range(1000):
            d = np.abs(devices.pos - devices.pos[g]).sum(axis=1)
            d[g] = np.inf
            if d.min() > 1e-9:
                break
            theta = rng.uniform(0, 2 * np.pi)
            devices.pos[g] = (devices.pos[g] + 0.01 * np.array([np.sin(theta), np.cos(theta)])) \
                % (world.width, world.height)


def establish_gradient(world: World, params: SacsParams) -> None:
    """Multi-source breadth-first hop labels from every goal, capped at sacs_radius.

    Devices farther than ``sacs_radius`` hops keep the initial value
    ``sacs_radius``.
    """
    dev: Devices = world.globals["devices"]
    dev.explored[:] = False
    dev.sacs_distance[:] = params.sacs_radius
    frontier = deque()
    for g in np.flatnonzero(dev.goal):
        dev.sacs_distance[g] = 0
        dev.explored[g] = True
        frontier.append((int(g), 0))
    while frontier:
        i, d = frontier.popleft()
        if d >= params.sacs_radius:
            continue
        for j in dev.neighbors(i):
            if not dev.explored[j]:
                dev.explored[j] = True
                dev.sacs_distance[j] = min(dev.sacs_distance[j], d + 1)
                frontier.append((int(j), d + 1))


def live_queries(world: World) -> list:
    return sorted((a for a in world.agents.values() if a.breed == "query"), key=lambda a: a.id)


def step_queries(world: World, params: SacsParams) -> None:
    dev: Devices = world.globals["devices"]
    g = world.globals
    rng = world.rng
    for qid in world.iteration_order(q.id for q in live_queries(world)):
        q = world.agents[qid]
        nbrs = dev.neighbors(q.attributes["loc"])
        if len(nbrs) == 0:
            world.kill(qid)
            g["ndead"] += 1
            continue
        if params.sacs_radius > 0:
            labels = dev.sacs_distance[nbrs]
            nbrs = nbrs[labels == labels.min()]
        nxt = int(nbrs[rng.integers(len(nbrs))]) if len(nbrs) > 1 else int(nbrs[0])
        q.attributes["loc"] = nxt
        q.position = tuple(dev.pos[nxt])
        q.attributes["ttl"] -= 1
        g["nhop"] += params.gw_cost if dev.gateway[nxt] else 1
        if dev.goal[nxt] or dev.gateway[nxt]:
            g["nsucc"] += 1
            g["successes"].append((world.tick + 1, qid, nxt))
            world.kill(qid)
            g["ndead"] += 1
        elif q.attributes["ttl"] <= 0:
            world.kill(qid)
            g["ndead"] += 1


def move_devices(world: World, params: SacsParams) -> None:
    """Brownian unit steps for a fraction of devices, then a fresh gradient."""
    dev: Devices = world.globals["devices"]
    n_move = int(round(params.mobile_fraction * len(dev)))
    if n_move == 0:
        return
    rng = world.rng
    movers = np.sort(rng.choice(len(dev), size=n_move, replace=False))
    theta = rng.uniform(0, 2 * np.pi, n_move)
    step = params.step_length * np.column_stack([np.sin(theta), np.cos(theta)])
    dev.pos[movers] = (dev.pos[movers] + step) % (world.width, world.height)
    for q in live_queries(world):
        q.position = tuple(dev.pos[q.attributes["loc"]])
    rebuild_neighbors(world, dev, params.sens_radius)
    establish_gradient(world, params)


@dataclass(frozen=True)
class SacsMetrics:
    nsucc: int
    ntot: int
    nhop: int


def metrics(world: World) -> SacsMetrics:
    g = world.globals
    return SacsMetrics(g["nsucc"], g["ntot"], g["nhop"])


class SacsModel(Model):
    def __init__(self, params: SacsParams, seed: int, world: World | None = None):
        self.params = params
        self.world = setup(params, seed) if world is None else world
        self.behaviors = []
        if params.mobility:
            self.behaviors.append(lambda w: move_devices(w, params))
        self.behaviors.append(lambda w: step_queries(w, params))
        g = self.world.globals
        self.reporters = {
            "nsucc": lambda: g["nsucc"],
            "ntot": lambda: g["ntot"],
            "nhop": lambda: g["nhop"],
        }

    def finished(self) -> bool:
        return self.world.globals["ntot"] == self.world.globals["ndead"] or \
            self.world.tick >= self.params.cap


def sacs_invariants():
    from .vomas import Invariant

    def successes_valid(world, _ctx):
        dev = world.globals["devices"]
        return all(dev.goal[loc] or dev.gateway[loc]
                   for tick, _q, loc in world.globals["successes"] if tick == world.tick)

    def conserved(world, _ctx):
        g = world.globals
        live = sum(1 for a in world.agents.values() if a.breed == "query")
        return g["ntot"] == g["ndead"] + live and 0 <= g["nsucc"] <= g["ntot"]

    return [
        Invariant("success-at-goal-or-gateway", successes_valid),
        Invariant("query-conservation", conserved),
    ]
