"""Discrete-time world, agent registry and scheduler shared by every model.

Randomness comes from numpy's PCG64 bit generator.  Each run owns one model
stream seeded from the run seed; per-tick iteration orders and observer
sampling draw from separate child streams so that they never shift the model
stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

ORDER_STREAM = 0x6F72646572  # "order"
OBSERVER_STREAM = 0x766F6D6173  # "vomas"


class ConfigurationError(ValueError):
    """Invalid world or model configuration."""


class ModelError(RuntimeError):
    """A behavior failed while stepping a world."""

    def __init__(self, message: str, run_id: Any = None):
        super().__init__(message)
        self.run_id = run_id

    def __str__(self) -> str:
        base = super().__str__()
        return base if self.run_id is None else f"run {self.run_id}: {base}"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed`` (and optional child stream keys)."""
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


@dataclass
class Agent:
    id: int
    breed: str
    position: tuple[float, float] = (0.0, 0.0)
    heading: float = 0.0
    attributes: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.heading = normalize_heading(self.heading)


@dataclass
class World:
    width: int
    height: int
    seed: int
    wrap: bool = True
    tick: int = 0
    patches: dict[str, np.ndarray] = field(default_factory=dict)
    agents: dict[int, Agent] = field(default_factory=dict)
    globals: dict[str, Any] = field(default_factory=dict)
    observers: list[Any] = field(default_factory=list)
    run_id: Any = None
    rng: np.random.Generator = field(init=False, repr=False)
    _next_id: int = field(default=0, init=False, repr=False)

    def __post_init__(self) -> None:
        self.rng = make_rng(self.seed)

    # -- registry -------------------------------------------------------
    def new_id(self) -> int:
        """Allocate an id; ids are never reused within a run."""
        i = self._next_id
        self._next_id += 1
        return i

    def spawn(self, breed: str, position=(0.0, 0.0), heading: float = 0.0, **attributes) -> Agent:
        agent = Agent(self.new_id(), breed, self.wrap_position(position), heading, dict(attributes))
        self.agents[agent.id] = agent
        return agent

    def kill(self, agent_id: int) -> None:
        self.agents.pop(agent_id, None)

    def breed(self, name: str) -> list[Agent]:
        return [a for a in self.agents.values() if a.breed == name]

    # -- geometry -------------------------------------------------------
    def wrap_position(self, position) -> tuple[float, float]:
        x, y = float(position[0]), float(position[1])
        if self.wrap:
            x %= self.width
            y %= self.height
            # float modulo can land exactly on the upper bound
            if x >= self.width:
                x = 0.0
            if y >= self.height:
                y = 0.0
        return (x, y)

    def move_agent(self, agent: Agent, position) -> None:
        agent.position = self.wrap_position(position)

    def distance(self, a, b) -> float:
        return float(torus_distance(a, b, self.width, self.height) if self.wrap
                     else math.hypot(a[0] - b[0], a[1] - b[1]))

    def patch_layer(self, name: str, fill=0.0, dtype=float) -> np.ndarray:
        """Return (creating if needed) a ``height x width`` patch attribute layer."""
        if name not in self.patches:
            self.patches[name] = np.full((self.height, self.width), fill, dtype=dtype)
        return self.patches[name]

    # -- scheduling helpers -------------------------------------------
    def iteration_order(self, ids: Iterable[int]) -> list[int]:
        """Deterministic shuffle of ``ids`` keyed on (seed, tick)."""
        ordered = sorted(ids)
        if len(ordered) < 2:
            return ordered
        perm = make_rng(self.seed, ORDER_STREAM, self.tick).permutation(len(ordered))
        return [ordered[i] for i in perm]


def normalize_heading(h: float) -> float:
    h = float(h) % 360.0
    return 0.0 if h >= 360.0 else h


def torus_delta(d, size):
    """Signed shortest displacement along one wrapped axis."""
    d = np.asarray(d, dtype=float)
    return d - size * np.round(d / size)


def torus_distance(a, b, width: float, height: float):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dx = torus_delta(b[..., 0] - a[..., 0], width)
    dy = torus_delta(b[..., 1] - a[..., 1], height)
    return np.hypot(dx, dy)


def create_world(width: int, height: int, seed: int, wrap: bool = True) -> World:
    if int(width) < 1 or int(height) < 1:
        raise ConfigurationError(f"world dimensions must be positive, got {width}x{height}")
    return World(int(width), int(height), int(seed), wrap=wrap)


def agents_in_radius(world: World, center, radius: float, breed: str | None = None) -> set[int]:
    """Ids of agents whose (toroidal) distance to ``center`` is <= ``radius``."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    candidates = [a for a in world.agents.values() if breed is None or a.breed == breed]
    if not candidates:
        return set()
    pos = np.array([a.position for a in candidates], dtype=float)
    c = np.asarray(center, dtype=float)
    if world.wrap:
        d = torus_distance(c, pos, world.width, world.height)
    else:
        d = np.hypot(pos[:, 0] - c[0], pos[:, 1] - c[1])
    return {a.id for a, di in zip(candidates, d) if di <= radius}


Behavior = Callable[[World], Any]


def step(world: World, behaviors: Sequence[Behavior]) -> World:
    """Run each behavior once in order, advance the tick, then notify observers."""
    for behavior in behaviors:
        try:
            behavior(world)
        except ModelError as exc:
            if exc.run_id is None:
                exc.run_id = world.run_id
            raise
        except Exception as exc:
            name = getattr(behavior, "__name__", repr(behavior))
            raise ModelError(f"behavior {name!r} failed at tick {world.tick}: {exc}",
                             world.run_id) from exc
    world.tick += 1
    for observer in world.observers:
        observer.observe(world)
    return world
