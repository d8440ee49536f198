"""Forest-fire cellular automaton with regrowth, weather and an FWI field.

Grid layers live on ``world.patches`` as ``height x width`` arrays indexed
``[row, col]``; cell ``(row, col)`` has its center at ``(col + 0.5,
row + 0.5)``.  The grid does not wrap.

Per tick the fire update runs in this order: dying cells burn out,
started cells begin spreading, spreading cells ignite their four
neighbors, age, and die once their age reaches ``intensity``, then a new
fire may start at a random tree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..engine import ConfigurationError, World, create_world
from ..experiment import Model
from . import indices as fw

UNBURNED, STARTED, SPREADING, DYING, BURNED = range(5)
STATE_NAMES = ("Unburned", "Started", "Spreading", "Dying", "Burned")

# (row offset, col offset, heading of that neighbor); heading 0 is up (+row).
NEIGHBORS = ((1, 0, 0.0), (0, 1, 90.0), (-1, 0, 180.0), (0, -1, 270.0))


@dataclass(frozen=True)
class WeatherEvent:
    """Rain or snow over the inclusive cell box ``(col0, row0, col1, row1)``."""

    tick: int
    kind: str
    region: tuple[int, int, int, int]
    magnitude: float

    def __post_init__(self) -> None:
        if self.kind not in ("rain", "snow"):
            raise ConfigurationError(f"unknown weather kind {self.kind!r}")
        if self.magnitude < 0:
            raise ConfigurationError("weather magnitude must be non-negative")


@dataclass
class FireParams:
    width: int = 100
    height: int = 100
    p_cov: float = 68.0
    p_fire: float = 1.0
    intensity: int = 5
    p_spread: float = 0.45
    wind_direction: float = 0.0
    wind_speed: float = 20.0
    downwind_factor: float = 2.0
    upwind_factor: float = 0.5
    regrowth_rate: float = 0.005
    regrowth_period: int = 24
    t_ave: float = 30.0
    h_ave: float = 20.0
    t_jitter: float = 1.0
    h_jitter: float = 2.0
    heat_delta: float = 200.0
    heat_decay: float = 0.5
    fwi_period: int = 24
    month: int = 7
    ignition_gate: bool = False
    gate_threshold: float = 10.0
    weather: list[WeatherEvent] = field(default_factory=list)

    def validate(self) -> None:
        if not (0 <= self.p_cov <= 100 and 0 <= self.p_fire <= 100):
            raise ConfigurationError("p_cov and p_fire must lie in [0, 100]")
        if self.intensity < 1:
            raise ConfigurationError("intensity must be at least 1")
        if not 0 <= self.regrowth_rate <= 1:
            raise ConfigurationError("regrowth_rate must lie in [0, 1]")
        if self.regrowth_period < 1 or self.fwi_period < 1:
            raise ConfigurationError("periods must be at least 1 tick")
        if not 0 <= self.h_ave <= 100:
            raise ConfigurationError("h_ave must lie in [0, 100]")


def spread_factors(params: FireParams) -> dict[float, float]:
    """Ignition multiplier per neighbor heading given the wind direction."""
    out = {}
    for _, _, heading in NEIGHBORS:
        c = math.cos(math.radians(heading - params.wind_direction))
        if c > 0.5:
            out[heading] = params.downwind_factor
        elif c < -0.5:
            out[heading] = params.upwind_factor
        else:
            out[heading] = 1.0
    return out


def _shift(a: np.ndarray, dr: int, dc: int, fill=False) -> np.ndarray:
    """``out[r, c] = a[r - dr, c - dc]`` without wrapping."""
    out = np.full_like(a, fill)
    h, w = a.shape
    rs = slice(max(dr, 0), h + min(dr, 0))
    cs = slice(max(dc, 0), w + min(dc, 0))
    rs_src = slice(max(-dr, 0), h + min(-dr, 0))
    cs_src = slice(max(-dc, 0), w + min(-dc, 0))
    out[rs, cs] = a[rs_src, cs_src]
    return out


def create_forest(params: FireParams, seed: int) -> World:
    params.validate()
    world = create_world(params.width, params.height, seed, wrap=False)
    rng = world.rng
    shape = (params.height, params.width)
    world.patches["tree"] = rng.random(shape) < params.p_cov / 100.0
    world.patches["state"] = np.zeros(shape, dtype=np.int8)
    world.patches["tic"] = np.zeros(shape, dtype=np.int32)
    world.patches["ambient_temperature"] = params.t_ave + rng.uniform(-1, 1, shape) * params.t_jitter
    world.patches["humidity"] = np.clip(params.h_ave + rng.uniform(-1, 1, shape) * params.h_jitter, 0, 100)
    world.patches["heat"] = np.zeros(shape)
    world.patches["rain_mm"] = np.zeros(shape)
    world.globals.update(burned_area=0, ignitions=0, low_danger_ignitions=0)
    update_fwi_field(world, params, first=True)
    return world


def temperature(world: World) -> np.ndarray:
    return world.patches["ambient_temperature"] + world.patches["heat"]


def update_fwi_field(world: World, params: FireParams, first: bool = False) -> None:
    """Advance every cell's moisture codes by one FWI day from ambient weather."""
    p = world.patches
    shape = p["tree"].shape
    if first:
        p["ffmc"] = np.full(shape, fw.FFMC_START)
        p["dmc"] = np.full(shape, fw.DMC_START)
        p["dc"] = np.full(shape, fw.DC_START)
    inputs = fw.FwiInputs(p["ambient_temperature"], p["humidity"], params.wind_speed,
                          p["rain_mm"], params.month)
    p["ffmc"] = fw.ffmc(p["ffmc"], inputs)
    p["dmc"] = fw.dmc(p["dmc"], inputs)
    p["dc"] = fw.dc(p["dc"], inputs)
    p["fwi"] = fw.fwi(fw.isi(p["ffmc"], params.wind_speed), fw.bui(p["dmc"], p["dc"]))
    p["rain_mm"][:] = 0.0


def burning(world: World) -> np.ndarray:
    s = world.patches["state"]
    return (s == STARTED) | (s == SPREADING)


def _ignite(world: World, mask: np.ndarray, params: FireParams) -> None:
    p = world.patches
    p["state"][mask] = STARTED
    n = int(mask.sum())
    world.globals["ignitions"] += n
    world.globals["low_danger_ignitions"] += int((mask & (p["fwi"] < params.gate_threshold)).sum())


def start_fire(world: World, row: int, col: int, params: FireParams) -> bool:
    """Ignite one cell by hand (used by detection experiments)."""
    p = world.patches
    if not (p["tree"][row, col] and p["state"][row, col] == UNBURNED):
        return False
    mask = np.zeros_like(p["tree"])
    mask[row, col] = True
    _ignite(world, mask, params)
    return True


def step_fire(world: World, params: FireParams) -> None:
    p = world.patches
    state, tic, tree = p["state"], p["tic"], p["tree"]
    rng = world.rng

    dying = state == DYING
    state[dying] = BURNED
    tree[dying] = False
    tic[dying] = 0
    world.globals["burned_area"] += int(dying.sum())

    state[state == STARTED] = SPREADING
    spreading = state == SPREADING

    fuel = tree & (state == UNBURNED)
    if params.ignition_gate:
        fuel &= p["fwi"] >= params.gate_threshold
    new = np.zeros_like(fuel)
    factors = spread_factors(params)
    for dr, dc, heading in NEIGHBORS:
        cand = _shift(spreading, dr, dc) & fuel & ~new
        n = int(cand.sum())
        if n:
            prob = min(1.0, params.p_spread * factors[heading])
            hit = rng.random(n) < prob
            idx = np.flatnonzero(cand)[hit]
            new.flat[idx] = True
    tic[spreading] += 1
    state[spreading & (tic >= params.intensity)] = DYING
    if new.any():
        _ignite(world, new, params)

    if rng.random() < params.p_fire / 100.0:
        fuel = tree & (state == UNBURNED)
        if params.ignition_gate:
            fuel &= p["fwi"] >= params.gate_threshold
        cells = np.flatnonzero(fuel)
        if cells.size:
            mask = np.zeros_like(fuel)
            mask.flat[cells[rng.integers(cells.size)]] = True
            _ignite(world, mask, params)


def step_regrowth(world: World, params: FireParams) -> None:
    if (world.tick + 1) % params.regrowth_period:
        return
    p = world.patches
    empty = ~p["tree"]
    n = int(empty.sum())
    if n == 0 or params.regrowth_rate == 0:
        return
    grow = np.flatnonzero(empty)[world.rng.random(n) < params.regrowth_rate]
    p["tree"].flat[grow] = True
    p["state"].flat[grow] = UNBURNED


def apply_weather(world: World, event: WeatherEvent) -> None:
    """Rain adds humidity and rain; snow adds humidity and cools the region."""
    p = world.patches
    c0, r0, c1, r1 = event.region
    c0, r0 = max(c0, 0), max(r0, 0)
    c1, r1 = min(c1, world.width - 1), min(r1, world.height - 1)
    if c1 < c0 or r1 < r0:
        return
    box = (slice(r0, r1 + 1), slice(c0, c1 + 1))
    shape = (r1 - r0 + 1, c1 - c0 + 1)
    dh = event.magnitude * world.rng.uniform(0.5, 1.0, shape)
    p["humidity"][box] = np.minimum(p["humidity"][box] + dh, 100.0)
    if event.kind == "rain":
        p["rain_mm"][box] += event.magnitude * world.rng.uniform(0.5, 1.0, shape)
    else:
        p["ambient_temperature"][box] -= event.magnitude * world.rng.uniform(0.5, 1.0, shape)


def step_heat(world: World, params: FireParams) -> None:
    heat = world.patches["heat"]
    lit = burning(world)
    heat *= params.heat_decay
    heat[lit] = params.heat_delta


def step_fwi(world: World, params: FireParams) -> None:
    """Daily FWI update; with the gate on, fires in cells that drop below it go out."""
    if (world.tick + 1) % params.fwi_period:
        return
    update_fwi_field(world, params)
    if params.ignition_gate:
        p = world.patches
        out = burning(world) & (p["fwi"] < params.gate_threshold)
        p["state"][out] = DYING


class ForestFireModel(Model):
    """Forest fire with optional sensor overlay (see :mod:`.sensors`)."""

    def __init__(self, params: FireParams, seed: int, overlay=None):
        from .sensors import sensor_sample  # local import: sensors builds on this module

        self.params = params
        self.world = create_forest(params, seed)
        self.overlay = overlay(self.world) if callable(overlay) else overlay
        events: dict[int, list[WeatherEvent]] = {}
        for ev in params.weather:
            events.setdefault(ev.tick, []).append(ev)

        def weather(world):
            for ev in events.get(world.tick, ()):
                apply_weather(world, ev)

        self.behaviors = [
            weather,
            lambda w: step_fire(w, params),
            lambda w: step_regrowth(w, params),
            lambda w: step_heat(w, params),
        ]
        if self.overlay is not None:
            self.behaviors.append(lambda w: sensor_sample(w, self.overlay, params.fwi_period))
        self.behaviors.append(lambda w: step_fwi(w, params))
        self.reporters = {
            "burned_area": lambda: self.world.globals["burned_area"],
            "max_detected_fwi": lambda: 0.0 if self.overlay is None else self.overlay.max_fwi,
            "first_detection_tick": lambda: -1 if self.overlay is None else self.overlay.first_detection,
            "violations_count": lambda: self.world.globals["low_danger_ignitions"],
        }


def fire_danger_invariant(sample: int | None = 100, every: int = 1):
    """Burning cells must sit in High or worse fire danger.

    Contexts are burning cells as flat indices; ``sample`` of them are
    checked per evaluation.
    """
    from ..vomas import Invariant

    def contexts(world):
        return np.flatnonzero(burning(world)).tolist()

    def pre(world, ctx):
        return bool(burning(world).flat[ctx])

    def post(world, ctx):
        return fw.classify_danger(world.patches["fwi"].flat[ctx]) >= fw.Danger.HIGH

    def details(world, ctx):
        return f"fwi={float(world.patches['fwi'].flat[ctx]):.3f}"

    return Invariant("burning-implies-high-danger", post, pre, every=every,
                     contexts=contexts, sample=sample, details=details)
