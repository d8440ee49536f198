"""Wireless sensor overlay that samples the forest and tracks FWI per sensor."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..engine import World, make_rng
from ..network import Graph, generate_qudg
from . import indices as fw
from .forest import temperature


@dataclass
class SensorOverlay:
    positions: np.ndarray  # (n, 2) in patch units, x = column, y = row
    graph: Graph
    rho: float
    p_link: float
    comm_radius: float
    sensing_radius: float
    cells: list[np.ndarray]  # flat cell indices inside each sensing disk
    spike_delta: float = 5.0
    wind_speed: float = 20.0
    month: int = 7
    T: np.ndarray = field(default=None)
    H: np.ndarray = field(default=None)
    rain: np.ndarray = field(default=None)
    ffmc: np.ndarray = field(default=None)
    dmc: np.ndarray = field(default=None)
    dc: np.ndarray = field(default=None)
    fwi: np.ndarray = field(default=None)
    baseline_T: np.ndarray = field(default=None)
    quiet: tuple = field(default=None, repr=False)
    quiet_fwi: np.ndarray = field(default=None)
    detected_at: np.ndarray = field(default=None)
    max_fwi: float = 0.0
    first_detection: int = -1
    averaging: sparse.csr_matrix = field(default=None, repr=False)

    def __post_init__(self) -> None:
        n = len(self.positions)
        n_cells = max((int(c.max()) for c in self.cells), default=0) + 1
        rows = np.repeat(np.arange(n), [len(c) for c in self.cells])
        cols = np.concatenate(self.cells) if n else np.zeros(0, dtype=int)
        vals = np.concatenate([np.full(len(c), 1.0 / len(c)) for c in self.cells]) if n else np.zeros(0)
        self.averaging = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n_cells))
        self.T = np.zeros(n)
        self.H = np.zeros(n)
        self.rain = np.zeros(n)
        self.ffmc = np.full(n, fw.FFMC_START)
        self.dmc = np.full(n, fw.DMC_START)
        self.dc = np.full(n, fw.DC_START)
        self.fwi = np.full(n, np.nan)
        self.quiet = (self.ffmc, self.dmc, self.dc)
        self.quiet_fwi = np.full(n, np.nan)
        self.detected_at = np.full(n, -1, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.positions)

    def state(self, i: int) -> fw.FwiState:
        R = fw.isi(self.ffmc[i], 0.0)
        U = fw.bui(self.dmc[i], self.dc[i])
        S = 0.0 if np.isnan(self.fwi[i]) else float(self.fwi[i])
        return fw.FwiState(float(self.ffmc[i]), float(self.dmc[i]), float(self.dc[i]), R, U, S)


def _disk_cells(world: World, center, radius: float) -> np.ndarray:
    cols = np.arange(world.width) + 0.5
    rows = np.arange(world.height) + 0.5
    d2 = (rows[:, None] - center[1]) ** 2 + (cols[None, :] - center[0]) ** 2
    inside = np.flatnonzero(d2 <= radius * radius)
    if inside.size == 0:
        r = min(int(center[1]), world.height - 1)
        c = min(int(center[0]), world.width - 1)
        inside = np.array([r * world.width + c])
    return inside


def attach_sensors(world: World, n_sensors: int, rho: float = 0.6, p_link: float = 0.5,
                   seed: int | None = None, comm_radius: float = 20.0,
                   sensing_radius: float = 5.0, spike_delta: float = 5.0,
                   wind_speed: float = 20.0, month: int = 7) -> SensorOverlay:
    """Deploy sensors uniformly at random and link them as a QUDG.

    Distances are normalized by ``comm_radius`` before the QUDG is built,
    so ``comm_radius`` is the maximum radio range.
    """
    if n_sensors < 1:
        raise ValueError("at least one sensor is required")
    rng = world.rng if seed is None else make_rng(seed)
    pos = np.column_stack([rng.uniform(0, world.width, n_sensors),
                           rng.uniform(0, world.height, n_sensors)])
    return deploy_sensors(world, pos, rho, p_link, rng, comm_radius, sensing_radius,
                          spike_delta, wind_speed, month)


def deploy_sensors(world: World, positions, rho: float = 0.6, p_link: float = 0.5, rng=None,
                   comm_radius: float = 20.0, sensing_radius: float = 5.0,
                   spike_delta: float = 5.0, wind_speed: float = 20.0,
                   month: int = 7) -> SensorOverlay:
    """Sensors at given ``(x, y)`` positions; the current readings become the baseline."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    if len(pos) < 1:
        raise ValueError("at least one sensor is required")
    rng = world.rng if rng is None else rng
    graph = generate_qudg(pos / comm_radius, rho, p_link, rng)
    cells = [_disk_cells(world, p, sensing_radius) for p in pos]
    overlay = SensorOverlay(pos, graph, rho, p_link, comm_radius, sensing_radius, cells,
                            spike_delta, wind_speed, month)
    read_sensors(world, overlay)
    overlay.baseline_T = overlay.T.copy()
    _update_codes(overlay)
    return overlay


def read_sensors(world: World, overlay: SensorOverlay) -> None:
    """Mean temperature, humidity and accumulated rain over each sensing disk."""
    m = overlay.averaging
    k = m.shape[1]
    overlay.T = m @ temperature(world).ravel()[:k]
    overlay.H = m @ world.patches["humidity"].ravel()[:k]
    overlay.rain = m @ world.patches["rain_mm"].ravel()[:k]


def _day(codes, T, overlay: SensorOverlay):
    inputs = fw.FwiInputs(T, np.clip(overlay.H, 0, 100), overlay.wind_speed, overlay.rain, overlay.month)
    F = fw.ffmc(codes[0], inputs)
    P = fw.dmc(codes[1], inputs)
    D = fw.dc(codes[2], inputs)
    return (F, P, D), fw.fwi(fw.isi(F, overlay.wind_speed), fw.bui(P, D))


def _update_codes(overlay: SensorOverlay) -> None:
    """One FWI day for every sensor, plus the no-fire counterfactual.

    The counterfactual runs the same codes on the temperature read at
    deployment, so weather drift and start-up drying cancel out when the
    two are compared.
    """
    (overlay.ffmc, overlay.dmc, overlay.dc), overlay.fwi = _day(
        (overlay.ffmc, overlay.dmc, overlay.dc), overlay.T, overlay)
    baseline = overlay.T if overlay.baseline_T is None else np.minimum(overlay.T, overlay.baseline_T)
    overlay.quiet, overlay.quiet_fwi = _day(overlay.quiet, baseline, overlay)
    overlay.max_fwi = max(overlay.max_fwi, float(overlay.fwi.max()))


def sensor_sample(world: World, overlay: SensorOverlay, fwi_period: int) -> None:
    """Read T/H every tick; once per FWI period update each sensor's codes.

    A sensor detects fire when its FWI exceeds its no-fire counterfactual
    by at least ``spike_delta``.  Rain is the forest's accumulated rain
    layer, so this must run before the forest's own daily update clears it.
    """
    read_sensors(world, overlay)
    if (world.tick + 1) % fwi_period:
        return
    _update_codes(overlay)
    fresh = (overlay.fwi - overlay.quiet_fwi >= overlay.spike_delta) & (overlay.detected_at < 0)
    tick = world.tick + 1
    overlay.detected_at[fresh] = tick
    if fresh.any() and overlay.first_detection < 0:
        overlay.first_detection = tick
