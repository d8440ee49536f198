"""Registry tying each model name to its parameters, factory, reporters and invariants."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Callable

from .experiment import Model


def _fields(cls) -> dict[str, type]:
    out = {}
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else None
        if isinstance(default, bool):
            out[f.name] = bool
        elif isinstance(default, int):
            out[f.name] = int
        elif isinstance(default, float):
            out[f.name] = float
        elif isinstance(default, str):
            out[f.name] = str
    return out


@dataclass(frozen=True)
class ModelSpec:
    name: str
    params_cls: type
    extra: dict  # non-dataclass parameters: name -> default
    reporters: tuple
    build: Callable[[dict, Any, int], Model]
    invariant_list: Callable[[Any], list]

    def schema(self) -> dict[str, type]:
        out = _fields(self.params_cls)
        for k, v in self.extra.items():
            out[k] = type(v)
        return out

    def invariants(self, cfg) -> list:
        return self.invariant_list(cfg)

    def split(self, params: dict) -> tuple[Any, dict]:
        """Params dataclass from canonical names, plus the extra values."""
        from .config import canonical
        params = {canonical(k): v for k, v in params.items()}
        fields = {f.name for f in dataclasses.fields(self.params_cls)}
        core = {k: v for k, v in params.items() if k in fields}
        extra = {**self.extra, **{k: v for k, v in params.items() if k in self.extra}}
        unknown = set(params) - fields - set(self.extra)
        if unknown:
            from .engine import ConfigurationError
            raise ConfigurationError(f"unknown parameter(s) for {self.name}: {', '.join(sorted(unknown))}")
        return self.params_cls(**core), extra


# -- sacs ----------------------------------------------------------------

def _sacs_build(params: dict, cfg, seed: int) -> Model:
    from .sacs import SacsModel, SacsParams
    p, _ = SPECS["sacs"].split(params)
    assert isinstance(p, SacsParams)
    return SacsModel(p, seed)


def _sacs_invariants(cfg) -> list:
    from .sacs import sacs_invariants
    return sacs_invariants()


# -- flocksense --------------------------------------------------------

def _flock_build(params: dict, cfg, seed: int) -> Model:
    from .flocksense import FlockModel
    p, _ = SPECS["flocksense"].split(params)
    if cfg is not None and cfg.schedule:
        p.schedule = {int(t): list(ids) for t, ids in cfg.schedule.items()}
    return FlockModel(p, seed)


def _flock_invariants(cfg) -> list:
    from .flocksense import FlockParams, flocksense_invariants
    p = FlockParams()
    if cfg is not None:
        p, _ = SPECS["flocksense"].split(cfg.params)
    return flocksense_invariants(p)


# -- wildfire ------------------------------------------------------------

_SENSOR_DEFAULTS = {"n_sensors": 0, "rho": 0.6, "p_link": 0.5, "comm_radius": 20.0,
                    "sensor_radius": 5.0, "spike_delta": 5.0}


def _fire_build(params: dict, cfg, seed: int) -> Model:
    from .wildfire import ForestFireModel, WeatherEvent, attach_sensors
    p, extra = SPECS["wildfire"].split(params)
    if cfg is not None and cfg.weather:
        p.weather = [WeatherEvent(t, kind, (c0, r0, c1, r1), mag)
                     for t, kind, c0, r0, c1, r1, mag in cfg.weather]
    overlay = None
    if extra["n_sensors"] > 0:
        def overlay(world):
            return attach_sensors(world, extra["n_sensors"], extra["rho"], extra["p_link"],
                                  comm_radius=extra["comm_radius"],
                                  sensing_radius=extra["sensor_radius"],
                                  spike_delta=extra["spike_delta"],
                                  wind_speed=p.wind_speed, month=p.month)
    return ForestFireModel(p, seed, overlay)


def _fire_invariants(cfg) -> list:
    from .wildfire import fire_danger_invariant
    return [fire_danger_invariant()]


# -- scholars ------------------------------------------------------------

def _scholars_build(params: dict, cfg, seed: int) -> Model:
    from .scholars import ScholarsModel
    p, _ = SPECS["scholars"].split(params)
    return ScholarsModel(p, seed)


def _scholars_invariants(cfg) -> list:
    from .scholars import tcn_invariants
    return tcn_invariants()


def _specs() -> dict[str, ModelSpec]:
    from .flocksense import FlockParams
    from .sacs import SacsParams
    from .scholars import ScholarParams
    from .wildfire import FireParams
    return {
        "sacs": ModelSpec("sacs", SacsParams, {}, ("nsucc", "ntot", "nhop"),
                          _sacs_build, _sacs_invariants),
        "flocksense": ModelSpec("flocksense", FlockParams, {}, ("sensed", "active_sensors"),
                                _flock_build, _flock_invariants),
        "wildfire": ModelSpec("wildfire", FireParams, dict(_SENSOR_DEFAULTS),
                              ("burned_area", "max_detected_fwi", "first_detection_tick",
                               "violations_count"),
                              _fire_build, _fire_invariants),
        "scholars": ModelSpec("scholars", ScholarParams, {}, ("mean_h", "max_h", "total_citations"),
                              _scholars_build, _scholars_invariants),
    }


SPECS: dict[str, ModelSpec] = _specs()
MODEL_NAMES = tuple(SPECS)


def get_model(name: str) -> ModelSpec:
    return SPECS[name]


class Factory:
    """Picklable ``factory(params, seed)`` for the experiment runner."""

    def __init__(self, model: str, fixed: dict, cfg=None):
        self.model = model
        self.fixed = dict(fixed)
        self.cfg = cfg

    def __call__(self, params: dict, seed: int) -> Model:
        from .config import canonical
        merged = {**self.fixed, **{canonical(k): v for k, v in params.items()}}
        return SPECS[self.model].build(merged, self.cfg, seed)


class InvariantSet:
    """Picklable ``model -> handles`` hook registering the selected invariants."""

    def __init__(self, model: str, names: list, cfg=None):
        self.model = model
        self.names = list(names)
        self.cfg = cfg

    def __call__(self, model: Model) -> list:
        from .vomas import register
        return [register(model.world, inv) for inv in SPECS[self.model].invariants(self.cfg)
                if inv.name in self.names]
