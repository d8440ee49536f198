"""Forest fire spread, weather, the Fire Weather Index and a sensor overlay."""
from .forest import (BURNED, DYING, SPREADING, STARTED, UNBURNED, FireParams, ForestFireModel,
                     WeatherEvent, apply_weather, burning, create_forest, fire_danger_invariant,
                     start_fire, step_fire, step_fwi, step_heat, step_regrowth, temperature)
from .indices import (DC_DAY_LENGTH, DMC_DAY_LENGTH, Danger, FwiInputs, FwiState, bui, classify_danger,
                      danger_codes, dc, dmc, ffmc, fwi, isi)
from .sensors import SensorOverlay, attach_sensors, deploy_sensors, read_sensors, sensor_sample

__all__ = [
    "BURNED", "DYING", "SPREADING", "STARTED", "UNBURNED", "DC_DAY_LENGTH", "DMC_DAY_LENGTH",
    "Danger", "FireParams", "ForestFireModel", "FwiInputs", "FwiState", "SensorOverlay",
    "WeatherEvent", "apply_weather", "attach_sensors", "bui", "burning", "classify_danger",
    "create_forest", "danger_codes", "dc", "deploy_sensors", "dmc", "ffmc", "fire_danger_invariant",
    "fwi", "isi", "read_sensors", "sensor_sample", "start_fire", "step_fire", "step_fwi",
    "step_heat", "step_regrowth", "temperature",
]
