"""Ready-made configurations for the named experiments of each model."""
from __future__ import annotations

from .config import RunConfig, parse_config

_SACS = """
[run]
model = sacs
invariants = [all]

[params]
gw-cost = 10
n-srchs = 100
sens-radius = 2
n-gw = 10
n-cs = 10
k = 5
mobility? = {mobility}

[inputs]
max-ttl = {ttl}
sacs-radius = [0 5 20]

[experiment]
name = {name}
repetitions = 50
stop = {stop}
record = end
reporters = [nsucc, ntot, nhop]
"""

_FLOCK = """
[run]
model = flocksense
invariants = [sensed-within-active]

[params]
visible? = true
max-scen? = false
{fixed}

[inputs]
{varied} = [100 100 1000]

[experiment]
name = {name}
repetitions = 50
stop = 1000
record = tick
reporters = [sensed, active_sensors]
"""

_FIRE_I = """
[run]
model = wildfire
invariants = [all]

[params]
p-cov = 65
h-ave = 20
regrowth-rate = 0.005
ignition-gate? = true

[inputs]
t-ave = [5, 10, 20, 30, 40]

[experiment]
name = case-i
repetitions = 10
stop = 480
record = end
reporters = [burned_area, violations_count]
"""

_FIRE_II = """
[run]
model = wildfire
invariants = [all]

[params]
p-cov = 65
t-ave = 30
h-ave = 20
regrowth-rate = 0.005
rho = 0.6
p-link = 0.5

[inputs]
n-sensors = [50, 100, 2000]

[experiment]
name = case-ii
repetitions = 10
stop = 480
record = end
reporters = [burned_area, max_detected_fwi, first_detection_tick, violations_count]
"""

_SCHOLARS = """
[run]
model = scholars
invariants = [all]

[params]
n-res = 60
max-init-papers = 10

[experiment]
name = growth
repetitions = 1
stop = 10
record = tick
reporters = [mean_h, max_h, total_citations]
"""


def _sacs(name: str, ttl: str, mobility: bool) -> str:
    # every walker dies within max-ttl hops, so the largest ttl bounds the run
    stop = 10 * (20 if ttl.startswith("[") else int(ttl))
    return _SACS.format(name=name, ttl=ttl, stop=stop, mobility="true" if mobility else "false")


PRESET_TEXT = {
    "sacs-exp-i": _sacs("exp-i", "10", False),
    "sacs-exp-ii": _sacs("exp-ii", "[5 5 20]", False),
    "sacs-exp-iii": _sacs("exp-iii", "10", True),
    "sacs-exp-iv": _sacs("exp-iv", "[5 5 20]", True),
    "vary-sensors": _FLOCK.format(name="vary-sensors", fixed="n-boids = 50", varied="n"),
    "vary-boids": _FLOCK.format(name="vary-boids", fixed="n = 1000", varied="n-boids"),
    "wildfire-case-i": _FIRE_I,
    "wildfire-case-ii": _FIRE_II,
    "scholars-growth": _SCHOLARS,
}


def preset(name: str) -> RunConfig:
    try:
        text = PRESET_TEXT[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESET_TEXT)}") from None
    return parse_config(text)
