"""Run configuration: a strict ``[section]`` / ``key = value`` text format.

Values are booleans (``true``/``false``), integers, floats, quoted or bare
strings, lists ``[a, b, c]`` and sweep ranges ``[start increment final]``.
Parameter names use the hyphenated model vocabulary (``max-ttl``,
``visible?``); the canonical spelling is produced by :func:`display_name`.
"""
from __future__ import annotations

import dataclasses
import hashlib
import os
import re
from dataclasses import dataclass, field
from typing import Any, Mapping

from .engine import ConfigurationError
from .experiment import Range

SECTIONS = ("run", "world", "params", "inputs", "experiment", "weather", "schedule")
RUN_KEYS = {"model": str, "seed": int, "jobs": int, "out": str, "invariants": list,
            "summarize": bool, "mode": str, "history": str}
EXPERIMENT_KEYS = {"name": str, "repetitions": int, "stop": int, "record": str, "reporters": list}
WORLD_KEYS = {"width": int, "height": int}
MODES = ("experiment", "history")


class ConfigError(ConfigurationError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def canonical(name: str) -> str:
    """``max-scen?`` -> ``max_scen``."""
    return name.strip().rstrip("?").replace("-", "_").lower()


def display_name(name: str, kind: type) -> str:
    """``max_scen`` (bool) -> ``max-scen?``."""
    out = name.replace("_", "-")
    return out + "?" if kind is bool else out


# -- values --------------------------------------------------------------

_INT = re.compile(r"[+-]?\d+\Z")
_FLOAT = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\Z|[+-]?(inf|nan)\Z")


def parse_scalar(text: str):
    t = text.strip()
    if t in ("true", "false"):
        return t == "true"
    if _INT.match(t):
        return int(t)
    if _FLOAT.match(t):
        return float(t)
    if len(t) >= 2 and t[0] == t[-1] == '"':
        return t[1:-1]
    return t


def parse_value(text: str):
    t = text.strip()
    if t.startswith("["):
        if not t.endswith("]"):
            raise ValueError(f"unterminated list {t!r}")
        inner = t[1:-1].strip()
        if not inner:
            return []
        if "," in inner:
            return [parse_scalar(x) for x in inner.split(",")]
        parts = inner.split()
        if len(parts) == 3 and all(isinstance(parse_scalar(p), (int, float))
                                   and not isinstance(parse_scalar(p), bool) for p in parts):
            return Range(*(parse_scalar(p) for p in parts))
        if len(parts) == 1:
            return [parse_scalar(parts[0])]
        raise ValueError(f"list {t!r} needs commas (or exactly three numbers for a range)")
    return parse_scalar(t)


def format_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, int):
        return str(v)
    s = str(v)
    needs_quotes = (s != s.strip() or s == "" or s in ("true", "false") or "," in s
                    or s.startswith("[") or _INT.match(s) or _FLOAT.match(s) or '"' in s)
    return f'"{s}"' if needs_quotes else s


def format_value(v) -> str:
    if isinstance(v, Range):
        return f"[{format_scalar(v.start)} {format_scalar(v.increment)} {format_scalar(v.final)}]"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(format_scalar(x) for x in v) + "]"
    return format_scalar(v)


def coerce(value, kind: type, what: str, line: int | None = None):
    """Check ``value`` against ``kind``; ints are accepted where floats are expected."""
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if kind is list:
        return list(value) if isinstance(value, (list, tuple)) else [value]
    if kind is str and not isinstance(value, str):
        return format_scalar(value)
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise ConfigError(f"{what} expects {kind.__name__}, got {format_value(value)!r}", line)
    return value


def _coerce_sweep(value, kind: type, what: str, line: int | None):
    if isinstance(value, Range):
        if kind not in (int, float):
            raise ConfigError(f"{what} cannot take a numeric range", line)
        return value
    if isinstance(value, list):
        return [coerce(v, kind, what, line) for v in value]
    return coerce(value, kind, what, line)


# -- config --------------------------------------------------------------

@dataclass
class ExperimentBlock:
    name: str = "run"
    repetitions: int = 1
    stop: int = 100
    record: str = "end"
    reporters: list = field(default_factory=list)


@dataclass
class RunConfig:
    model: str
    seed: int = 0
    jobs: int = 1
    out: str = "results"
    invariants: list = field(default_factory=list)
    summarize: bool = False
    mode: str = "experiment"
    history: str = ""
    params: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    experiment: ExperimentBlock = field(default_factory=ExperimentBlock)
    weather: list = field(default_factory=list)
    schedule: dict = field(default_factory=dict)

    def digest(self) -> str:
        """Hash of everything that can change results.

        Output path, job count, invariant selection and summaries cannot,
        so they are left out.
        """
        canon = dataclasses.replace(self, out="", jobs=1, invariants=[], summarize=False)
        return hashlib.sha256(emit_config(canon).encode("utf-8")).hexdigest()[:16]

    def header(self) -> str:
        return f"config-hash: {self.digest()}\nseed: {self.seed}"


def _schema(model: str) -> dict[str, type]:
    from .models import get_model  # late import; models pull in every simulation
    return get_model(model).schema()


def _parse_lines(text: str) -> list[tuple[int, str, str, str]]:
    """(line, section, key, raw value) for every assignment."""
    section = None
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("["):
            m = re.fullmatch(r"\[([A-Za-z_]+)\]", line)
            if not m:
                raise ConfigError(f"malformed section header {line!r}", lineno)
            section = m.group(1).lower()
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if section is None:
            raise ConfigError("assignment before any [section] header", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError("empty key", lineno)
        out.append((lineno, section, key, value.strip()))
    return out


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse and validate ``text``; keys override ``base`` when given."""
    entries = _parse_lines(text)
    model = base.model if base is not None else None
    for lineno, section, key, value in entries:
        if section == "run" and key == "model":
            model = parse_scalar(value)
            model_line = lineno
    if model is None:
        raise ConfigError("missing required key 'model' in [run]")
    try:
        schema = _schema(model)
    except KeyError:
        raise ConfigError(f"unknown model {model!r}", locals().get("model_line")) from None
    cfg = dataclasses.replace(base, params=dict(base.params), inputs=dict(base.inputs),
                              experiment=dataclasses.replace(base.experiment),
                              weather=list(base.weather), schedule=dict(base.schedule)) \
        if base is not None and base.model == model else RunConfig(model)
    seen: set = set()
    for lineno, section, key, value in entries:
        try:
            parsed = parse_value(value)
        except ValueError as exc:
            raise ConfigError(str(exc), lineno) from None
        if section in ("run", "experiment", "world", "params", "inputs") and (section, key) in seen:
            raise ConfigError(f"duplicate key {key!r} in [{section}]", lineno)
        seen.add((section, key))
        if section in ("params", "inputs"):
            other = "inputs" if section == "params" else "params"
            if (other, canonical(key)) in seen:
                raise ConfigError(f"{key!r} given in both [params] and [inputs]", lineno)
            seen.add((section, canonical(key)))
        _assign(cfg, schema, section, key, parsed, lineno)
    validate(cfg)
    return cfg


def _param_key(schema, key: str, section: str, lineno: int | None) -> str:
    name = canonical(key)
    if name not in schema:
        raise ConfigError(f"unknown key {key!r} in [{section}]", lineno)
    return name


def _assign(cfg: RunConfig, schema, section: str, key: str, value, lineno: int | None) -> None:
    if section == "run":
        name = canonical(key)
        if name not in RUN_KEYS:
            raise ConfigError(f"unknown key {key!r} in [run]", lineno)
        setattr(cfg, name, coerce(value, RUN_KEYS[name], key, lineno))
    elif section == "experiment":
        name = canonical(key)
        if name not in EXPERIMENT_KEYS:
            raise ConfigError(f"unknown key {key!r} in [experiment]", lineno)
        setattr(cfg.experiment, name, coerce(value, EXPERIMENT_KEYS[name], key, lineno))
    elif section == "world":
        name = canonical(key)
        if name not in WORLD_KEYS:
            raise ConfigError(f"unknown key {key!r} in [world]", lineno)
        cfg.params[name] = coerce(value, WORLD_KEYS[name], key, lineno)
    elif section == "params":
        name = _param_key(schema, key, section, lineno)
        cfg.params[name] = coerce(value, schema[name], key, lineno)
        cfg.inputs.pop(name, None)  # a later layer may fix a swept input
    elif section == "inputs":
        name = _param_key(schema, key, section, lineno)
        cfg.inputs[name] = _coerce_sweep(value, schema[name], key, lineno)
        cfg.params.pop(name, None)
    elif section == "weather":
        if canonical(key) != "event":
            raise ConfigError(f"unknown key {key!r} in [weather] (expected 'event')", lineno)
        cfg.weather.append(_weather_event(value, lineno))
    elif section == "schedule":
        try:
            tick = int(key)
        except ValueError:
            raise ConfigError(f"schedule keys are ticks, got {key!r}", lineno) from None
        ids = value if isinstance(value, list) else [value]
        if not all(isinstance(i, int) and not isinstance(i, bool) for i in ids):
            raise ConfigError("schedule values are lists of sensor indices", lineno)
        cfg.schedule[tick] = list(ids)


def _weather_event(value, lineno) -> tuple:
    if not isinstance(value, list) or len(value) != 7:
        raise ConfigError("weather event = [tick, kind, col0, row0, col1, row1, magnitude]", lineno)
    tick, kind, *region, mag = value
    if kind not in ("rain", "snow"):
        raise ConfigError(f"weather kind must be rain or snow, got {kind!r}", lineno)
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (tick, *region)):
        raise ConfigError("weather tick and region must be integers", lineno)
    if not isinstance(mag, (int, float)) or isinstance(mag, bool):
        raise ConfigError("weather magnitude must be numeric", lineno)
    return (tick, kind, *region, float(mag))


def validate(cfg: RunConfig) -> None:
    if cfg.mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}")
    if cfg.mode == "history" and cfg.model != "scholars":
        raise ConfigError("history mode is only available for the scholars model")
    if cfg.mode == "history" and not cfg.history:
        raise ConfigError("history mode needs 'history = PATH' in [run]")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    exp = cfg.experiment
    if exp.record not in ("tick", "end"):
        raise ConfigError("record must be 'tick' or 'end'")
    if exp.repetitions < 1 or exp.stop < 0:
        raise ConfigError("repetitions must be positive and stop non-negative")
    from .models import get_model
    spec = get_model(cfg.model)
    unknown = [r for r in exp.reporters if r not in spec.reporters]
    if unknown:
        raise ConfigError(f"unknown reporter(s) {', '.join(map(str, unknown))} for model {cfg.model}")
    names = [i.name for i in spec.invariants(cfg)]
    bad = [i for i in cfg.invariants if i not in ("all", "none") and i not in names]
    if bad:
        raise ConfigError(f"unknown invariant(s) {', '.join(map(str, bad))}; available: {', '.join(names)}")
    if cfg.weather and cfg.model != "wildfire":
        raise ConfigError("[weather] applies only to the wildfire model")
    if cfg.schedule and cfg.model != "flocksense":
        raise ConfigError("[schedule] applies only to the flocksense model")
    overlap = set(cfg.params) & set(cfg.inputs)
    if overlap:
        raise ConfigError(f"{', '.join(sorted(overlap))} given both as fixed parameter and input")


def emit_config(cfg: RunConfig) -> str:
    """Canonical text form; ``parse_config(emit_config(c)) == c``."""
    schema = _schema(cfg.model)
    lines = ["[run]", f"model = {format_scalar(cfg.model)}", f"seed = {cfg.seed}",
             f"jobs = {cfg.jobs}", f"out = {format_scalar(cfg.out)}",
             f"invariants = {format_value(cfg.invariants)}",
             f"summarize = {format_scalar(cfg.summarize)}", f"mode = {cfg.mode}"]
    if cfg.history:
        lines.append(f"history = {format_scalar(cfg.history)}")
    world = {k: v for k, v in cfg.params.items() if k in WORLD_KEYS}
    if world:
        lines += ["", "[world]"] + [f"{k} = {format_value(v)}" for k, v in world.items()]
    rest = {k: v for k, v in cfg.params.items() if k not in WORLD_KEYS}
    if rest:
        lines += ["", "[params]"] + [f"{display_name(k, schema[k])} = {format_value(v)}"
                                     for k, v in rest.items()]
    if cfg.inputs:
        lines += ["", "[inputs]"] + [f"{display_name(k, schema[k])} = {format_value(v)}"
                                     for k, v in cfg.inputs.items()]
    e = cfg.experiment
    lines += ["", "[experiment]", f"name = {format_scalar(e.name)}",
              f"repetitions = {e.repetitions}", f"stop = {e.stop}", f"record = {e.record}",
              f"reporters = {format_value(e.reporters)}"]
    if cfg.weather:
        lines += ["", "[weather]"] + [f"event = {format_value(list(ev))}" for ev in cfg.weather]
    if cfg.schedule:
        lines += ["", "[schedule]"] + [f"{t} = {format_value(ids)}" for t, ids in cfg.schedule.items()]
    return "\n".join(lines) + "\n"


def apply_env(cfg: RunConfig, environ: Mapping[str, str] | None = None) -> RunConfig:
    """Apply ``MODEL__SECTION__KEY`` environment overrides for ``cfg.model``."""
    environ = os.environ if environ is None else environ
    prefix = cfg.model.upper() + "__"
    schema = _schema(cfg.model)
    for var in sorted(environ):
        if not var.startswith(prefix):
            continue
        parts = var[len(prefix):].split("__")
        if len(parts) != 2:
            raise ConfigError(f"environment override {var} must look like MODEL__SECTION__KEY")
        section, key = parts[0].lower(), parts[1].lower()
        if section not in ("run", "world", "params", "inputs", "experiment"):
            raise ConfigError(f"environment override {var}: unknown section {section!r}")
        try:
            value = parse_value(environ[var])
        except ValueError as exc:
            raise ConfigError(f"environment override {var}: {exc}") from None
        if section == "run" and canonical(key) == "model":
            raise ConfigError(f"environment override {var} cannot change the model")
        _assign(cfg, schema, section, key, value, None)
    validate(cfg)
    return cfg


def settings_for(cfg: RunConfig) -> dict[str, Any]:
    """Experiment inputs keyed by their display names, fixed parameters excluded."""
    schema = _schema(cfg.model)
    return {display_name(k, schema[k]): v for k, v in cfg.inputs.items()}
