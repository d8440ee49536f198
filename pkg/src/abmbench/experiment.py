"""BehaviorSpace-style parameter sweeps with per-tick or end-of-run recording."""
from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .engine import ConfigurationError, ModelError, World, step


@dataclass(frozen=True)
class Range:
    """Inclusive ``start -> increment -> final`` sweep, as in ``[0 5 20]``."""

    start: float
    increment: float
    final: float

    def values(self) -> list:
        if self.increment == 0:
            raise ConfigurationError("range increment must be non-zero")
        if (self.final - self.start) * self.increment < 0:
            raise ConfigurationError(f"range {self} never reaches its final value")
        n = int(math.floor((self.final - self.start) / self.increment + 1e-9)) + 1
        out = [self.start + i * self.increment for i in range(n)]
        if all(isinstance(v, int) for v in (self.start, self.increment, self.final)):
            return [int(v) for v in out]
        return [round(v, 12) for v in out]


def expand_values(value) -> list:
    if isinstance(value, Range):
        return value.values()
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


class Model:
    """Base class for runnable models.

    Subclasses set ``world``, ``behaviors`` and ``reporters`` (name -> zero-arg
    callable) and may override :meth:`finished` for early termination.
    """

    world: World
    behaviors: list
    reporters: dict[str, Callable[[], Any]]

    def finished(self) -> bool:
        return False

    def go(self) -> None:
        step(self.world, self.behaviors)


ModelFactory = Callable[..., Model]


@dataclass
class ExperimentSpec:
    name: str
    inputs: dict[str, Any]
    repetitions: int = 1
    stop_tick: int = 0
    reporters: list[str] = field(default_factory=list)
    base_seed: int = 0
    record: str = "tick"  # "tick" or "end"

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be positive")
        if self.stop_tick < 0:
            raise ConfigurationError("stop_tick must be non-negative")
        if self.record not in ("tick", "end"):
            raise ConfigurationError(f"record must be 'tick' or 'end', not {self.record!r}")

    def settings(self) -> list[dict[str, Any]]:
        names = list(self.inputs)
        grids = [expand_values(self.inputs[n]) for n in names]
        return [dict(zip(names, combo)) for combo in itertools.product(*grids)]

    def runs(self) -> list[tuple[int, int, dict[str, Any]]]:
        """``(runnum, seed, params)`` for every run, runnum starting at 1."""
        out = []
        runnum = 0
        for params in self.settings():
            for _ in range(self.repetitions):
                runnum += 1
                out.append((runnum, self.base_seed + runnum, params))
        return out

    @property
    def n_runs(self) -> int:
        return len(self.settings()) * self.repetitions

    @property
    def n_rows(self) -> int:
        per_run = self.stop_tick + 1 if self.record == "tick" else 1
        return self.n_runs * per_run


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple]
    violations: list[tuple] = field(default_factory=list)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self, header: str | None = None) -> str:
        return table_to_csv(self.columns, self.rows, header)


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def table_to_csv(columns: Sequence[str], rows, header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _report(model: Model, names: Sequence[str]) -> list:
    values = []
    for name in names:
        try:
            values.append(model.reporters[name]())
        except Exception as exc:  # reporter failures mark the cell, run continues
            values.append(f"ERROR:{type(exc).__name__}")
    return values


def execute_run(spec: ExperimentSpec, factory: ModelFactory, runnum: int, seed: int,
                params: dict, invariants=None) -> tuple[list[tuple], list[tuple]]:
    """Run one replicate; returns (rows, violation records)."""
    try:
        model = factory(dict(params), seed)
    except ModelError as exc:
        exc.run_id = runnum
        raise
    model.world.run_id = runnum
    handles = list(invariants(model)) if invariants is not None else []
    prefix = [runnum, *params.values()]
    rows = []
    if spec.record == "tick":
        rows.append(tuple(prefix + [model.world.tick] + _report(model, spec.reporters)))
        while model.world.tick < spec.stop_tick:
            model.go()
            rows.append(tuple(prefix + [model.world.tick] + _report(model, spec.reporters)))
    else:
        while model.world.tick < spec.stop_tick and not model.finished():
            model.go()
        rows.append(tuple(prefix + [model.world.tick] + _report(model, spec.reporters)))
    violations = [(runnum, v.invariant, v.tick, v.context, v.details)
                  for h in handles for v in h.violations()]
    return rows, violations


def _execute_packed(args):
    return execute_run(*args)


def run_experiment(spec: ExperimentSpec, factory: ModelFactory, *, jobs: int = 1,
                   invariants=None) -> ResultTable:
    """Execute every run of ``spec`` and assemble rows ordered by (run, tick).

    ``invariants`` is an optional callable ``model -> iterable of handles``
    (see :mod:`abmbench.vomas`) invoked right after each model is built.
    """
    columns = ["runnum", *spec.inputs.keys(), "tick", *spec.reporters]
    work = [(spec, factory, r, s, p, invariants) for r, s, p in spec.runs()]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_execute_packed, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [_execute_packed(w) for w in work]
    rows, violations = [], []
    for r, v in results:
        rows.extend(r)
        violations.extend(v)
    return ResultTable(columns, rows, violations)
