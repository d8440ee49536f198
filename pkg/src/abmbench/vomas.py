"""Read-only invariant observers that ride along with a running model.

An :class:`Invariant` pairs a precondition with a postcondition.  Once
registered on a world it is evaluated after every ``every``-th step, either
once globally or once per context (agent id, cell, ...) supplied by its
``contexts`` callable.  Contexts may be subsampled; the sample is drawn
from an observer-only random stream so the model stream is never touched.

A violation is logged when the precondition held and the postcondition,
checked ``delay`` ticks later, did not.
"""
from __future__ import annotations

import csv
import io
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .engine import OBSERVER_STREAM, World, make_rng, step


class RegistrationError(ValueError):
    pass


class ToggleSetupError(ValueError):
    pass


def _always(world, ctx) -> bool:
    return True


@dataclass(frozen=True)
class Invariant:
    name: str
    postcondition: Callable[[World, Any], bool]
    precondition: Callable[[World, Any], bool] = _always
    every: int = 1
    contexts: Callable[[World], Sequence] | None = None
    sample: int | None = None
    delay: int = 0
    details: Callable[[World, Any], str] | None = None

    def __post_init__(self) -> None:
        if self.every < 1:
            raise ValueError("evaluation period must be at least 1 tick")
        if self.delay < 0:
            raise ValueError("delay must be non-negative")
        if self.sample is not None and self.sample < 1:
            raise ValueError("sample size must be positive")


@dataclass(frozen=True)
class Violation:
    invariant: str
    tick: int
    context: Any
    details: str = ""


class Observer:
    """Handle returned by :func:`register`; the engine calls :meth:`observe`."""

    def __init__(self, world: World, invariant: Invariant):
        self.invariant = invariant
        key = zlib.crc32(invariant.name.encode("utf-8"))
        self._rng = make_rng(world.seed, OBSERVER_STREAM, key)
        self._log: list[Violation] = []
        self._pending: dict[int, list] = {}
        self.evaluations = 0
        self.precondition_hits = 0

    @property
    def name(self) -> str:
        return self.invariant.name

    def _contexts(self, world: World) -> list:
        inv = self.invariant
        if inv.contexts is None:
            return [None]
        ctxs = list(inv.contexts(world))
        if inv.sample is not None and len(ctxs) > inv.sample:
            pick = self._rng.choice(len(ctxs), size=inv.sample, replace=False)
            ctxs = [ctxs[i] for i in sorted(pick)]
        return ctxs

    def _check(self, world: World, ctx) -> None:
        inv = self.invariant
        if not inv.postcondition(world, ctx):
            detail = inv.details(world, ctx) if inv.details is not None else ""
            self._log.append(Violation(inv.name, world.tick, ctx, detail))

    def observe(self, world: World) -> None:
        inv = self.invariant
        for ctx in self._pending.pop(world.tick, []):
            self._check(world, ctx)
        if world.tick % inv.every:
            return
        self.evaluations += 1
        held = [ctx for ctx in self._contexts(world) if inv.precondition(world, ctx)]
        self.precondition_hits += len(held)
        if inv.delay == 0:
            for ctx in held:
                self._check(world, ctx)
        elif held:
            self._pending.setdefault(world.tick + inv.delay, []).extend(held)

    def violations(self) -> list[Violation]:
        return list(self._log)


def register(world: World, invariant: Invariant) -> Observer:
    for obs in world.observers:
        if getattr(obs, "name", None) == invariant.name:
            raise RegistrationError(f"invariant {invariant.name!r} is already registered")
    handle = Observer(world, invariant)
    world.observers.append(handle)
    return handle


def violations(handle: Observer) -> list[Violation]:
    return handle.violations()


def violations_to_csv(records: Sequence[Violation], header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["invariant", "tick", "context", "details"])
    for v in records:
        w.writerow([v.invariant, v.tick, "" if v.context is None else v.context, v.details])
    return buf.getvalue()


@dataclass
class ToggleReport:
    invariant: str
    reps: int
    enabled_violations: list[int] = field(default_factory=list)
    disabled_violations: list[int] = field(default_factory=list)
    enabled_hits: list[int] = field(default_factory=list)
    disabled_hits: list[int] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if sum(self.disabled_hits) == 0:
            return "inconclusive"
        if sum(self.enabled_violations) == 0 and any(self.disabled_violations):
            return "pass"
        return "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_text(self) -> str:
        return (f"invariant {self.invariant}: {self.verdict}\n"
                f"  enabled  violations {sum(self.enabled_violations)} over {self.reps} runs\n"
                f"  disabled violations {sum(self.disabled_violations)} over {self.reps} runs, "
                f"{sum(1 for v in self.disabled_violations if v)} runs with at least one\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rep", "config", "violations", "precondition_hits"])
        for i in range(self.reps):
            w.writerow([i + 1, "enabled", self.enabled_violations[i], self.enabled_hits[i]])
            w.writerow([i + 1, "disabled", self.disabled_violations[i], self.disabled_hits[i]])
        return buf.getvalue()


def toggle_test(factory: Callable[[Any, int], Any], invariant: Invariant, enabled_config,
                disabled_config, reps: int, stop_tick: int, base_seed: int = 0) -> ToggleReport:
    """Run ``reps`` seeded runs with the guarded mechanism on and off.

    ``factory(config, seed)`` must return a model exposing ``world``,
    ``behaviors`` and optionally ``finished()``.  Both arms use the same
    seeds.
    """
    if enabled_config == disabled_config:
        raise ToggleSetupError("enabled and disabled configurations are identical")
    if reps < 1:
        raise ToggleSetupError("reps must be positive")
    report = ToggleReport(invariant.name, reps)
    for rep in range(1, reps + 1):
        for config, counts, hits in ((enabled_config, report.enabled_violations, report.enabled_hits),
                                     (disabled_config, report.disabled_violations, report.disabled_hits)):
            model = factory(config, base_seed + rep)
            handle = register(model.world, invariant)
            finished = getattr(model, "finished", lambda: False)
            while model.world.tick < stop_tick and not finished():
                step(model.world, model.behaviors)
            counts.append(len(handle.violations()))
            hits.append(handle.precondition_hits)
    return report
