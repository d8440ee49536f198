import pytest

from abmbench.engine import create_world, step
from abmbench.vomas import (Invariant, RegistrationError, ToggleSetupError, register, toggle_test,
                            violations, violations_to_csv)


class Toy:
    """A counter that occasionally misbehaves unless guarded."""

    def __init__(self, guarded: bool, seed: int):
        self.world = create_world(5, 5, seed)
        self.world.globals.update(x=0, draws=[])

        def tick(w):
            r = float(w.rng.random())
            w.globals["draws"].append(r)
            w.globals["x"] = 0 if guarded and r < 0.3 else int(r < 0.3) * 5 + w.globals["x"] % 3

        self.behaviors = [tick]


def small_invariant(name="x-small", **kw):
    return Invariant(name, lambda w, _c: w.globals["x"] < 5, **kw)


def run(model, ticks):
    for _ in range(ticks):
        step(model.world, model.behaviors)


def test_no_ticks_no_log():
    m = Toy(False, 1)
    h = register(m.world, small_invariant())
    assert violations(h) == []


def test_true_postcondition_never_fires():
    m = Toy(False, 1)
    h = register(m.world, Invariant("ok", lambda w, c: True))
    run(m, 50)
    assert violations(h) == [] and h.evaluations == 50


def test_false_postcondition_fires_every_evaluation():
    m = Toy(False, 1)
    h = register(m.world, Invariant("bad", lambda w, c: False, every=3))
    run(m, 9)
    assert [v.tick for v in violations(h)] == [3, 6, 9]


def test_precondition_gates():
    m = Toy(False, 1)
    h = register(m.world, Invariant("never", lambda w, c: False, precondition=lambda w, c: False))
    run(m, 10)
    assert violations(h) == [] and h.precondition_hits == 0


def test_duplicate_names_rejected():
    m = Toy(False, 1)
    register(m.world, small_invariant())
    with pytest.raises(RegistrationError):
        register(m.world, small_invariant())


def test_delayed_postcondition():
    m = Toy(False, 1)
    seen = []

    def post(w, c):
        seen.append(w.tick)
        return True

    register(m.world, Invariant("later", post, delay=2, every=5))
    run(m, 12)
    assert seen == [7, 12]


def test_contexts_and_sampling_leave_model_untouched():
    plain = Toy(False, 4)
    run(plain, 40)
    watched = Toy(False, 4)
    h = register(watched.world, Invariant("ctx", lambda w, c: c % 2 == 0,
                                          contexts=lambda w: range(50), sample=7))
    run(watched, 40)
    assert watched.world.globals["draws"] == plain.world.globals["draws"]
    assert 0 < len(violations(h)) <= 40 * 7
    again = Toy(False, 4)
    h2 = register(again.world, Invariant("ctx", lambda w, c: c % 2 == 0,
                                         contexts=lambda w: range(50), sample=7))
    run(again, 40)
    assert violations(h2) == violations(h)


def test_invariant_validation():
    with pytest.raises(ValueError):
        Invariant("x", lambda w, c: True, every=0)
    with pytest.raises(ValueError):
        Invariant("x", lambda w, c: True, sample=0)


def test_violation_csv():
    m = Toy(False, 1)
    h = register(m.world, Invariant("bad", lambda w, c: False, details=lambda w, c: "x=1"))
    run(m, 2)
    lines = violations_to_csv(violations(h), "seed: 1").splitlines()
    assert lines == ["# seed: 1", "invariant,tick,context,details", "bad,1,,x=1", "bad,2,,x=1"]


def test_toggle_pass_and_setup_errors():
    report = toggle_test(lambda guarded, seed: Toy(guarded, seed), small_invariant(), True, False,
                         reps=5, stop_tick=30)
    assert report.verdict == "pass" and report.passed
    assert sum(report.enabled_violations) == 0 and any(report.disabled_violations)
    assert "pass" in report.to_text()
    assert report.to_csv().splitlines()[0] == "rep,config,violations,precondition_hits"
    with pytest.raises(ToggleSetupError):
        toggle_test(lambda g, s: Toy(g, s), small_invariant(), True, True, reps=2, stop_tick=5)


def test_toggle_vacuous_is_inconclusive():
    vacuous = Invariant("vacuous", lambda w, c: False, precondition=lambda w, c: False)
    report = toggle_test(lambda g, s: Toy(g, s), vacuous, True, False, reps=3, stop_tick=10)
    assert report.verdict == "inconclusive"
