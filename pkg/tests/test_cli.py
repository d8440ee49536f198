import csv

import pytest
from hypothesis import given, settings, strategies as st

from abmbench.cli import main
from abmbench.config import ConfigError, emit_config, parse_config, settings_for
from abmbench.experiment import Range
from abmbench.presets import PRESET_TEXT, preset

SMALL_SACS = """\
[run]
model = sacs
invariants = [all]

[world]
width = 15
height = 15

[params]
n-gw = 2
n-cs = 2
n-srchs = 10
k = 2

[inputs]
sacs-radius = [0, 3]

[experiment]
name = small
repetitions = 2
stop = 100
record = end
reporters = [nsucc, ntot, nhop]
"""


def data_rows(text):
    return [r for r in csv.reader(l for l in text.splitlines() if not l.startswith("#"))][1:]


def test_minimal_flocksense_config():
    cfg = parse_config("[run]\nmodel = flocksense\n")
    assert cfg.model == "flocksense" and cfg.params == {} and cfg.experiment.repetitions == 1


def test_sacs_sweep_shapes():
    cfg = parse_config("[run]\nmodel = sacs\n[inputs]\nsacs-radius = [0, 5, 10, 15, 20]\n")
    assert settings_for(cfg) == {"sacs-radius": [0, 5, 10, 15, 20]}
    cfg = parse_config("[run]\nmodel = sacs\n[inputs]\nsacs-radius = [0 5 20]\n")
    assert cfg.inputs["sacs_radius"] == Range(0, 5, 20)


def test_config_errors_name_key_and_line():
    with pytest.raises(ConfigError, match=r"line 4: unknown key 'max-tll'"):
        parse_config("[run]\nmodel = sacs\n[params]\nmax-tll = 3\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("[run]\nmodel = nonsense\n")
    with pytest.raises(ConfigError, match="missing required key 'model'"):
        parse_config("[params]\nk = 3\n")
    with pytest.raises(ConfigError, match="line 4"):
        parse_config("[run]\nmodel = sacs\n[params]\nk = many\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("[bogus]\n")
    with pytest.raises(ConfigError, match="line 6: 'k' given in both"):
        parse_config("[run]\nmodel = sacs\n[params]\nk = 3\n[inputs]\nk = [1, 2]\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("[run]\nmodel = sacs\nseed = 1\nseed = 2\n")


@pytest.mark.parametrize("name", list(PRESET_TEXT))
def test_preset_round_trip(name):
    cfg = preset(name)
    assert parse_config(emit_config(cfg)) == cfg


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 8), st.integers(0, 20), st.floats(0, 5),
       st.booleans(), st.lists(st.integers(0, 30), min_size=1, max_size=4))
def test_round_trip_property(seed, jobs, ttl, radius, mobility, sweep):
    cfg = parse_config(f"[run]\nmodel = sacs\nseed = {seed}\njobs = {jobs}\n[params]\n"
                       f"max-ttl = {ttl + 1}\nsens-radius = {radius!r}\nmobility? = {str(mobility).lower()}\n"
                       f"[inputs]\nk = {sweep}\n".replace(",]", "]"))
    assert parse_config(emit_config(cfg)) == cfg


def write(tmp_path, text, name="run.conf"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_run_outputs_and_determinism(tmp_path, capsys):
    conf = write(tmp_path, SMALL_SACS)
    assert main(["--config", str(conf), "--out", str(tmp_path / "a"), "--seed", "7"], {}) == 0
    assert main(["--config", str(conf), "--out", str(tmp_path / "b"), "--seed", "7"], {}) == 0
    a = (tmp_path / "a" / "results.csv").read_text()
    assert a == (tmp_path / "b" / "results.csv").read_text()
    lines = a.splitlines()
    assert lines[0].startswith("# config-hash: ") and lines[1] == "# seed: 7"
    assert lines[2] == "runnum,sacs-radius,tick,nsucc,ntot,nhop"
    assert len(data_rows(a)) == 4
    meta = (tmp_path / "a" / "metadata.txt").read_text()
    assert "n-gw = 2" in meta and "tool-version" in meta
    viol = (tmp_path / "a" / "violations.csv").read_text().splitlines()
    assert viol[0].startswith("# config-hash") and viol[2] == "runnum,invariant,tick,context,details"
    assert len(viol) == 3


def test_jobs_do_not_change_results(tmp_path):
    conf = write(tmp_path, SMALL_SACS)
    main(["--config", str(conf), "--out", str(tmp_path / "a")], {})
    main(["--config", str(conf), "--out", str(tmp_path / "b"), "--jobs", "2"], {})
    a = (tmp_path / "a" / "results.csv").read_text()
    b = (tmp_path / "b" / "results.csv").read_text()
    assert data_rows(a) == data_rows(b)


def test_precedence(tmp_path, capsys):
    conf = write(tmp_path, "[run]\nseed = 5\n[params]\nk = 3\nmax-ttl = 4\n")
    env = {"SACS__PARAMS__K": "4", "SACS__RUN__SEED": "6"}
    assert main(["--preset", "sacs-exp-i", "--config", str(conf), "--print-config"], {}) == 0
    out = capsys.readouterr().out
    assert "seed = 5" in out and "k = 3" in out and "max-ttl = 4" in out and "n-gw = 10" in out
    assert main(["--preset", "sacs-exp-i", "--config", str(conf), "--print-config"], env) == 0
    out = capsys.readouterr().out
    assert "seed = 6" in out and "k = 4" in out
    assert main(["--preset", "sacs-exp-i", "--config", str(conf), "--seed", "9", "--print-config"], env) == 0
    assert "seed = 9" in capsys.readouterr().out


def test_error_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, "[run]\nmodel = sacs\n[params]\nmax-tll = 3\n")
    assert main(["--config", str(bad)], {}) == 2
    assert "max-tll" in capsys.readouterr().err
    assert main(["--config", str(tmp_path / "missing.conf")], {}) == 2
    assert main(["--preset", "nope"], {}) == 2
    assert main([], {}) == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    conf = write(tmp_path, SMALL_SACS)
    assert main(["--config", str(conf), "--out", str(blocker / "sub")], {}) == 1
    impossible = write(tmp_path, SMALL_SACS.replace("n-srchs = 10", "n-srchs = 10000"), "big.conf")
    assert main(["--config", str(impossible), "--out", str(tmp_path / "c")], {}) == 2
    assert "search origins" in capsys.readouterr().err


def test_list_presets(capsys):
    assert main(["--list-presets"], {}) == 0
    assert capsys.readouterr().out.split() == list(PRESET_TEXT)


def test_summarize(tmp_path):
    conf = write(tmp_path, SMALL_SACS)
    assert main(["--config", str(conf), "--out", str(tmp_path / "s"), "--summarize"], {}) == 0
    rows = data_rows((tmp_path / "s" / "summary.csv").read_text())
    assert len(rows) == 2 * 3
    for row in rows:
        n, mean, lo, hi = int(row[2]), float(row[3]), float(row[5]), float(row[6])
        assert n == 2 and lo <= mean <= hi


def test_history_mode(tmp_path):
    table = tmp_path / "table.csv"
    table.write_text("Year,Citations of papers,H-Index\n1968,[6],1\n1970,[6 3],2\n1971,[20 6 3],3\n"
                     "1977,[166 122 103 71 21 20 15 8 7 6 6 3 3 2 0 0 0],8\n")
    conf = write(tmp_path, f"[run]\nmodel = scholars\nmode = history\nhistory = {table}\n")
    assert main(["--config", str(conf), "--out", str(tmp_path / "h")], {}) == 0
    rows = data_rows((tmp_path / "h" / "timeline.csv").read_text())
    assert [r[2] for r in rows] == ["1", "2", "3", "8"]
    assert all(r[-1] == "true" for r in rows)
    assert (tmp_path / "h" / "tcn_edges.txt").read_text().count("\t") >= 17


def test_other_models_run(tmp_path):
    for model, extra in (("flocksense", "[params]\nn = 50\nn-boids = 5\n"),
                         ("wildfire", "[world]\nwidth = 20\nheight = 20\n[params]\nn-sensors = 3\n"
                                      "[weather]\nevent = [2, rain, 0, 0, 5, 5, 3.0]\n"),
                         ("scholars", "[params]\nn-res = 5\n")):
        conf = write(tmp_path, f"[run]\nmodel = {model}\ninvariants = [all]\n{extra}"
                               "[experiment]\nstop = 5\nrecord = tick\n", f"{model}.conf")
        assert main(["--config", str(conf), "--out", str(tmp_path / model)], {}) == 0
        assert len(data_rows((tmp_path / model / "results.csv").read_text())) == 6
