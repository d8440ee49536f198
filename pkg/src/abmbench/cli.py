"""Command-line entry point: configure, run, and write CSV outputs."""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__
from .config import (ConfigError, RunConfig, apply_env, emit_config, parse_config, settings_for,
                     validate)
from .engine import ConfigurationError, ModelError
from .experiment import ExperimentSpec, ResultTable, run_experiment, table_to_csv
from .models import Factory, InvariantSet, get_model
from .presets import PRESET_TEXT, preset


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abmbench", description="Run agent-based model experiments.")
    p.add_argument("--config", type=Path, help="configuration file")
    p.add_argument("--preset", help="named configuration (see --list-presets)")
    p.add_argument("--seed", type=int, help="base seed (unsigned 64-bit)")
    p.add_argument("--jobs", type=int, help="parallel worker processes")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--summarize", action="store_true", default=None,
                   help="also write per-reporter mean and 95%% CI summaries")
    p.add_argument("--list-presets", action="store_true", help="list presets and exit")
    p.add_argument("--print-config", action="store_true",
                   help="print the resolved configuration and exit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def resolve_config(args, environ=None) -> RunConfig:
    """Preset, then config file, then environment, then flags."""
    base = preset(args.preset) if args.preset else None
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
        cfg = parse_config(text, base)
    elif base is not None:
        cfg = base
    else:
        raise ConfigError("give --config or --preset")
    cfg = apply_env(cfg, environ)
    for flag in ("seed", "jobs", "summarize"):
        value = getattr(args, flag)
        if value is not None:
            setattr(cfg, flag, value)
    if args.out is not None:
        cfg.out = str(args.out)
    validate(cfg)
    return cfg


def experiment_spec(cfg: RunConfig) -> ExperimentSpec:
    e = cfg.experiment
    reporters = list(e.reporters) or list(get_model(cfg.model).reporters)
    return ExperimentSpec(e.name, settings_for(cfg), e.repetitions, e.stop, reporters,
                          base_seed=cfg.seed, record=e.record)


def selected_invariants(cfg: RunConfig) -> list[str]:
    names = [i.name for i in get_model(cfg.model).invariants(cfg)]
    if "none" in cfg.invariants:
        return []
    if "all" in cfg.invariants:
        return names
    return [n for n in names if n in cfg.invariants]


def run_config(cfg: RunConfig) -> ResultTable:
    spec = experiment_spec(cfg)
    names = selected_invariants(cfg)
    hook = InvariantSet(cfg.model, names, cfg) if names else None
    return run_experiment(spec, Factory(cfg.model, cfg.params, cfg), jobs=cfg.jobs, invariants=hook)


def summarize(table: ResultTable, spec: ExperimentSpec) -> str:
    """Mean, standard deviation and 95% t-interval per setting (and tick) and reporter."""
    keys = list(spec.inputs) + (["tick"] if spec.record == "tick" else [])
    key_idx = [table.columns.index(k) for k in keys]
    groups: dict[tuple, list] = {}
    for row in table.rows:
        groups.setdefault(tuple(row[i] for i in key_idx), []).append(row)
    out = []
    for key, rows in groups.items():
        for rep in spec.reporters:
            i = table.columns.index(rep)
            vals = np.array([r[i] for r in rows if isinstance(r[i], (int, float, np.number))], float)
            n = len(vals)
            mean = float(vals.mean()) if n else math.nan
            sd = float(vals.std(ddof=1)) if n > 1 else 0.0
            half = float(stats.t.ppf(0.975, n - 1) * sd / math.sqrt(n)) if n > 1 else 0.0
            out.append((*key, rep, n, mean, sd, mean - half, mean + half))
    return table_to_csv([*keys, "reporter", "n", "mean", "sd", "ci_low", "ci_high"], out,
                        None)


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="")


def _metadata(cfg: RunConfig) -> str:
    lines = [f"# {line}" for line in cfg.header().splitlines()]
    lines.append(f"# tool-version: abmbench {__version__}")
    return "\n".join(lines) + "\n" + emit_config(cfg)


def run_history(cfg: RunConfig, out: Path) -> list[Path]:
    from .scholars import build_tcn, read_citation_table, read_history_csv, timeline_csv
    text = Path(cfg.history).read_text(encoding="utf-8")
    first = next((ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")), "")
    if "[" in text or "citations of papers" in first.lower() or "h-index" in first.lower():
        history, expected = read_citation_table(text)
    else:
        history, expected = read_history_csv(text), None
    header = cfg.header()
    paths = [out / "timeline.csv", out / "tcn_nodes.csv", out / "tcn_edges.txt", out / "metadata.txt"]
    _write(paths[0], timeline_csv(history, expected, header))
    tcn = build_tcn(history)
    prefix = "".join(f"# {line}\n" for line in header.splitlines())
    _write(paths[1], prefix + tcn.nodes_csv())
    _write(paths[2], prefix + tcn.edges_text())
    _write(paths[3], _metadata(cfg))
    return paths


def execute(cfg: RunConfig) -> list[Path]:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc.strerror}") from None
    if cfg.mode == "history":
        return run_history(cfg, out)
    table = run_config(cfg)
    header = cfg.header()
    paths = [out / "results.csv", out / "metadata.txt"]
    _write(paths[0], table.to_csv(header))
    _write(paths[1], _metadata(cfg))
    if selected_invariants(cfg):
        buf = io.StringIO()
        for line in header.splitlines():
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["runnum", "invariant", "tick", "context", "details"])
        for v in table.violations:
            w.writerow(["" if x is None else x for x in v])
        paths.append(out / "violations.csv")
        _write(paths[-1], buf.getvalue())
    if cfg.summarize:
        paths.append(out / "summary.csv")
        _write(paths[-1], "".join(f"# {line}\n" for line in header.splitlines())
               + summarize(table, experiment_spec(cfg)))
    return paths


def main(argv=None, environ=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list_presets:
        for name in PRESET_TEXT:
            print(name)
        return 0
    try:
        cfg = resolve_config(args, os.environ if environ is None else environ)
        if args.print_config:
            sys.stdout.write(emit_config(cfg))
            return 0
        paths = execute(cfg)
    except (ConfigError, ConfigurationError, KeyError) as exc:
        print(f"abmbench: configuration error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"abmbench: model error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"abmbench: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
