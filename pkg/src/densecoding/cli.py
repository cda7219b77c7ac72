"""Command-line front end.

Every command reads an optional INI config file, applies ``--set key=value``
overrides on top, validates the result and writes structured records as
CSV (with a schema comment line) or JSON lines.

Exit codes: 0 success, 1 physically infeasible request, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np

from . import __version__
from . import capacity as cap
from . import protocol, traces
from .errors import PhysicsError

log = logging.getLogger("densecoding")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_PHYSICS, EXIT_USAGE = 0, 1, 2
COMMANDS = ("simulate", "capacity-curve", "crossing", "traces", "convert")


class ConfigError(ValueError):
    """Bad config file, override or option."""


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def _optional(parse: Callable[[str], Any]) -> Callable[[str], Any]:
    return lambda text: None if text.strip().lower() in ("", "none") else parse(text)


SCHEMA: dict[str, dict[str, Callable[[str], Any]]] = {
    "experiment": {
        "r": float,
        "squeezing_db": float,
        "alpha": _parse_complex,
        "pt_transmittance": float,
        "detector_efficiency": float,
        "ideal_displacement": _parse_bool,
        "antisqueeze_r_plus": _optional(float),
        "r2": _optional(float),
    },
    "trace": {
        "mode": str,
        "center_hz": float,
        "span_hz": float,
        "rbw_hz": float,
        "vbw_hz": float,
        "averages": int,
        "sweep_s": _optional(float),
        "lo_scan": _parse_bool,
        "seed": int,
        "am_freq_hz": _optional(float),
        "am_depth_db": float,
        "pm_freq_hz": _optional(float),
        "pm_depth_db": float,
        "points": int,
        "rbw_poles": int,
        "oversample": float,
        "lo_scan_range": float,
    },
    "capacity": {
        "channels": str,
        "n_min": float,
        "n_max": float,
        "n_points": int,
    },
    "crossing": {
        "a": str,
        "b": str,
        "n_lo": float,
        "n_hi": float,
        "xtol": float,
    },
}


@dataclass
class RunSpec:
    command: str
    config_path: Path | None = None
    overrides: list[str] = field(default_factory=list)
    output: Path | None = None
    format: str = "csv"
    seed: int | None = None
    values: dict[str, dict[str, Any]] = field(default_factory=dict)

    def get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)


def _parse_value(section: str, key: str, text: str) -> Any:
    try:
        return SCHEMA[section][key](text)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: invalid value {text!r} ({exc})") from None


def load_values(config_path: Path | None, overrides: Iterable[str]) -> dict[str, dict[str, Any]]:
    """Merge the config file and overrides, rejecting unknown sections and keys."""
    values: dict[str, dict[str, Any]] = {s: {} for s in SCHEMA}
    if config_path is not None:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        try:
            with open(config_path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from None
        for section in parser.sections():
            if section not in SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, text in parser.items(section):
                if key not in SCHEMA[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                values[section][key] = _parse_value(section, key, text)
    for item in overrides:
        name, sep, text = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        name = name.strip()
        if "." in name:
            section, key = name.split(".", 1)
            if section not in SCHEMA or key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {name!r}")
        else:
            owners = [s for s in SCHEMA if name in SCHEMA[s]]
            if not owners:
                raise ConfigError(f"unknown key {name!r}")
            if len(owners) > 1:
                raise ConfigError(f"ambiguous key {name!r}; use one of "
                                  + ", ".join(f"{s}.{name}" for s in owners))
            section, key = owners[0], name
        values[section][key] = _parse_value(section, key, text.strip())
    return values


def experiment_config(spec: RunSpec) -> protocol.ExperimentConfig:
    ex = dict(spec.values.get("experiment", {}))
    if "r" in ex and "squeezing_db" in ex:
        raise ConfigError("give either r or squeezing_db, not both")
    if "squeezing_db" in ex:
        try:
            ex["r"] = cap.db_to_r(ex.pop("squeezing_db"))
        except ValueError as exc:
            raise ConfigError(f"[experiment] squeezing_db: {exc}") from None
    ex.setdefault("r", cap.db_to_r(2.0))
    try:
        return protocol.ExperimentConfig(**ex)
    except PhysicsError:
        raise
    except ValueError as exc:
        raise ConfigError(f"[experiment] {exc}") from None


def trace_config(spec: RunSpec) -> tuple[traces.TraceConfig, str]:
    tr = dict(spec.values.get("trace", {}))
    mode = tr.pop("mode", "time")
    if mode not in ("time", "spectrum"):
        raise ConfigError(f"[trace] mode must be 'time' or 'spectrum', got {mode!r}")
    am_f, am_d = tr.pop("am_freq_hz", None), tr.pop("am_depth_db", 15.0)
    pm_f, pm_d = tr.pop("pm_freq_hz", None), tr.pop("pm_depth_db", 15.0)
    if mode == "spectrum":
        tr.setdefault("span_hz", 1e6)
    if spec.seed is not None:
        tr["seed"] = spec.seed
    tr["am_signal"] = None if am_f is None else (am_f, am_d)
    tr["pm_signal"] = None if pm_f is None else (pm_f, pm_d)
    try:
        return traces.TraceConfig(**tr), mode
    except ValueError as exc:
        raise ConfigError(f"[trace] {exc}") from None


def _channel(text: str, r_default: float) -> cap.ChannelModel:
    text = text.strip()
    try:
        if text in ("dense_coding", "squeezed_homodyne"):
            return cap.ChannelModel(text, r_default)
        return cap.ChannelModel.parse(text)
    except ValueError as exc:
        raise ConfigError(f"channel {text!r}: {exc}") from None


# --- output ------------------------------------------------------------------------


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return str(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_records(records: list[dict], command: str, fmt: str, out) -> None:
    if fmt == "jsonl":
        for rec in records:
            out.write(json.dumps({k: _jsonable(v) for k, v in rec.items()}) + "\n")
        return
    out.write(f"# densecoding {command} schema v{SCHEMA_VERSION}\n")
    if not records:
        return
    writer = csv.DictWriter(out, fieldnames=list(records[0]), lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: "" if v is None else _jsonable(v) for k, v in rec.items()})


def read_records(text: str, fmt: str = "csv") -> list[dict]:
    """Parse output of :func:`write_records` back into dicts of typed values."""
    if fmt == "jsonl":
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# densecoding ") or f"v{SCHEMA_VERSION}" not in lines[0]:
        raise ValueError("missing or unsupported schema header")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))

    def typed(text: str):
        if text == "":
            return None
        if text in ("True", "False"):
            return text == "True"
        try:
            return int(text)
        except ValueError:
            pass
        try:
            return float(text)
        except ValueError:
            return text

    return [{k: typed(v) for k, v in row.items()} for row in rows]


# --- commands ------------------------------------------------------------------------


def cmd_simulate(spec: RunSpec) -> list[dict]:
    cfg = experiment_config(spec)
    res = protocol.run_experiment(cfg)
    lossless = protocol.run_experiment(protocol.ExperimentConfig.ideal(cfg.r, cfg.alpha))
    rec = {
        "r": cfg.r,
        "squeezing_db": cap.r_to_db(cfg.r),
        "alpha_re": cfg.alpha.real,
        "alpha_im": cfg.alpha.imag,
        "x_mean": res.x_channel.mean,
        "x_variance": res.x_channel.variance,
        "x_rel_db": res.x_channel.rel_db,
        "p_mean": res.p_channel.mean,
        "p_variance": res.p_channel.variance,
        "p_rel_db": res.p_channel.rel_db,
        "ideal_variance": lossless.x_channel.variance,
        "epr_variance": res.epr_variance,
        "epr_rel_db": 10 * math.log10(res.epr_variance / 0.5),
        "cross_cov": res.separability_cross_cov,
        "signal_photons": abs(cfg.alpha) ** 2,
        "squeezing_photons": cap.squeezing_photons(cfg.r),
        "n_bar": res.n_bar,
    }
    if cfg.antisqueeze_r_plus is not None:
        rec["excess_photons"] = cap.excess_photons(cfg.r, cfg.antisqueeze_r_plus)
    return [rec]


def cmd_capacity_curve(spec: RunSpec) -> list[dict]:
    cfg = experiment_config(spec)
    text = spec.get("capacity", "channels")
    if text is None:
        models = cap.default_channels(cfg.r)
    else:
        models = [_channel(t, cfg.r) for t in text.split(",") if t.strip()]
    n_min = spec.get("capacity", "n_min", 0.0)
    n_max = spec.get("capacity", "n_max", 5.0)
    n_points = spec.get("capacity", "n_points", 101)
    if n_points < 1 or n_max < n_min or n_min < 0:
        raise ConfigError("[capacity] need 0 <= n_min <= n_max and n_points >= 1")
    grid = np.linspace(n_min, n_max, n_points)
    records = []
    for model in models:
        for pt in cap.capacity_curve(model, grid):
            records.append({
                "channel": model.label,
                "n_bar": pt.n_bar,
                "info_nats": pt.info_nats,
                "info_bits": None if pt.info_nats is None else cap.nats_to_bits(pt.info_nats),
                "feasible": pt.feasible,
            })
    return records


def cmd_crossing(spec: RunSpec) -> list[dict]:
    cfg = experiment_config(spec)
    a = _channel(spec.get("crossing", "a", "dense_coding"), cfg.r)
    b = _channel(spec.get("crossing", "b", "squeezed_homodyne"), cfg.r)
    lo = spec.get("crossing", "n_lo", 0.5)
    hi = spec.get("crossing", "n_hi", 3.0)
    xtol = spec.get("crossing", "xtol", 1e-6)
    n = cap.crossing(a, b, (lo, hi), xtol)
    rec = {"a": a.label, "b": b.label, "n_bar": n, "info_nats": a(n)}
    if "dense_coding_optimal" in (a.kind, b.kind):
        rec["optimal_squeezing_db"] = cap.r_to_db(cap.optimal_squeezing(n))
    return [rec]


def cmd_traces(spec: RunSpec) -> list[dict]:
    cfg = experiment_config(spec)
    tc, mode = trace_config(spec)
    columns: dict[str, np.ndarray] = {}
    if mode == "time":
        if tc.span_hz != 0:
            raise ConfigError("[trace] time mode needs span_hz = 0")
        columns["time_s"] = tc.axis()
        for kind in traces.KINDS:
            for tr in traces.time_traces(cfg, tc, kind):
                columns[f"{kind}_{tr.channel}_db"] = tr.power_db
    else:
        columns["freq_hz"] = tc.axis()
        for tr in traces.spectrum_trace(cfg, tc):
            columns[f"{tr.kind}_{tr.channel}_db"] = tr.power_db
    keys = list(columns)
    return [{k: float(columns[k][i]) for k in keys} for i in range(tc.points)]


def cmd_convert(spec: RunSpec, db: float | None = None, r: float | None = None) -> list[dict]:
    if (db is None) == (r is None):
        raise ConfigError("convert needs exactly one of --db or --r")
    try:
        if db is not None:
            r = cap.db_to_r(db)
        else:
            db = cap.r_to_db(r)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return [{"squeezing_db": db, "r": r, "squeezing_photons": cap.squeezing_photons(r)}]


# --- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", type=Path, help="INI config file")
    common.add_argument("-s", "--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config value (repeatable)")
    common.add_argument("-o", "--output", type=Path, help="output file (default: stdout)")
    common.add_argument("-f", "--format", choices=("csv", "jsonl"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="densecoding",
        description="Continuous-variable dense coding: simulation, capacities, analyzer traces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run the dense-coding pipeline")
    sub.add_parser("capacity-curve", parents=[common], help="capacities versus mean photon number")
    p = sub.add_parser("crossing", parents=[common], help="photon number where two channels tie")
    p.add_argument("a", nargs="?", help="first channel, e.g. dense_coding:2dB")
    p.add_argument("b", nargs="?", help="second channel, e.g. squeezed_homodyne:2dB")
    p.add_argument("--bracket", nargs=2, type=float, metavar=("LO", "HI"))
    p = sub.add_parser("traces", parents=[common], help="emulated analyzer traces")
    p.add_argument("--seed", type=int, help="noise seed (overrides the config)")
    p.add_argument("--mode", choices=("time", "spectrum"))
    p = sub.add_parser("convert", parents=[common], help="convert between dB and r")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--db", type=float)
    g.add_argument("--r", type=float)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    overrides = list(args.overrides)
    if args.command == "crossing":
        overrides += [f"crossing.{k}={v}" for k, v in (("a", args.a), ("b", args.b)) if v]
        if args.bracket:
            overrides += [f"crossing.n_lo={args.bracket[0]}", f"crossing.n_hi={args.bracket[1]}"]
    if args.command == "traces" and args.mode:
        overrides.append(f"trace.mode={args.mode}")
    spec = RunSpec(args.command, args.config, overrides, args.output, args.format,
                   getattr(args, "seed", None))
    try:
        spec.values = load_values(spec.config_path, spec.overrides)
        if args.command == "convert":
            records = cmd_convert(spec, args.db, args.r)
        else:
            records = _COMMANDS[args.command](spec)
    except ConfigError as exc:
        print(f"densecoding: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PhysicsError as exc:
        print(f"densecoding: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    if spec.output is None:
        try:
            write_records(records, args.command, spec.format, sys.stdout)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the flush at exit
            sys.stdout = open(os.devnull, "w")
    else:
        with open(spec.output, "w", newline="") as fh:
            write_records(records, args.command, spec.format, fh)
        log.info("wrote %d record(s) to %s", len(records), spec.output)
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "capacity-curve": cmd_capacity_curve,
    "crossing": cmd_crossing,
    "traces": cmd_traces,
}


if __name__ == "__main__":
    sys.exit(main())
