"""Command line entry point.

One binary with five modes: live simulation (sim), fixture replay into the
telemetry store (replay), the HTTP service (serve), the full simulated
control loop (closed-loop), and the evaluation reports (analyze). Exit
codes: 0 on success, 2 for usage or config problems, 1 for runtime
failures. Flag values win over config file values, which win over
defaults. Runs are deterministic for a given config and seed.
"""

from __future__ import annotations

import argparse
import csv as _csv
import json
import random
import re
import sys
import time
from collections import Counter
from datetime import timedelta
from pathlib import Path

from .configfile import ConfigError, get_float, load_kv
from .control import (
    ACTUATORS,
    ActuatorState,
    ConfigValidationError,
    ControlConfig,
    Controller,
)
from .evaluation import (
    SurveyFormatError,
    SurveyMatrix,
    compare_trials,
    format_truncated,
    load_trials_csv,
)
from .sensors import PARAMETER_NAMES, SensorKind
from .simulator import (
    FixtureFormatError,
    NoiseConfig,
    SimConfig,
    closed_loop,
    env_step,
    initial_state,
    replay_fixture,
    sample_sensors,
    write_fixture,
)
from .telemetry import (
    Channel,
    TelemetryError,
    TelemetryHTTPServer,
    TelemetryService,
    format_rfc3339,
)

SENSOR_LOG_NAMES = (
    "greenhouse_temperature.csv",
    "humidity.csv",
    "ph_level.csv",
    "light.csv",
    "water_temperature.csv",
)

_DURATION_RE = re.compile(r"^(\d+(?:\.\d+)?)(h|m|s)?$")


def fixtures_dir() -> Path:
    return Path(__file__).parent / "fixtures"


def bundled_fixture(name: str) -> Path:
    return fixtures_dir() / name


def bundled_sensor_logs() -> list[Path]:
    return [bundled_fixture(name) for name in SENSOR_LOG_NAMES]


def parse_duration(text: str) -> float:
    """'48h', '90m', '30s', or plain seconds; returns seconds."""
    match = _DURATION_RE.match(text.strip())
    if not match:
        raise ConfigError(f"bad duration {text!r}; use forms like 48h, 90m, 30s")
    value = float(match.group(1))
    unit = match.group(2) or "s"
    return value * {"h": 3600.0, "m": 60.0, "s": 1.0}[unit]


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    return load_kv(path)


def _check_fixtures(paths: list[str]) -> list[Path]:
    resolved = []
    for raw in paths:
        p = Path(raw)
        if not p.is_file():
            raise ConfigError(f"fixture not found: {p}")
        resolved.append(p)
    return resolved


def _merged_readings(paths: list[Path]):
    readings = []
    for path in paths:
        readings.extend(replay_fixture(path))
    field_order = {
        SensorKind.GREENHOUSE_TEMPERATURE: 1,
        SensorKind.HUMIDITY: 2,
        SensorKind.PH_LEVEL: 3,
        SensorKind.LIGHT: 4,
        SensorKind.WATER_TEMPERATURE: 5,
    }
    readings.sort(key=lambda r: (r.timestamp, field_order[r.kind]))
    return readings


def _round6(value: float) -> float:
    return round(float(value), 6)


def _series_stats(values: list[float]) -> dict[str, float]:
    if not values:
        return {"count": 0}
    return {
        "count": len(values),
        "min": _round6(min(values)),
        "max": _round6(max(values)),
        "mean": _round6(sum(values) / len(values)),
    }


def _json_out(payload) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ----- sim -----

def cmd_sim(args) -> int:
    cfg = _load_config(args.config)
    sim_config = SimConfig.from_mapping(cfg)
    noise = NoiseConfig.from_mapping(cfg)
    if args.seed is not None:
        sim_config.rng_seed = args.seed
    duration = parse_duration(args.duration)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    rng = random.Random(sim_config.rng_seed)
    env = initial_state(sim_config)
    idle = ActuatorState()
    readings = []
    series: dict[str, list[float]] = {name: [] for name in PARAMETER_NAMES.values()}
    ticks = int(duration // sim_config.dt)
    for _ in range(ticks):
        env = env_step(env, idle, sim_config, rng)
        now = sim_config.start_time + timedelta(seconds=env.sim_time)
        sampled = sample_sensors(env, noise, rng, now)
        for kind, reading in sampled.items():
            readings.append(reading)
            series[PARAMETER_NAMES[kind]].append(reading.value)

    log_path = out_dir / "readings.csv"
    write_fixture(log_path, readings)
    summary = {
        "mode": "sim",
        "duration_seconds": _round6(duration),
        "ticks": ticks,
        "readings": len(readings),
        "parameters": {name: _series_stats(values) for name, values in series.items()},
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if args.json:
        _json_out(summary)
    else:
        print(f"simulated {ticks} ticks ({duration:g}s), wrote {log_path}")
    return 0


# ----- replay -----

def cmd_replay(args) -> int:
    cfg = _load_config(args.config)
    control_config = ControlConfig.from_mapping(cfg)
    channel = Channel.from_mapping(cfg)
    fixture_paths = _check_fixtures(args.fixture or [str(p) for p in bundled_sensor_logs()])
    readings = _merged_readings(fixture_paths)

    out_dir = Path(args.out)
    data_dir = Path(args.data_dir) if args.data_dir else out_dir / "telemetry"
    out_dir.mkdir(parents=True, exist_ok=True)

    controller = Controller(config=control_config)
    # Replays import historical data, so the live rate limit is off.
    service = TelemetryService(
        channel, data_dir=data_dir, controller=controller, min_update_interval=0.0
    )
    try:
        entries = service.preload_readings(channel.channel_id, readings)
    except TelemetryError as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        service.close()
        return 1

    alert_counts: Counter = Counter()
    decision_rows = 0
    if args.controller:
        by_time: dict = {}
        for reading in readings:
            by_time.setdefault(reading.timestamp, {})[reading.kind] = reading
        log_path = out_dir / "decisions.csv"
        with open(log_path, "w", encoding="utf-8", newline="") as handle:
            writer = _csv.writer(handle, lineterminator="\n")
            writer.writerow(["time", *ACTUATORS, "alerts", "suppressed"])
            for moment in sorted(by_time):
                state, decision = controller.step(by_time[moment], moment)
                service.record_decision(moment, decision)
                for alert in decision.alerts:
                    alert_counts[alert.reason] += 1
                writer.writerow([
                    format_rfc3339(moment),
                    *[str(state.get(name)).lower() for name in ACTUATORS],
                    "|".join(f"{a.parameter}:{a.reason}" for a in decision.alerts),
                    "|".join(
                        f"{name}:{str(v).lower()}" for name, v in decision.suppressed.items()
                    ),
                ])
                decision_rows += 1
    service.close()

    summary = {
        "mode": "replay",
        "fixtures": [str(p) for p in fixture_paths],
        "entries": entries,
        "decision_ticks": decision_rows,
        "alerts": dict(sorted(alert_counts.items())),
    }
    if args.json:
        _json_out(summary)
    else:
        print(f"replayed {entries} entries from {len(fixture_paths)} fixture(s) into {data_dir}")
        if args.controller:
            details = ", ".join(f"{k}={v}" for k, v in sorted(alert_counts.items())) or "none"
            print(f"controller ticks: {decision_rows}, alerts: {details}")
    return 0


# ----- serve -----

def _build_service(cfg: dict[str, str], data_dir: Path,
                   min_update_interval: float | None) -> TelemetryService:
    control_config = ControlConfig.from_mapping(cfg)
    channel = Channel.from_mapping(cfg)
    interval = (
        min_update_interval
        if min_update_interval is not None
        else get_float(cfg, "min_update_interval", 15.0)
    )
    controller = Controller(config=control_config)
    return TelemetryService(
        channel, data_dir=data_dir, controller=controller, min_update_interval=interval
    )


def cmd_serve(args) -> int:
    cfg = _load_config(args.config)
    fixture_paths = _check_fixtures(args.fixture or [])
    static_dir = None
    if args.static_dir:
        static_dir = Path(args.static_dir)
        if not static_dir.is_dir():
            raise ConfigError(f"static dir not found: {static_dir}")
    data_dir = Path(args.data_dir or "telemetry-data")
    service = _build_service(cfg, data_dir, args.min_update_interval)

    if fixture_paths:
        readings = _merged_readings(fixture_paths)
        for channel_id in service.channel_ids():
            service.preload_readings(channel_id, readings)

    server = TelemetryHTTPServer(
        service, host=args.host, port=args.port, static_dir=static_dir
    )
    print(f"serving on {server.url} (data dir {data_dir})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        service.close()
    return 0


# ----- closed-loop -----

def cmd_closed_loop(args) -> int:
    cfg = _load_config(args.config)
    control_config = ControlConfig.from_mapping(cfg)
    sim_config = SimConfig.from_mapping(cfg)
    noise = NoiseConfig.from_mapping(cfg)
    channel = Channel.from_mapping(cfg)
    if args.seed is not None:
        sim_config.rng_seed = args.seed
    sim_config.dt = control_config.tick_seconds
    duration = parse_duration(args.duration)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    controller = Controller(config=control_config)
    service = TelemetryService(
        channel,
        data_dir=out_dir / "telemetry",
        controller=controller,
        # Tick cadence equals the rate limit floor, so live limiting stays on.
        min_update_interval=min(15.0, control_config.tick_seconds),
    )

    server = None
    if args.port is not None:
        server = TelemetryHTTPServer(service, host=args.host, port=args.port)
        server.start()
        print(f"serving on {server.url} during the run", flush=True)

    series: dict[str, list[float]] = {name: [] for name in PARAMETER_NAMES.values()}
    transition_counts = {name: 0 for name in ACTUATORS}
    alert_counts: Counter = Counter()
    previous = {name: False for name in ACTUATORS}
    ticks = 0
    entries = 0

    field_by_kind = {
        kind: channel.field_for_kind(kind) for kind in SensorKind
    }
    try:
        for record in closed_loop(sim_config, noise, controller, duration):
            ticks += 1
            fields = {}
            for kind, reading in record.readings.items():
                series[PARAMETER_NAMES[kind]].append(reading.value)
                field_key = field_by_kind[kind]
                if field_key is not None:
                    fields[field_key] = format(reading.value, ".2f")
            service.ingest_update(
                channel.channel_id,
                channel.write_key,
                fields,
                created_at=format_rfc3339(record.time),
            )
            entries += 1
            service.record_decision(record.time, record.decision)
            for alert in record.decision.alerts:
                alert_counts[alert.reason] += 1
            for name in ACTUATORS:
                on = record.state.get(name)
                if on != previous[name]:
                    transition_counts[name] += 1
                    previous[name] = on
    except TelemetryError as exc:
        print(f"closed-loop ingest failed: {exc}", file=sys.stderr)
        if server is not None:
            server.stop()
        service.close()
        return 1

    summary = {
        "mode": "closed-loop",
        "seed": sim_config.rng_seed,
        "duration_seconds": _round6(duration),
        "tick_seconds": _round6(sim_config.dt),
        "ticks": ticks,
        "entries": entries,
        "parameters": {name: _series_stats(values) for name, values in series.items()},
        "transitions": transition_counts,
        "alerts": dict(sorted(alert_counts.items())),
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    if args.json:
        _json_out(summary)
    else:
        print(f"ran {ticks} ticks ({duration:g}s simulated), {entries} entries ingested")
        for name, count in transition_counts.items():
            print(f"  {name} transitions: {count}")

    if server is not None:
        print("run complete; still serving (Ctrl+C to stop)", flush=True)
        try:
            while True:
                time.sleep(1)
        except KeyboardInterrupt:
            pass
        finally:
            server.stop()
    service.close()
    return 0


# ----- analyze -----

def cmd_analyze(args) -> int:
    if not args.trials and not args.survey:
        raise ConfigError("analyze needs --trials and/or --survey")

    payload: dict = {}
    text_blocks: list[str] = []

    if args.trials:
        prototype, commercial = load_trials_csv(args.trials)
        report = compare_trials(prototype, commercial)
        payload["trials"] = {
            "cells": [
                {
                    "parameter": c.parameter,
                    "trial": c.trial,
                    "prototype": c.prototype,
                    "commercial": c.commercial,
                    "pct_diff": c.pct_diff,
                    "prototype_in_range": c.prototype_in_range,
                    "commercial_in_range": c.commercial_in_range,
                }
                for c in report.cells
            ]
        }
        text_blocks.append("Trial comparison (percentage difference)\n" + report.to_text())
        if args.out:
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "trials.csv").write_text(report.to_csv(), encoding="utf-8")

    if args.survey:
        matrix = SurveyMatrix.from_csv(args.survey)
        stats = matrix.item_stats()
        grand = matrix.grand()
        raw_alpha, std_alpha = matrix.alpha()
        payload["survey"] = {
            "respondents": int(matrix.scores.shape[0]),
            "items": [
                {
                    "label": label,
                    "mean": s.mean,
                    "std_dev": s.std_dev,
                    "agreement": s.band.agreement,
                    "quality": s.band.quality,
                }
                for label, s in zip(matrix.items, stats)
            ],
            "grand_mean": {
                "mean": grand.mean,
                "rounded": grand.rounded,
                "agreement": grand.band.agreement,
                "quality": grand.band.quality,
            },
            "alpha": {"raw": raw_alpha, "standardized": std_alpha},
        }
        lines = ["Survey summary", f"{'item':<24}{'mean':>8}{'sd':>8}  interpretation"]
        for label, s in zip(matrix.items, stats):
            lines.append(
                f"{label:<24}{s.mean:>8.2f}{s.std_dev:>8.2f}  "
                f"{s.band.agreement} / {s.band.quality}"
            )
        lines.append(
            f"{'grand mean':<24}{grand.rounded:>8.2f}{'':>8}  "
            f"{grand.band.agreement} / {grand.band.quality}"
        )
        lines.append(
            f"Cronbach alpha: raw {format_truncated(raw_alpha, 3)}, "
            f"standardized {format_truncated(std_alpha, 3)} "
            f"({len(matrix.items)} items)"
        )
        text_blocks.append("\n".join(lines) + "\n")

    if args.json:
        _json_out(payload)
    else:
        sys.stdout.write("\n".join(text_blocks))
    return 0


# ----- entry point -----

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hydrostat",
        description="Hydroponic greenhouse monitoring, control, and evaluation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, duration_default: str | None = None) -> None:
        p.add_argument("--config", help="key/value config file")
        p.add_argument("--seed", type=int, help="RNG seed override")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if duration_default is not None:
            p.add_argument("--duration", default=duration_default,
                           help="simulated duration, e.g. 48h, 90m, 30s")

    p_sim = sub.add_parser("sim", help="run the environment simulator alone")
    common(p_sim, duration_default="24h")
    p_sim.add_argument("--out", default="out", help="output directory")

    p_replay = sub.add_parser("replay", help="replay fixture CSVs into the telemetry store")
    common(p_replay)
    p_replay.add_argument("--fixture", action="append",
                          help="fixture CSV path (repeatable; default: bundled logs)")
    p_replay.add_argument("--controller", action="store_true",
                          help="also pipe readings through the controller")
    p_replay.add_argument("--out", default="out", help="output directory")
    p_replay.add_argument("--data-dir", help="telemetry store directory")

    p_serve = sub.add_parser("serve", help="run the telemetry HTTP service")
    common(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8100)
    p_serve.add_argument("--data-dir", help="telemetry store directory")
    p_serve.add_argument("--fixture", action="append",
                         help="fixture CSV to preload (repeatable)")
    p_serve.add_argument("--static-dir", help="also serve static files from this directory")
    p_serve.add_argument("--min-update-interval", type=float,
                         help="seconds between accepted writes (default 15)")

    p_loop = sub.add_parser("closed-loop",
                            help="simulator, controller, and telemetry in one process")
    common(p_loop, duration_default="48h")
    p_loop.add_argument("--out", default="out", help="output directory")
    p_loop.add_argument("--host", default="127.0.0.1")
    p_loop.add_argument("--port", type=int,
                        help="also expose the HTTP service during and after the run")

    p_analyze = sub.add_parser("analyze", help="trial comparison and survey statistics")
    common(p_analyze)
    p_analyze.add_argument("--trials", help="parameter,trial,prototype,commercial CSV")
    p_analyze.add_argument("--survey", help="Likert survey CSV (header + 1..5 cells)")
    p_analyze.add_argument("--out", help="directory for machine-readable CSV output")

    return parser


_COMMANDS = {
    "sim": cmd_sim,
    "replay": cmd_replay,
    "serve": cmd_serve,
    "closed-loop": cmd_closed_loop,
    "analyze": cmd_analyze,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "seed", None) is not None and args.seed < 0:
        print("--seed must be nonnegative", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ConfigValidationError, SurveyFormatError, FixtureFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except TelemetryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
