"""Virtual greenhouse for closed-loop runs and fixture replay.

Air, humidity, and light relax toward a diurnal profile with first-order
dynamics; water temperature lags the air with its own time constant; pH
performs a slow random walk. Actuator commands feed back in: the cooling
pump pulls water temperature toward the reservoir ambient and the dosing
pump pulls pH toward neutral. Everything is deterministic for a given
seed and config.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Callable, Iterator, Mapping

from .configfile import ConfigError, get_float, get_int
from .control import ActuatorState, ControlDecision, Controller
from .sensors import CalibrationCurve, SensorKind, SensorReading, validate_reading

# Wall-clock anchor for simulated runs; hour 0 of the run is midnight.
RUN_EPOCH = datetime(2022, 5, 23, 0, 0, tzinfo=timezone.utc)

FIXTURE_HEADER = ("date", "time", "kind", "value")


class FixtureFormatError(ValueError):
    """A replay CSV does not match the expected date,time,kind,value layout."""


@dataclass
class SimConfig:
    rng_seed: int = 0
    dt: float = 15.0                 # seconds per step, matches the controller tick
    air_min: float = 26.0            # diurnal extremes seen in the field logs
    air_max: float = 34.0
    humidity_low: float = 46.0
    humidity_high: float = 84.0
    light_day: float = 83.0          # LDR divider reads low counts in daylight
    light_night: float = 1013.0
    peak_hour: float = 13.0          # hottest point of the day
    air_tau: float = 600.0           # relaxation time constants, seconds
    humidity_tau: float = 600.0
    light_tau: float = 300.0
    water_tau: float = 1800.0        # water lags air by about half an hour
    reservoir_temp: float = 28.0     # cool reserve the pump circulates from
    cooling_rate: float = 0.01       # degC/s toward reservoir while cooling on
    dosing_rate: float = 0.002       # pH/s toward neutral while dosing on
    ph_drift_std: float = 0.01       # random-walk step stddev per tick
    env_noise_air: float = 0.05      # process noise, not sensor noise
    env_noise_humidity: float = 0.2
    env_noise_light: float = 2.0
    start_time: datetime = RUN_EPOCH

    def validate(self) -> None:
        if self.dt <= 0:
            raise ConfigError("dt: must be positive")
        for name in ("air_tau", "humidity_tau", "light_tau", "water_tau"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name}: must be positive")
        for name in ("cooling_rate", "dosing_rate", "ph_drift_std",
                     "env_noise_air", "env_noise_humidity", "env_noise_light"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name}: must be nonnegative")
        if self.air_min > self.air_max:
            raise ConfigError("air_min: must not exceed air_max")
        if self.humidity_low > self.humidity_high:
            raise ConfigError("humidity_low: must not exceed humidity_high")

    @classmethod
    def from_mapping(cls, cfg: Mapping[str, str]) -> "SimConfig":
        kv = dict(cfg)
        config = cls(
            rng_seed=get_int(kv, "rng_seed", 0),
            dt=get_float(kv, "dt", 15.0),
            air_min=get_float(kv, "air_min", 26.0),
            air_max=get_float(kv, "air_max", 34.0),
            humidity_low=get_float(kv, "humidity_low", 46.0),
            humidity_high=get_float(kv, "humidity_high", 84.0),
            light_day=get_float(kv, "light_day", 83.0),
            light_night=get_float(kv, "light_night", 1013.0),
            peak_hour=get_float(kv, "peak_hour", 13.0),
            air_tau=get_float(kv, "air_tau", 600.0),
            humidity_tau=get_float(kv, "humidity_tau", 600.0),
            light_tau=get_float(kv, "light_tau", 300.0),
            water_tau=get_float(kv, "water_tau", 1800.0),
            reservoir_temp=get_float(kv, "reservoir_temp", 28.0),
            cooling_rate=get_float(kv, "cooling_rate", 0.01),
            dosing_rate=get_float(kv, "dosing_rate", 0.002),
            ph_drift_std=get_float(kv, "ph_drift_std", 0.01),
            env_noise_air=get_float(kv, "env_noise_air", 0.05),
            env_noise_humidity=get_float(kv, "env_noise_humidity", 0.2),
            env_noise_light=get_float(kv, "env_noise_light", 2.0),
        )
        config.validate()
        return config


@dataclass
class NoiseConfig:
    """Gaussian sensor sampling noise, per probe kind."""

    temp_std: float = 0.2
    humidity_std: float = 1.0
    light_std: float = 5.0
    ph_std: float = 0.05

    @classmethod
    def from_mapping(cls, cfg: Mapping[str, str]) -> "NoiseConfig":
        kv = dict(cfg)
        return cls(
            temp_std=get_float(kv, "noise_temp_std", 0.2),
            humidity_std=get_float(kv, "noise_humidity_std", 1.0),
            light_std=get_float(kv, "noise_light_std", 5.0),
            ph_std=get_float(kv, "noise_ph_std", 0.05),
        )


@dataclass
class EnvState:
    air_temp: float
    humidity: float
    light: float
    water_temp: float
    ph: float
    sim_time: float = 0.0  # seconds since run start


def _hour_of_day(config: SimConfig, sim_time: float) -> float:
    anchor = config.start_time
    midnight = anchor.replace(hour=0, minute=0, second=0, microsecond=0)
    offset = (anchor - midnight).total_seconds()
    return ((offset + sim_time) % 86400.0) / 3600.0


def _daylight(hour: float) -> float:
    # Half-sine day shape between 06:00 and 18:00, zero overnight.
    if 6.0 <= hour <= 18.0:
        return math.sin(math.pi * (hour - 6.0) / 12.0)
    return 0.0


def diurnal_profile(config: SimConfig, sim_time: float) -> tuple[float, float, float]:
    """Forcing bases (air_temp, light, humidity) at a simulated time.

    Air peaks at ``peak_hour`` and bottoms out twelve hours opposite;
    humidity runs in anti-phase with air; light follows the day curve.
    Periodic with a 24 h period.
    """
    hour = _hour_of_day(config, sim_time)
    phase = math.cos(2.0 * math.pi * (hour - config.peak_hour) / 24.0)
    air_mid = (config.air_min + config.air_max) / 2.0
    air_amp = (config.air_max - config.air_min) / 2.0
    hum_mid = (config.humidity_low + config.humidity_high) / 2.0
    hum_amp = (config.humidity_high - config.humidity_low) / 2.0
    air = air_mid + air_amp * phase
    humidity = hum_mid - hum_amp * phase
    light = config.light_night + (config.light_day - config.light_night) * _daylight(hour)
    return air, light, humidity


def initial_state(config: SimConfig) -> EnvState:
    """Start on the profile bases with water in equilibrium and neutral pH."""
    air, light, humidity = diurnal_profile(config, 0.0)
    return EnvState(air_temp=air, humidity=humidity, light=light,
                    water_temp=air, ph=7.0, sim_time=0.0)


def _relax(value: float, target: float, tau: float, dt: float) -> float:
    # Exact discrete solution of dx/dt = (target - x) / tau over one step.
    return target + (value - target) * math.exp(-dt / tau)


def _pull(value: float, target: float, amount: float) -> float:
    # Move toward target by at most `amount`, never overshooting.
    delta = target - value
    if abs(delta) <= amount:
        return target
    return value + math.copysign(amount, delta)


def env_step(
    state: EnvState,
    commands: ActuatorState,
    config: SimConfig,
    rng: random.Random,
) -> EnvState:
    """Advance the environment by one dt under the given actuator commands."""
    dt = config.dt
    air_base, light_base, hum_base = diurnal_profile(config, state.sim_time + dt)

    air = _relax(state.air_temp, air_base, config.air_tau, dt)
    if config.env_noise_air > 0:
        air += rng.gauss(0.0, config.env_noise_air)
    humidity = _relax(state.humidity, hum_base, config.humidity_tau, dt)
    if config.env_noise_humidity > 0:
        humidity += rng.gauss(0.0, config.env_noise_humidity)
    light = _relax(state.light, light_base, config.light_tau, dt)
    if config.env_noise_light > 0:
        light += rng.gauss(0.0, config.env_noise_light)

    water = _relax(state.water_temp, air, config.water_tau, dt)
    if commands.cooling:
        water = _pull(water, config.reservoir_temp, config.cooling_rate * dt)

    ph = state.ph
    if config.ph_drift_std > 0:
        ph += rng.gauss(0.0, config.ph_drift_std)
    if commands.dosing:
        ph = _pull(ph, 7.0, config.dosing_rate * dt)

    # Clamps last: physical bounds of the measured quantities.
    humidity = min(100.0, max(0.0, humidity))
    light = min(1023.0, max(0.0, light))

    return EnvState(air_temp=air, humidity=humidity, light=light,
                    water_temp=water, ph=ph, sim_time=state.sim_time + dt)


def sample_sensors(
    state: EnvState,
    noise: NoiseConfig,
    rng: random.Random,
    timestamp: datetime,
    ph_calibration: CalibrationCurve | None = None,
) -> dict[SensorKind, SensorReading]:
    """Sample all five probes, adding Gaussian noise per kind.

    The pH raw signal can be routed through a calibration curve; a wrong
    curve reproduces the impossible (negative) readings an uncalibrated
    probe logs. With zero noise and no curve the readings equal the state.
    """

    def draw(std: float) -> float:
        return rng.gauss(0.0, std) if std > 0 else 0.0

    ph_raw = state.ph + draw(noise.ph_std)
    ph_value = ph_calibration.apply(ph_raw) if ph_calibration is not None else ph_raw
    values = {
        SensorKind.GREENHOUSE_TEMPERATURE: state.air_temp + draw(noise.temp_std),
        SensorKind.HUMIDITY: state.humidity + draw(noise.humidity_std),
        SensorKind.LIGHT: state.light + draw(noise.light_std),
        SensorKind.WATER_TEMPERATURE: state.water_temp + draw(noise.temp_std),
        SensorKind.PH_LEVEL: ph_value,
    }
    return {
        kind: validate_reading(kind, value, timestamp) for kind, value in values.items()
    }


def replay_fixture(path: str | Path) -> list[SensorReading]:
    """Read a date,time,kind,value CSV into validated, time-ordered readings."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise FixtureFormatError(f"cannot read fixture {p}: {exc}") from exc

    rows = list(csv.reader(text.splitlines()))
    if not rows or tuple(h.strip() for h in rows[0]) != FIXTURE_HEADER:
        raise FixtureFormatError(f"{p}: expected header {','.join(FIXTURE_HEADER)}")

    readings: list[SensorReading] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 4:
            raise FixtureFormatError(f"{p}:{lineno}: expected 4 columns, got {len(row)}")
        date_text, time_text, kind_text, value_text = (cell.strip() for cell in row)
        try:
            timestamp = datetime.strptime(
                f"{date_text} {time_text}", "%m-%d-%Y %H:%M"
            ).replace(tzinfo=timezone.utc)
        except ValueError as exc:
            raise FixtureFormatError(f"{p}:{lineno}: bad date/time: {exc}") from exc
        try:
            kind = SensorKind(kind_text)
        except ValueError:
            raise FixtureFormatError(f"{p}:{lineno}: unknown sensor kind {kind_text!r}") from None
        try:
            value = float(value_text)
        except ValueError:
            raise FixtureFormatError(f"{p}:{lineno}: bad value {value_text!r}") from None
        readings.append(validate_reading(kind, value, timestamp))

    readings.sort(key=lambda r: r.timestamp)  # stable: file order breaks ties
    return readings


def write_fixture(path: str | Path, readings: list[SensorReading]) -> None:
    """Write readings in the same CSV layout replay_fixture reads."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(FIXTURE_HEADER)
        for reading in readings:
            writer.writerow([
                reading.timestamp.strftime("%m-%d-%Y"),
                reading.timestamp.strftime("%H:%M"),
                reading.kind.value,
                format(reading.value, ".2f"),
            ])


@dataclass
class TickRecord:
    time: datetime
    env: EnvState
    readings: dict[SensorKind, SensorReading]
    state: ActuatorState
    decision: ControlDecision


def closed_loop(
    sim_config: SimConfig,
    noise: NoiseConfig,
    controller: Controller,
    duration_seconds: float,
    ph_calibration: CalibrationCurve | None = None,
    on_tick: Callable[[TickRecord], None] | None = None,
) -> Iterator[TickRecord]:
    """Run simulator -> sensors -> controller for a simulated duration.

    Yields one record per tick. The controller's effective state from the
    previous tick drives the physics of the next one (one-tick actuation
    latency, like the real relay loop).
    """
    sim_config.validate()
    rng = random.Random(sim_config.rng_seed)
    env = initial_state(sim_config)
    commands = controller.effective_state()
    ticks = int(duration_seconds // sim_config.dt)
    for _ in range(ticks):
        env = env_step(env, commands, sim_config, rng)
        now = sim_config.start_time + timedelta(seconds=env.sim_time)
        readings = sample_sensors(env, noise, rng, now, ph_calibration)
        commands, decision = controller.step(readings, now)
        record = TickRecord(time=now, env=env, readings=readings,
                            state=commands, decision=decision)
        if on_tick is not None:
            on_tick(record)
        yield record


def run_closed_loop(
    sim_config: SimConfig,
    noise: NoiseConfig,
    controller: Controller,
    duration_seconds: float,
    ph_calibration: CalibrationCurve | None = None,
) -> list[TickRecord]:
    """Eager variant of closed_loop for tests and small runs."""
    return list(closed_loop(sim_config, noise, controller, duration_seconds,
                            ph_calibration=ph_calibration))
