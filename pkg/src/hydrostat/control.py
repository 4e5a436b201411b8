"""Threshold controller for the greenhouse actuators.

Compares validated readings against the ideal bands and drives the relay
actuators (cooling pump, pH dosing pump, optional ventilation). Hysteresis
and a minimum dwell time between transitions keep the relays from
chattering around a threshold. Invalid readings never drive an actuator:
by default the prior state is held and an alert is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Mapping

from .configfile import ConfigError, get_bool, get_float, get_str
from .sensors import SensorKind, SensorReading

ACTUATORS = ("cooling", "dosing", "ventilation")

# Alert reasons.
OUT_OF_IDEAL_RANGE = "OutOfIdealRange"
INVALID_READING = "InvalidReading"
HUMIDITY_LOW = "HumidityLow"
STALE_DATA = "StaleData"

# invalid_reading_policy values: hold the prior actuator state, or force Off.
POLICY_HOLD = "hold"
POLICY_OFF = "off"


class ConfigValidationError(ValueError):
    """A threshold or controller setting was rejected; names the field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(message)
        self.field = field_name


class ClockRegressionError(RuntimeError):
    """step() was called with a timestamp earlier than the previous tick."""


@dataclass(frozen=True)
class Thresholds:
    """Ideal bands for the controlled and monitored parameters."""

    ph_low: float = 6.5
    ph_high: float = 8.0
    water_low: float = 28.0
    water_high: float = 31.0
    air_low: float = 26.0
    air_high: float = 29.0
    humidity_min: float = 70.0

    def validate(self) -> None:
        for name, value in self.as_dict().items():
            if not isinstance(value, (int, float)) or not math.isfinite(float(value)):
                raise ConfigValidationError(name, f"{name}: must be a finite number")
        if self.ph_low >= self.ph_high:
            raise ConfigValidationError("ph_low", "ph_low must be below ph_high")
        if self.water_low >= self.water_high:
            raise ConfigValidationError("water_low", "water_low must be below water_high")
        if self.air_low >= self.air_high:
            raise ConfigValidationError("air_low", "air_low must be below air_high")
        if not 0.0 < self.humidity_min < 100.0:
            raise ConfigValidationError(
                "humidity_min", "humidity_min must be between 0 and 100 exclusive"
            )

    def as_dict(self) -> dict[str, float]:
        return {
            "ph_low": self.ph_low,
            "ph_high": self.ph_high,
            "water_low": self.water_low,
            "water_high": self.water_high,
            "air_low": self.air_low,
            "air_high": self.air_high,
            "humidity_min": self.humidity_min,
        }


def apply_config(raw: Mapping[str, object], base: Thresholds | None = None) -> Thresholds:
    """Merge a setpoint payload over ``base`` and validate the result.

    Raises ConfigValidationError naming the offending field; on rejection
    the caller's active thresholds are untouched because a new object is
    only returned on success.
    """
    current = (base or Thresholds()).as_dict()
    for key, value in raw.items():
        if key not in current:
            raise ConfigValidationError(key, f"unknown threshold field {key!r}")
        try:
            number = float(value)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            raise ConfigValidationError(key, f"{key}: not a number: {value!r}") from None
        if not math.isfinite(number):
            raise ConfigValidationError(key, f"{key}: must be finite")
        current[key] = number
    thresholds = Thresholds(**current)
    thresholds.validate()
    return thresholds


@dataclass(frozen=True)
class ActuatorState:
    cooling: bool = False
    dosing: bool = False
    ventilation: bool = False
    last_transition: Mapping[str, datetime | None] = field(
        default_factory=lambda: {name: None for name in ACTUATORS}
    )

    def get(self, name: str) -> bool:
        if name not in ACTUATORS:
            raise KeyError(name)
        return getattr(self, name)


@dataclass(frozen=True)
class Alert:
    parameter: str
    reason: str


@dataclass
class ControlDecision:
    """Outcome of one controller tick."""

    commands: dict[str, bool]
    alerts: list[Alert] = field(default_factory=list)
    # Commands the dwell timer refused to apply this tick, by actuator.
    suppressed: dict[str, bool] = field(default_factory=dict)
    # Actuators pinned by a manual override, with the pinned value.
    overridden: dict[str, bool] = field(default_factory=dict)


@dataclass
class ControlConfig:
    thresholds: Thresholds = field(default_factory=Thresholds)
    hysteresis_temp: float = 0.5   # degC below water_high before cooling releases
    hysteresis_ph: float = 0.2     # pH inside the band before dosing releases
    dwell_seconds: float = 60.0    # minimum time between transitions of one relay
    tick_seconds: float = 15.0
    invalid_reading_policy: str = POLICY_HOLD
    ventilation_enabled: bool = False

    def validate(self) -> None:
        self.thresholds.validate()
        for name in ("hysteresis_temp", "hysteresis_ph", "dwell_seconds", "tick_seconds"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ConfigValidationError(name, f"{name}: must be a nonnegative number")
        if self.tick_seconds <= 0:
            raise ConfigValidationError("tick_seconds", "tick_seconds: must be positive")
        if self.invalid_reading_policy not in (POLICY_HOLD, POLICY_OFF):
            raise ConfigValidationError(
                "invalid_reading_policy",
                f"invalid_reading_policy: expected 'hold' or 'off', "
                f"got {self.invalid_reading_policy!r}",
            )

    @classmethod
    def from_mapping(cls, cfg: Mapping[str, str]) -> "ControlConfig":
        """Build from parsed key/value config, leaving absent keys at defaults."""
        kv = dict(cfg)
        try:
            threshold_keys = Thresholds().as_dict()
            overrides = {k: get_float(kv, k, v) for k, v in threshold_keys.items()}
            config = cls(
                thresholds=Thresholds(**overrides),
                hysteresis_temp=get_float(kv, "hysteresis_temp", 0.5),
                hysteresis_ph=get_float(kv, "hysteresis_ph", 0.2),
                dwell_seconds=get_float(kv, "dwell_seconds", 60.0),
                tick_seconds=get_float(kv, "tick_seconds", 15.0),
                invalid_reading_policy=get_str(kv, "invalid_reading_policy", POLICY_HOLD),
                ventilation_enabled=get_bool(kv, "ventilation_enabled", False),
            )
        except ConfigError as exc:
            raise ConfigValidationError(str(exc).split(":", 1)[0], str(exc)) from exc
        config.validate()
        return config


def evaluate(
    readings: Mapping[SensorKind, SensorReading],
    config: ControlConfig,
    state: ActuatorState,
    now: datetime,
) -> ControlDecision:
    """Pure decision function for one tick.

    Missing readings hold the affected actuator and raise StaleData (only
    for parameters that actually drive an actuator). Invalid readings
    raise InvalidReading and follow the configured policy; they never set
    an actuator from their value.
    """
    t = config.thresholds
    fail_off = config.invalid_reading_policy == POLICY_OFF
    commands = {
        "cooling": state.cooling,
        "dosing": state.dosing,
        "ventilation": state.ventilation if config.ventilation_enabled else False,
    }
    alerts: list[Alert] = []

    water = readings.get(SensorKind.WATER_TEMPERATURE)
    if water is None:
        alerts.append(Alert("water_temp", STALE_DATA))
    elif not water.valid:
        alerts.append(Alert("water_temp", INVALID_READING))
        if fail_off:
            commands["cooling"] = False
    else:
        value = water.value
        if value > t.water_high:
            commands["cooling"] = True
            alerts.append(Alert("water_temp", OUT_OF_IDEAL_RANGE))
        elif value <= t.water_high - config.hysteresis_temp:
            commands["cooling"] = False
        # Between (water_high - hysteresis, water_high] the prior state holds.
        # Below water_low there is nothing to actuate (no heater fitted).

    ph = readings.get(SensorKind.PH_LEVEL)
    if ph is None:
        alerts.append(Alert("ph", STALE_DATA))
    elif not ph.valid:
        alerts.append(Alert("ph", INVALID_READING))
        if fail_off:
            commands["dosing"] = False
    else:
        value = ph.value
        if value < t.ph_low or value > t.ph_high:
            commands["dosing"] = True
            alerts.append(Alert("ph", OUT_OF_IDEAL_RANGE))
        elif t.ph_low + config.hysteresis_ph <= value <= t.ph_high - config.hysteresis_ph:
            commands["dosing"] = False
        # Inside the fringe between band edge and hysteresis margin: hold.

    air = readings.get(SensorKind.GREENHOUSE_TEMPERATURE)
    if air is None:
        if config.ventilation_enabled:
            alerts.append(Alert("greenhouse_temp", STALE_DATA))
    elif not air.valid:
        alerts.append(Alert("greenhouse_temp", INVALID_READING))
        if config.ventilation_enabled and fail_off:
            commands["ventilation"] = False
    else:
        value = air.value
        outside = value < t.air_low or value > t.air_high
        if outside:
            alerts.append(Alert("greenhouse_temp", OUT_OF_IDEAL_RANGE))
        if config.ventilation_enabled:
            if outside:
                commands["ventilation"] = True
            elif t.air_low + config.hysteresis_temp <= value <= t.air_high - config.hysteresis_temp:
                commands["ventilation"] = False

    humidity = readings.get(SensorKind.HUMIDITY)
    if humidity is not None:
        if not humidity.valid:
            alerts.append(Alert("humidity", INVALID_READING))
        elif humidity.value < t.humidity_min:
            # Monitor-only: there is no humidifier relay, so alert and move on.
            alerts.append(Alert("humidity", HUMIDITY_LOW))

    light = readings.get(SensorKind.LIGHT)
    if light is not None and not light.valid:
        alerts.append(Alert("light", INVALID_READING))

    return ControlDecision(commands=commands, alerts=alerts)


class Controller:
    """Stateful wrapper that applies dwell, overrides, and config updates."""

    def __init__(self, config: ControlConfig | None = None, state: ActuatorState | None = None):
        self.config = config or ControlConfig()
        self.config.validate()
        self._state = state or ActuatorState()
        self._overrides: dict[str, bool | None] = {name: None for name in ACTUATORS}
        self._last_tick: datetime | None = None

    @property
    def thresholds(self) -> Thresholds:
        return self.config.thresholds

    @property
    def state(self) -> ActuatorState:
        """Automatic state machine state, before manual overrides."""
        return self._state

    @property
    def overrides(self) -> dict[str, bool | None]:
        return dict(self._overrides)

    def effective_state(self) -> ActuatorState:
        """State actually driving the relays: overrides pin their actuator."""
        pinned = {
            name: value for name, value in self._overrides.items() if value is not None
        }
        if not pinned:
            return self._state
        return replace(self._state, **pinned)

    def apply_config(self, raw: Mapping[str, object]) -> Thresholds:
        """Apply a setpoint payload; on rejection active thresholds stay put."""
        thresholds = apply_config(raw, base=self.config.thresholds)
        self.config.thresholds = thresholds
        return thresholds

    def override(self, name: str, mode: str) -> None:
        """Pin an actuator on or off, or return it to automatic control."""
        if name not in ACTUATORS:
            raise KeyError(f"unknown actuator {name!r}")
        if mode not in ("on", "off", "auto"):
            raise ValueError(f"override mode must be on, off, or auto, got {mode!r}")
        self._overrides[name] = None if mode == "auto" else (mode == "on")

    def step(
        self, readings: Mapping[SensorKind, SensorReading], now: datetime
    ) -> tuple[ActuatorState, ControlDecision]:
        """Advance one tick. Rejects clocks that run backwards."""
        if self._last_tick is not None and now < self._last_tick:
            raise ClockRegressionError(
                f"tick time {now.isoformat()} is before previous tick "
                f"{self._last_tick.isoformat()}"
            )
        decision = evaluate(readings, self.config, self._state, now)

        current = {name: self._state.get(name) for name in ACTUATORS}
        transitions = dict(self._state.last_transition)
        for name in ACTUATORS:
            target = decision.commands[name]
            if target == current[name]:
                continue
            since = transitions.get(name)
            if since is not None and (now - since).total_seconds() < self.config.dwell_seconds:
                decision.suppressed[name] = target
                continue
            current[name] = target
            transitions[name] = now

        self._state = ActuatorState(
            cooling=current["cooling"],
            dosing=current["dosing"],
            ventilation=current["ventilation"],
            last_transition=transitions,
        )
        self._last_tick = now

        for name, value in self._overrides.items():
            if value is not None:
                decision.overridden[name] = value
        return self.effective_state(), decision
