"""Sensor models for the five monitored greenhouse parameters.

Each probe has a reportable range; a reading outside it indicates a sensor
or calibration fault rather than a plausible environment state, so it is
kept but flagged instead of silently dropped. The pH probe additionally
carries a two-point affine calibration; an uncalibrated or miscalibrated
probe is what produces impossible readings such as negative pH.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from enum import Enum


class SensorKind(Enum):
    GREENHOUSE_TEMPERATURE = "GreenhouseTemperature"  # DHT11 air probe, degC
    HUMIDITY = "Humidity"                             # DHT11 relative humidity, %
    WATER_TEMPERATURE = "WaterTemperature"            # DS18B20 immersion probe, degC
    PH_LEVEL = "PhLevel"                              # analog pH probe
    LIGHT = "Light"                                   # LDR on a 10-bit ADC, counts


# Reportable range per probe, inclusive on both ends.
STANDARD_RANGES: dict[SensorKind, tuple[float, float]] = {
    SensorKind.GREENHOUSE_TEMPERATURE: (0.0, 50.0),
    SensorKind.HUMIDITY: (20.0, 90.0),
    SensorKind.WATER_TEMPERATURE: (-55.0, 125.0),
    SensorKind.PH_LEVEL: (0.0, 14.0),
    SensorKind.LIGHT: (0.0, 1023.0),
}

# Short names used in alerts, logs, and reports.
PARAMETER_NAMES: dict[SensorKind, str] = {
    SensorKind.GREENHOUSE_TEMPERATURE: "greenhouse_temp",
    SensorKind.HUMIDITY: "humidity",
    SensorKind.WATER_TEMPERATURE: "water_temp",
    SensorKind.PH_LEVEL: "ph",
    SensorKind.LIGHT: "light",
}


def standard_range(kind: SensorKind) -> tuple[float, float]:
    """Inclusive (low, high) bounds a healthy probe can report."""
    return STANDARD_RANGES[kind]


@dataclass(frozen=True)
class SensorReading:
    kind: SensorKind
    value: float
    timestamp: datetime
    valid: bool


def validate_reading(kind: SensorKind, value: float, timestamp: datetime) -> SensorReading:
    """Build a reading with its validity flag set from the standard range.

    Non-finite values are rejected outright: they are transport garbage,
    not a measurement, and must not reach the controller at all.
    """
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{kind.value}: reading must be finite, got {value!r}")
    low, high = STANDARD_RANGES[kind]
    return SensorReading(kind, value, timestamp, low <= value <= high)


@dataclass(frozen=True)
class CalibrationCurve:
    """Affine map from the probe's raw signal to reported value."""

    slope: float
    offset: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.slope) and math.isfinite(self.offset)):
            raise ValueError("calibration slope and offset must be finite")
        if self.slope == 0.0:
            raise ValueError("calibration slope must be nonzero")

    def apply(self, raw: float) -> float:
        return self.slope * raw + self.offset


IDENTITY_CALIBRATION = CalibrationCurve(slope=1.0, offset=0.0)


def fit_ph_calibration(
    point_a: tuple[float, float], point_b: tuple[float, float]
) -> CalibrationCurve:
    """Fit slope/offset through two (raw, ph) buffer points.

    Two points with the same raw signal cannot define a line, and two
    points with the same pH would give a zero slope; both are degenerate.
    """
    raw_a, ph_a = point_a
    raw_b, ph_b = point_b
    if raw_a == raw_b:
        raise ValueError("calibration points share the same raw value")
    if ph_a == ph_b:
        raise ValueError("calibration points share the same pH value")
    slope = (ph_b - ph_a) / (raw_b - raw_a)
    offset = ph_a - slope * raw_a
    return CalibrationCurve(slope=slope, offset=offset)


def apply_calibration(curve: CalibrationCurve, raw: float) -> float:
    if not math.isfinite(raw):
        raise ValueError(f"raw signal must be finite, got {raw!r}")
    return curve.apply(raw)
