"""
Sensor plausibility checks and pH probe calibration.

Analog pH probes drift: the voltage-to-pH line shifts with electrode age
and temperature. This script fits a two-point calibration from buffer
solutions, shows what an uncalibrated probe does to the readings, and
replays the bundled pH log to count how many samples a validity check
would reject before they ever reach the controller.
"""

from datetime import datetime, timezone

from hydrostat import (
    CalibrationCurve,
    SensorKind,
    apply_calibration,
    bundled_fixture,
    fit_ph_calibration,
    replay_fixture,
    standard_range,
    validate_reading,
)


def show_plausibility_ranges():
    """Print the accepted raw range for every sensor kind."""
    print("Plausibility ranges (readings outside are flagged invalid):")
    for kind in SensorKind:
        low, high = standard_range(kind)
        print(f"  {kind.value:<22} {low:>8.2f} .. {high:.2f}")
    print()


def calibrate_from_buffers():
    # Two-point calibration: immerse the probe in pH 4.0 and pH 7.0
    # buffer solutions and note the raw readings.
    raw_in_ph4 = 3.62
    raw_in_ph7 = 6.71
    curve = fit_ph_calibration((raw_in_ph4, 4.0), (raw_in_ph7, 7.0))
    print(f"Fitted curve: slope={curve.slope:.4f} offset={curve.offset:+.4f}")

    for raw in (3.62, 5.0, 6.71, 8.4):
        corrected = apply_calibration(curve, raw)
        print(f"  raw {raw:5.2f} -> corrected {corrected:5.2f}")
    print()
    return curve


def miscalibrated_probe():
    # A probe with a stale calibration can push readings below 0,
    # which is how negative pH values end up in real field logs.
    stale = CalibrationCurve(slope=1.05, offset=-11.2)
    now = datetime(2022, 5, 23, 12, 0, tzinfo=timezone.utc)
    print("Stale calibration on a healthy pH 7 solution:")
    for raw in (6.4, 7.0, 7.6):
        corrected = apply_calibration(stale, raw)
        reading = validate_reading(SensorKind.PH_LEVEL, corrected, now)
        status = "ok" if reading.valid else "INVALID"
        print(f"  raw {raw:4.1f} -> {corrected:6.2f}  [{status}]")
    print()


def replay_bundled_ph_log():
    readings = replay_fixture(bundled_fixture("ph_level.csv"))
    invalid = [r for r in readings if not r.valid]
    print(f"Bundled pH log: {len(readings)} samples, {len(invalid)} invalid")
    for r in invalid:
        print(f"  {r.timestamp:%Y-%m-%d %H:%M} value {r.value}")


if __name__ == "__main__":
    show_plausibility_ranges()
    calibrate_from_buffers()
    miscalibrated_probe()
    replay_bundled_ph_log()
