"""
Bang-bang actuator control with hysteresis and minimum dwell.

A naive threshold comparison chatters: water temperature hovering at the
cutoff toggles the cooling pump every tick. The controller avoids that
two ways. Hysteresis keeps the pump on until the reading falls a margin
below the cutoff, and a dwell timer refuses to flip any actuator twice
within a minimum interval. This script ramps water temperature up and
back down and prints every transition, then shows how an invalid pH
reading freezes the dosing pump instead of acting on garbage.
"""

from datetime import datetime, timedelta, timezone

from hydrostat import ControlConfig, Controller, SensorKind, SensorReading

START = datetime(2022, 5, 23, 9, 0, tzinfo=timezone.utc)


def reading(kind, value, when, valid=True):
    return SensorReading(kind=kind, value=value, timestamp=when, valid=valid)


def ramp_demo():
    controller = Controller(ControlConfig())
    print("Water temperature ramp (cutoff 29.0, release 26.0):")
    print(f"{'minute':>6} {'water':>6} {'cooling':>8} note")

    previous = controller.state.cooling
    # 0.5 degree per minute up to 32, then back down to 24.
    profile = [24.0 + 0.5 * i for i in range(17)]
    profile += list(reversed(profile))[1:]
    for minute, water in enumerate(profile):
        now = START + timedelta(minutes=minute)
        readings = {
            SensorKind.WATER_TEMPERATURE: reading(SensorKind.WATER_TEMPERATURE, water, now),
            SensorKind.PH_LEVEL: reading(SensorKind.PH_LEVEL, 7.0, now),
        }
        state, decision = controller.step(readings, now)
        note = ""
        if state.cooling != previous:
            note = "-> transition"
            previous = state.cooling
        if decision.suppressed.get("cooling"):
            note = "(dwell suppressed)"
        if note:
            flag = "On" if state.cooling else "Off"
            print(f"{minute:>6} {water:>6.1f} {flag:>8} {note}")
    print()


def invalid_hold_demo():
    controller = Controller(ControlConfig())
    print("Invalid pH readings hold the dosing pump:")

    # Acidic solution turns dosing on.
    now = START
    readings = {SensorKind.PH_LEVEL: reading(SensorKind.PH_LEVEL, 5.2, now)}
    state, _ = controller.step(readings, now)
    print(f"  pH 5.20 valid   -> dosing {'On' if state.dosing else 'Off'}")

    # A broken probe reports -4.1; the controller keeps the last state
    # and raises an alert instead of reacting to the value.
    for minute in (2, 4, 6):
        now = START + timedelta(minutes=minute)
        readings = {
            SensorKind.PH_LEVEL: reading(SensorKind.PH_LEVEL, -4.1, now, valid=False)
        }
        state, decision = controller.step(readings, now)
        alerts = ", ".join(f"{a.parameter}:{a.reason}" for a in decision.alerts)
        print(f"  pH -4.10 invalid -> dosing {'On' if state.dosing else 'Off'}  [{alerts}]")
    print()


def override_demo():
    controller = Controller(ControlConfig())
    now = START
    readings = {SensorKind.WATER_TEMPERATURE: reading(SensorKind.WATER_TEMPERATURE, 24.0, now)}

    controller.override("cooling", "on")
    state, decision = controller.step(readings, now)
    print("Manual override pins cooling On even with cool water:")
    print(f"  water 24.0 -> cooling {'On' if state.cooling else 'Off'}"
          f" (overridden: {decision.overridden})")

    controller.override("cooling", "auto")
    state, _ = controller.step(readings, now + timedelta(minutes=5))
    print(f"  back to auto -> cooling {'On' if state.cooling else 'Off'}")


if __name__ == "__main__":
    ramp_demo()
    invalid_hold_demo()
    override_demo()
