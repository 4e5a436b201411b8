"""
Closed-loop run of the virtual greenhouse.

The simulator drives air temperature through a sinusoidal day that peaks
at 13:00, humidity in anti-phase, and a light divider that reads low in
daylight. Water temperature relaxes toward air temperature, so on a hot
afternoon it climbs past the cutoff and the controller switches the
reservoir cooling pump on. This script runs 48 hours at a 15 second
tick, prints an hourly strip chart, and summarizes how well the loop
held water temperature in its ideal band.
"""

from collections import Counter

from hydrostat import (
    ControlConfig,
    Controller,
    NoiseConfig,
    SimConfig,
    run_closed_loop,
)

HOURS = 48
TICK_SECONDS = 15.0


def run():
    sim = SimConfig(rng_seed=2022)
    controller = Controller(ControlConfig(tick_seconds=TICK_SECONDS))
    records = run_closed_loop(sim, NoiseConfig(), controller, HOURS * 3600)
    print(f"Simulated {HOURS} h in {len(records)} ticks of {TICK_SECONDS:.0f} s")
    return records


def hourly_strip(records):
    print(f"\n{'hour':>4} {'air':>6} {'water':>6} {'hum':>5} {'light':>5} {'pH':>5} cooling")
    per_hour = int(3600 / TICK_SECONDS)
    for hour in range(0, HOURS, 2):
        rec = records[hour * per_hour]
        env = rec.env
        flag = "On" if rec.state.cooling else "Off"
        print(f"{hour:>4} {env.air_temp:>6.1f} {env.water_temp:>6.1f}"
              f" {env.humidity:>5.0f} {env.light:>5.0f} {env.ph:>5.2f} {flag:>7}")


def summarize(records):
    water = [r.env.water_temp for r in records]
    in_band = sum(1 for w in water if 26.0 <= w <= 33.0)
    print(f"\nWater temperature: min {min(water):.2f}  max {max(water):.2f}")
    print(f"In 26..33 band: {in_band / len(records):.1%} of ticks")

    # Count actuator flips; dwell keeps these far apart.
    flips = Counter()
    previous = records[0].state
    for rec in records[1:]:
        for name in ("cooling", "dosing", "ventilation"):
            if getattr(rec.state, name) != getattr(previous, name):
                flips[name] += 1
        previous = rec.state
    print("Actuator transitions:", dict(flips))

    alerts = Counter(a.reason for r in records for a in r.decision.alerts)
    print("Alerts raised:", dict(alerts))


if __name__ == "__main__":
    records = run()
    hourly_strip(records)
    summarize(records)
