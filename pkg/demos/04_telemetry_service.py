"""
Channel telemetry: ingest, rate limit, query, export, durability.

The telemetry service stores sensor updates in numbered channels, one
append-only log file per channel. Writes need the channel's write key
and are throttled to one update per 15 seconds; reads come back as
feeds in ascending entry order. Values are kept exactly as submitted,
so an export after a wipe-and-reload is byte identical. This script
exercises the whole round trip in a temporary directory, then reopens
the store to show that entries and id numbering survive a restart.
"""

import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path

from hydrostat import Channel, TelemetryService
from hydrostat.telemetry import RateLimitError

T0 = datetime(2022, 5, 23, 12, 0, tzinfo=timezone.utc)


def stamp(offset_seconds):
    return (T0 + timedelta(seconds=offset_seconds)).strftime("%Y-%m-%dT%H:%M:%SZ")


def ingest_some(service):
    rows = [
        {"field1": "27.5", "field2": "61", "field3": "7.01", "field5": "28.9"},
        {"field1": "28.1", "field2": "60", "field3": "6.97", "field5": "29.2"},
        {"field1": "28.6", "field2": "58", "field3": "-2.54", "field5": "29.6"},
    ]
    for i, fields in enumerate(rows):
        entry_id = service.ingest_update(
            1, "WK-demo", fields, created_at=stamp(i * 20)
        )
        print(f"  accepted update -> entry_id {entry_id}")

    # A fourth write 5 seconds after the last one trips the rate limit.
    try:
        service.ingest_update(1, "WK-demo", {"field1": "29.0"}, created_at=stamp(45))
    except RateLimitError as exc:
        print(f"  rejected: {exc}")


def query_and_export(service):
    channel, entries = service.query_feeds(1, results=2)
    print(f"\nLast two feeds from channel {channel.channel_id} ({channel.name}):")
    for entry in entries:
        ph = entry.fields.get("field3")
        flag = "" if entry.valid.get("field3", True) else "  <- flagged invalid"
        print(f"  #{entry.entry_id} {entry.created_at} pH={ph}{flag}")

    csv_text = service.export_csv(1)
    print("\nCSV export:")
    for line in csv_text.splitlines():
        print(f"  {line}")
    return csv_text


def reopen(data_dir, first_export):
    # Same directory, fresh service: entries reload from the log and
    # the next entry id continues where the old process stopped.
    service = TelemetryService(channel(), data_dir)
    assert service.export_csv(1) == first_export, "export changed across restart"
    next_id = service.ingest_update(
        1, "WK-demo", {"field1": "27.9"}, created_at=stamp(120)
    )
    print(f"\nAfter reopen the store continues at entry_id {next_id}")
    service.close()


def channel():
    return Channel(channel_id=1, name="bench rig", write_key="WK-demo", read_key="RK-demo")


if __name__ == "__main__":
    with tempfile.TemporaryDirectory() as tmp:
        data_dir = Path(tmp)
        service = TelemetryService(channel(), data_dir)
        print(f"Log file: {', '.join(p.name for p in sorted(data_dir.iterdir()))} in a temp dir")
        ingest_some(service)
        export = query_and_export(service)
        service.close()
        reopen(data_dir, export)
