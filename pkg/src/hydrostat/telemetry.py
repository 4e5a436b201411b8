"""Channel telemetry service with an append-only store and HTTP surface.

A channel holds up to eight numbered numeric fields. Writes are keyed by
the channel's write key and rate limited. Accepted entries are appended to
a per-channel log and fsynced before the write is acknowledged, so an
acknowledged entry survives a process kill. Values are stored as the
decimal strings the client sent; queries and CSV export return them
bit-identically. The same HTTP server exposes the controller's thresholds,
actuator states, and manual overrides for the dashboard.
"""

from __future__ import annotations

import json
import csv
import io
import os
import threading
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Callable, Iterable, Mapping
from urllib.parse import parse_qs, urlsplit

from .configfile import ConfigError, get_bool, get_int, get_str
from .control import ACTUATORS, ConfigValidationError, Controller
from .sensors import STANDARD_RANGES, SensorKind, SensorReading

FIELD_KEYS = tuple(f"field{i}" for i in range(1, 9))

DEFAULT_FIELD_NAMES = {
    "field1": SensorKind.GREENHOUSE_TEMPERATURE.value,
    "field2": SensorKind.HUMIDITY.value,
    "field3": SensorKind.PH_LEVEL.value,
    "field4": SensorKind.LIGHT.value,
    "field5": SensorKind.WATER_TEMPERATURE.value,
}


class TelemetryError(Exception):
    """Base for service-level failures the HTTP layer maps to status codes."""


class AuthorizationError(TelemetryError):
    pass


class RateLimitError(TelemetryError):
    pass


class ValidationError(TelemetryError):
    def __init__(self, message: str, field_name: str | None = None):
        super().__init__(message)
        self.field = field_name


class UnknownChannelError(TelemetryError):
    pass


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp; must carry an explicit offset or Z."""
    candidate = text.strip()
    if candidate.endswith(("Z", "z")):
        candidate = candidate[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(candidate)
    except ValueError:
        raise ValidationError(f"bad RFC 3339 timestamp: {text!r}", "created_at") from None
    if parsed.tzinfo is None:
        raise ValidationError(f"timestamp missing UTC offset: {text!r}", "created_at")
    return parsed


def format_rfc3339(moment: datetime) -> str:
    moment = moment.astimezone(timezone.utc)
    if moment.microsecond:
        return moment.strftime("%Y-%m-%dT%H:%M:%S.%f") + "Z"
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class Channel:
    channel_id: int
    name: str = "greenhouse"
    field_names: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_FIELD_NAMES))
    write_key: str = "WRITEKEY"
    read_key: str = "READKEY"
    public_read: bool = True

    def __post_init__(self) -> None:
        if self.channel_id < 1:
            raise ValueError("channel_id must be positive")
        if not self.write_key or not self.read_key:
            raise ValueError("write and read keys must be non-empty")
        if self.write_key == self.read_key:
            raise ValueError("write and read keys must differ")
        for key in self.field_names:
            if key not in FIELD_KEYS:
                raise ValueError(f"unknown field name key {key!r}")

    @classmethod
    def from_mapping(cls, cfg: Mapping[str, str]) -> "Channel":
        kv = dict(cfg)
        names = dict(DEFAULT_FIELD_NAMES)
        for key in FIELD_KEYS:
            if key in kv:
                names[key] = kv[key]
        try:
            return cls(
                channel_id=get_int(kv, "channel_id", 1),
                name=get_str(kv, "channel_name", "greenhouse"),
                field_names=names,
                write_key=get_str(kv, "write_key", "WRITEKEY"),
                read_key=get_str(kv, "read_key", "READKEY"),
                public_read=get_bool(kv, "public_read", True),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def kind_for_field(self, field_key: str) -> SensorKind | None:
        label = self.field_names.get(field_key)
        if label is None:
            return None
        try:
            return SensorKind(label)
        except ValueError:
            return None

    def field_for_kind(self, kind: SensorKind) -> str | None:
        for key, label in self.field_names.items():
            if label == kind.value:
                return key
        return None


@dataclass(frozen=True)
class ChannelEntry:
    entry_id: int
    created_at: str
    fields: Mapping[str, str]
    valid: Mapping[str, bool]

    def created_at_dt(self) -> datetime:
        return parse_rfc3339(self.created_at)


class ChannelStore:
    """Append-only JSON-lines log with the index rebuilt on open.

    Every accepted append is flushed and fsynced before it returns, which
    is what makes an acknowledged write crash-safe. A torn trailing line
    from a mid-write crash is ignored on reload; it was never acknowledged.
    """

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._lock = threading.RLock()
        self._entries: list[ChannelEntry] = []
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._load()
        self._handle = open(self._path, "a", encoding="utf-8")

    def _load(self) -> None:
        if not self._path.exists():
            return
        with open(self._path, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    entry = ChannelEntry(
                        entry_id=int(record["entry_id"]),
                        created_at=str(record["created_at"]),
                        fields=dict(record["fields"]),
                        valid={k: bool(v) for k, v in record.get("valid", {}).items()},
                    )
                except (ValueError, KeyError, TypeError):
                    break  # torn tail: everything before it was acknowledged
                self._entries.append(entry)

    def append(self, created_at: str, fields: Mapping[str, str],
               valid: Mapping[str, bool]) -> ChannelEntry:
        with self._lock:
            entry = ChannelEntry(
                entry_id=len(self._entries) + 1,
                created_at=created_at,
                fields=dict(fields),
                valid=dict(valid),
            )
            record = {
                "entry_id": entry.entry_id,
                "created_at": entry.created_at,
                "fields": dict(entry.fields),
                "valid": dict(entry.valid),
            }
            self._handle.write(json.dumps(record, separators=(",", ":")) + "\n")
            self._handle.flush()
            os.fsync(self._handle.fileno())
            self._entries.append(entry)
            return entry

    def entries(self) -> list[ChannelEntry]:
        with self._lock:
            return list(self._entries)

    def last_entry(self) -> ChannelEntry | None:
        with self._lock:
            return self._entries[-1] if self._entries else None

    def wipe(self) -> None:
        with self._lock:
            self._handle.close()
            self._handle = open(self._path, "w", encoding="utf-8")
            self._handle.flush()
            os.fsync(self._handle.fileno())
            self._entries = []

    def close(self) -> None:
        with self._lock:
            self._handle.close()


@dataclass
class _ChannelRuntime:
    channel: Channel
    store: ChannelStore
    lock: threading.Lock
    last_accepted: datetime | None = None


class TelemetryService:
    """Ingest, query, export, and control-plane operations for channels.

    One controller backs the thresholds/actuators endpoints; the field
    data side supports any number of registered channels.
    """

    def __init__(
        self,
        channels: Channel | Iterable[Channel],
        data_dir: str | Path,
        controller: Controller | None = None,
        min_update_interval: float = 15.0,
        clock: Callable[[], datetime] | None = None,
    ):
        if isinstance(channels, Channel):
            channels = [channels]
        if min_update_interval < 0:
            raise ValueError("min_update_interval must be nonnegative")
        self.data_dir = Path(data_dir)
        self.min_update_interval = float(min_update_interval)
        self.controller = controller or Controller()
        self.clock = clock or (lambda: datetime.now(timezone.utc))
        self._channels: dict[int, _ChannelRuntime] = {}
        self._alerts: deque = deque(maxlen=50)
        for channel in channels:
            if channel.channel_id in self._channels:
                raise ValueError(f"duplicate channel_id {channel.channel_id}")
            store = ChannelStore(self.data_dir / f"channel_{channel.channel_id}.log")
            runtime = _ChannelRuntime(channel=channel, store=store, lock=threading.Lock())
            last = store.last_entry()
            if last is not None:
                runtime.last_accepted = last.created_at_dt()
            self._channels[channel.channel_id] = runtime

    # ----- helpers -----

    def _runtime(self, channel_id: int) -> _ChannelRuntime:
        try:
            return self._channels[channel_id]
        except KeyError:
            raise UnknownChannelError(f"no channel {channel_id}") from None

    def channel(self, channel_id: int) -> Channel:
        return self._runtime(channel_id).channel

    def channel_ids(self) -> list[int]:
        return sorted(self._channels)

    def find_by_write_key(self, api_key: str | None) -> Channel:
        for runtime in self._channels.values():
            if api_key == runtime.channel.write_key:
                return runtime.channel
        raise AuthorizationError("write API key does not match any channel")

    def _check_read(self, runtime: _ChannelRuntime, api_key: str | None) -> None:
        channel = runtime.channel
        if channel.public_read:
            return
        if api_key not in (channel.read_key, channel.write_key):
            raise AuthorizationError("read API key required for a private channel")

    # ----- ingest -----

    def ingest_update(
        self,
        channel_id: int,
        api_key: str | None,
        field_values: Mapping[str, str],
        created_at: str | None = None,
        enforce_rate_limit: bool = True,
    ) -> int:
        """Validate and durably append one update; returns the entry id."""
        runtime = self._runtime(channel_id)
        channel = runtime.channel
        if api_key != channel.write_key:
            raise AuthorizationError("bad write API key")
        if not field_values:
            raise ValidationError("update carries no field values")

        fields: dict[str, str] = {}
        valid: dict[str, bool] = {}
        for key, raw in field_values.items():
            if key not in FIELD_KEYS:
                raise ValidationError(f"unknown field {key!r}", key)
            text = str(raw).strip()
            try:
                number = float(text)
            except ValueError:
                raise ValidationError(f"{key}: not a number: {text!r}", key) from None
            if number != number or number in (float("inf"), float("-inf")):
                raise ValidationError(f"{key}: must be finite", key)
            fields[key] = text
            kind = channel.kind_for_field(key)
            if kind is not None:
                low, high = STANDARD_RANGES[kind]
                valid[key] = low <= number <= high

        with runtime.lock:
            if created_at is not None:
                moment = parse_rfc3339(created_at)
                stored = created_at.strip()
                if runtime.last_accepted is not None and moment < runtime.last_accepted:
                    raise ValidationError(
                        "created_at is older than the channel head", "created_at"
                    )
            else:
                moment = self.clock()
                if moment.tzinfo is None:
                    moment = moment.replace(tzinfo=timezone.utc)
                # Server clock hiccups must not break entry ordering.
                if runtime.last_accepted is not None and moment < runtime.last_accepted:
                    moment = runtime.last_accepted
                stored = format_rfc3339(moment)
            if (
                enforce_rate_limit
                and self.min_update_interval > 0
                and runtime.last_accepted is not None
            ):
                gap = (moment - runtime.last_accepted).total_seconds()
                if gap < self.min_update_interval:
                    raise RateLimitError(
                        f"update {gap:.3f}s after previous accepted write; "
                        f"minimum interval is {self.min_update_interval:g}s"
                    )
            entry = runtime.store.append(stored, fields, valid)
            runtime.last_accepted = moment
            return entry.entry_id

    def ingest_by_write_key(
        self,
        api_key: str | None,
        field_values: Mapping[str, str],
        created_at: str | None = None,
    ) -> int:
        channel = self.find_by_write_key(api_key)
        return self.ingest_update(channel.channel_id, api_key, field_values, created_at)

    def preload_readings(self, channel_id: int, readings: Iterable[SensorReading]) -> int:
        """Bulk-import readings as single-field entries, bypassing the rate limit.

        Readings are merged into (timestamp, field) order so interleaved
        fixtures keep created_at non-decreasing. Returns entries written.
        """
        runtime = self._runtime(channel_id)
        channel = runtime.channel

        def sort_key(reading: SensorReading):
            field_key = channel.field_for_kind(reading.kind)
            if field_key is None:
                raise ValidationError(
                    f"channel {channel_id} has no field for {reading.kind.value}"
                )
            return (reading.timestamp, FIELD_KEYS.index(field_key))

        ordered = sorted(readings, key=sort_key)
        count = 0
        for reading in ordered:
            field_key = channel.field_for_kind(reading.kind)
            assert field_key is not None
            value_text = format(reading.value, "g")
            self.ingest_update(
                channel_id,
                channel.write_key,
                {field_key: value_text},
                created_at=format_rfc3339(reading.timestamp),
                enforce_rate_limit=False,
            )
            count += 1
        return count

    # ----- queries -----

    def query_feeds(
        self,
        channel_id: int,
        api_key: str | None = None,
        results: int | None = None,
        start: str | None = None,
        end: str | None = None,
    ) -> tuple[Channel, list[ChannelEntry]]:
        """Last-N or time-range feed query, ascending entry_id."""
        runtime = self._runtime(channel_id)
        self._check_read(runtime, api_key)
        if results is not None and (start is not None or end is not None):
            raise ValidationError("results cannot be combined with start/end")
        entries = runtime.store.entries()
        if start is not None or end is not None:
            start_dt = parse_rfc3339(start) if start is not None else None
            end_dt = parse_rfc3339(end) if end is not None else None
            entries = [
                e for e in entries
                if (start_dt is None or e.created_at_dt() >= start_dt)
                and (end_dt is None or e.created_at_dt() <= end_dt)
            ]
        elif results is not None:
            if results < 0:
                raise ValidationError("results must be nonnegative", "results")
            entries = entries[-results:] if results else []
        return runtime.channel, entries

    def export_csv(self, channel_id: int, api_key: str | None = None) -> str:
        """Full-channel CSV dump; re-ingesting it reproduces identical feeds."""
        runtime = self._runtime(channel_id)
        self._check_read(runtime, api_key)
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["created_at", "entry_id", *FIELD_KEYS])
        for entry in runtime.store.entries():
            row = [entry.created_at, entry.entry_id]
            row += [entry.fields.get(key, "") for key in FIELD_KEYS]
            writer.writerow(row)
        return out.getvalue()

    def wipe(self, channel_id: int) -> None:
        runtime = self._runtime(channel_id)
        with runtime.lock:
            runtime.store.wipe()
            runtime.last_accepted = None

    # ----- control plane -----

    def get_thresholds(self, channel_id: int) -> dict[str, float]:
        self._runtime(channel_id)
        return self.controller.thresholds.as_dict()

    def set_thresholds(
        self, channel_id: int, api_key: str | None, payload: Mapping[str, object]
    ) -> dict[str, float]:
        runtime = self._runtime(channel_id)
        if api_key != runtime.channel.write_key:
            raise AuthorizationError("write API key required to change thresholds")
        return self.controller.apply_config(payload).as_dict()

    def actuator_status(self, channel_id: int) -> dict:
        self._runtime(channel_id)
        state = self.controller.effective_state()
        overrides = self.controller.overrides
        actuators = {}
        for name in ACTUATORS:
            pinned = overrides[name]
            last = state.last_transition.get(name)
            actuators[name] = {
                "on": state.get(name),
                "override": None if pinned is None else ("on" if pinned else "off"),
                "last_transition": format_rfc3339(last) if last else None,
            }
        return {"actuators": actuators, "alerts": list(self._alerts)}

    def set_override(
        self, channel_id: int, api_key: str | None, name: str, mode: str
    ) -> dict:
        runtime = self._runtime(channel_id)
        if api_key != runtime.channel.write_key:
            raise AuthorizationError("write API key required for overrides")
        if name not in ACTUATORS:
            raise UnknownChannelError(f"no actuator {name!r}")
        if mode not in ("on", "off", "auto"):
            raise ValidationError(f"override mode must be on, off, or auto, got {mode!r}")
        self.controller.override(name, mode)
        return self.actuator_status(channel_id)

    def record_decision(self, when: datetime, decision) -> None:
        """Keep recent alerts for the dashboard's alert feed."""
        for alert in decision.alerts:
            self._alerts.append({
                "time": format_rfc3339(when),
                "parameter": alert.parameter,
                "reason": alert.reason,
            })

    def close(self) -> None:
        for runtime in self._channels.values():
            runtime.store.close()


def feeds_payload(channel: Channel, entries: list[ChannelEntry]) -> dict:
    """JSON body for feeds.json: channel metadata plus the feeds array."""
    meta: dict[str, object] = {"id": channel.channel_id, "name": channel.name}
    for key in FIELD_KEYS:
        if key in channel.field_names:
            meta[key] = channel.field_names[key]
    meta["last_entry_id"] = entries[-1].entry_id if entries else 0
    feeds = []
    for entry in entries:
        item: dict[str, object] = {
            "created_at": entry.created_at,
            "entry_id": entry.entry_id,
        }
        for key in FIELD_KEYS:
            if key in entry.fields:
                item[key] = entry.fields[key]
                if key in entry.valid:
                    item[f"{key}_valid"] = entry.valid[key]
        feeds.append(item)
    return {"channel": meta, "feeds": feeds}


# ----- HTTP layer -----

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def service(self) -> TelemetryService:
        return self.server.service  # type: ignore[attr-defined]

    def log_message(self, *args) -> None:  # quiet by default
        pass

    # -- response helpers --

    def _send(self, code: int, body: bytes, content_type: str) -> None:
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, code: int, obj) -> None:
        self._send(code, json.dumps(obj).encode("utf-8"), "application/json")

    def _send_text(self, code: int, text: str) -> None:
        self._send(code, text.encode("utf-8"), "text/plain; charset=utf-8")

    def _send_error_response(self, exc: Exception) -> None:
        if isinstance(exc, AuthorizationError):
            self._send_json(401, {"error": str(exc)})
        elif isinstance(exc, RateLimitError):
            self._send_json(429, {"error": str(exc)})
        elif isinstance(exc, UnknownChannelError):
            self._send_json(404, {"error": str(exc)})
        elif isinstance(exc, ValidationError):
            payload = {"error": str(exc)}
            if exc.field:
                payload["field"] = exc.field
            self._send_json(400, payload)
        elif isinstance(exc, ConfigValidationError):
            self._send_json(400, {"error": str(exc), "field": exc.field})
        else:
            self._send_json(500, {"error": str(exc)})

    def _params(self) -> dict[str, str]:
        query = urlsplit(self.path).query
        return {k: v[0] for k, v in parse_qs(query, keep_blank_values=True).items()}

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    # -- methods --

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_POST(self) -> None:
        path = urlsplit(self.path).path
        if path != "/update":
            self._send_json(404, {"error": f"no route for POST {path}"})
            return
        params = self._params()
        content_type = (self.headers.get("Content-Type") or "").split(";")[0].strip()
        if content_type == "application/x-www-form-urlencoded":
            body = self._body().decode("utf-8", "replace")
            for key, values in parse_qs(body, keep_blank_values=True).items():
                params.setdefault(key, values[0])
        fields = {k: v for k, v in params.items() if k in FIELD_KEYS}
        try:
            entry_id = self.service.ingest_by_write_key(
                params.get("api_key"), fields, params.get("created_at")
            )
        except TelemetryError as exc:
            self._send_error_response(exc)
            return
        self._send_text(200, str(entry_id))

    def do_GET(self) -> None:
        path = urlsplit(self.path).path
        params = self._params()
        parts = [p for p in path.split("/") if p]
        try:
            if len(parts) == 3 and parts[0] == "channels":
                channel_id = self._channel_id(parts[1])
                if parts[2] == "feeds.json":
                    results = None
                    if "results" in params:
                        try:
                            results = int(params["results"])
                        except ValueError:
                            raise ValidationError("results must be an integer", "results")
                    channel, entries = self.service.query_feeds(
                        channel_id,
                        api_key=params.get("api_key"),
                        results=results,
                        start=params.get("start"),
                        end=params.get("end"),
                    )
                    self._send_json(200, feeds_payload(channel, entries))
                    return
                if parts[2] == "feeds.csv":
                    text = self.service.export_csv(channel_id, api_key=params.get("api_key"))
                    self._send(200, text.encode("utf-8"), "text/csv; charset=utf-8")
                    return
                if parts[2] == "thresholds":
                    self._send_json(200, self.service.get_thresholds(channel_id))
                    return
                if parts[2] == "actuators":
                    self._send_json(200, self.service.actuator_status(channel_id))
                    return
            if self._maybe_static(path):
                return
            self._send_json(404, {"error": f"no route for GET {path}"})
        except TelemetryError as exc:
            self._send_error_response(exc)

    def do_PUT(self) -> None:
        path = urlsplit(self.path).path
        params = self._params()
        parts = [p for p in path.split("/") if p]
        try:
            if len(parts) == 3 and parts[0] == "channels" and parts[2] == "thresholds":
                channel_id = self._channel_id(parts[1])
                body = self._body().decode("utf-8", "replace") or "{}"
                try:
                    payload = json.loads(body)
                except json.JSONDecodeError:
                    raise ValidationError("thresholds body must be a JSON object")
                if not isinstance(payload, dict):
                    raise ValidationError("thresholds body must be a JSON object")
                # Pop the body key even when the query one wins, or it would
                # be misread as a threshold field below.
                body_key = payload.pop("api_key", None)
                api_key = params.get("api_key") or body_key
                try:
                    updated = self.service.set_thresholds(channel_id, api_key, payload)
                except ConfigValidationError as exc:
                    self._send_json(400, {"error": str(exc), "field": exc.field})
                    return
                self._send_json(200, updated)
                return
            if (
                len(parts) == 5
                and parts[0] == "channels"
                and parts[2] == "actuators"
                and parts[4] == "override"
            ):
                channel_id = self._channel_id(parts[1])
                body = self._body().decode("utf-8", "replace").strip()
                mode = body
                if body.startswith("{") or body.startswith('"'):
                    try:
                        parsed = json.loads(body)
                    except json.JSONDecodeError:
                        raise ValidationError("override body must be on, off, or auto")
                    mode = parsed.get("mode") if isinstance(parsed, dict) else parsed
                api_key = params.get("api_key")
                status = self.service.set_override(channel_id, api_key, parts[3], str(mode))
                self._send_json(200, status)
                return
            self._send_json(404, {"error": f"no route for PUT {path}"})
        except TelemetryError as exc:
            self._send_error_response(exc)

    def _channel_id(self, segment: str) -> int:
        try:
            return int(segment, 10)
        except ValueError:
            raise UnknownChannelError(f"bad channel id {segment!r}") from None

    def _maybe_static(self, path: str) -> bool:
        static_dir = getattr(self.server, "static_dir", None)
        if static_dir is None:
            return False
        relative = path.lstrip("/") or "index.html"
        target = (static_dir / relative).resolve()
        try:
            target.relative_to(static_dir.resolve())
        except ValueError:
            self._send_json(404, {"error": "not found"})
            return True
        if not target.is_file():
            return False
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send(200, target.read_bytes(), content_type)
        return True


class TelemetryHTTPServer(ThreadingHTTPServer):
    """HTTP front end bound to a TelemetryService; start()/stop() for threads."""

    daemon_threads = True

    def __init__(
        self,
        service: TelemetryService,
        host: str = "127.0.0.1",
        port: int = 8100,
        static_dir: str | Path | None = None,
    ):
        super().__init__((host, port), _Handler)
        self.service = service
        self.static_dir = Path(static_dir) if static_dir else None
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> None:
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self.shutdown()
        if self._thread is not None:
            self._thread.join(timeout=5)
        self.server_close()
