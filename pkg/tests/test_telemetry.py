"""Telemetry service: ingest, durability, queries, and the HTTP surface."""

import json
import threading
from datetime import datetime, timedelta, timezone

import pytest
import requests

from hydrostat.cli import bundled_sensor_logs
from hydrostat.control import ActuatorState, Alert, ControlDecision, Controller
from hydrostat.simulator import replay_fixture
from hydrostat.telemetry import (
    AuthorizationError,
    Channel,
    ChannelStore,
    RateLimitError,
    TelemetryHTTPServer,
    TelemetryService,
    UnknownChannelError,
    ValidationError,
    feeds_payload,
    format_rfc3339,
    parse_rfc3339,
)

T0 = datetime(2022, 5, 23, 12, 0, tzinfo=timezone.utc)


def make_channel(**kwargs) -> Channel:
    defaults = dict(channel_id=1, write_key="WK", read_key="RK")
    defaults.update(kwargs)
    return Channel(**defaults)


def make_service(tmp_path, *, interval=0.0, clock=None, channel=None, controller=None):
    return TelemetryService(
        channel or make_channel(),
        tmp_path,
        controller=controller,
        min_update_interval=interval,
        clock=clock,
    )


def stamp(seconds: float) -> str:
    return format_rfc3339(T0 + timedelta(seconds=seconds))


class TestTimestamps:
    def test_z_suffix_and_offset_forms_parse(self):
        assert parse_rfc3339("2022-05-23T12:00:00Z") == T0
        assert parse_rfc3339("2022-05-23T14:00:00+02:00") == T0

    def test_naive_timestamp_rejected(self):
        with pytest.raises(ValidationError):
            parse_rfc3339("2022-05-23T12:00:00")

    def test_garbage_rejected(self):
        with pytest.raises(ValidationError):
            parse_rfc3339("yesterday")

    def test_format_round_trips(self):
        assert parse_rfc3339(format_rfc3339(T0)) == T0
        with_us = T0 + timedelta(microseconds=250)
        assert parse_rfc3339(format_rfc3339(with_us)) == with_us


class TestChannel:
    def test_default_field_mapping(self):
        channel = make_channel()
        assert channel.kind_for_field("field3").value == "PhLevel"
        assert channel.field_for_kind(channel.kind_for_field("field5")) == "field5"

    def test_unmapped_field_has_no_kind(self):
        assert make_channel().kind_for_field("field7") is None

    def test_key_rules(self):
        with pytest.raises(ValueError):
            make_channel(write_key="K", read_key="K")
        with pytest.raises(ValueError):
            make_channel(write_key="")
        with pytest.raises(ValueError):
            make_channel(channel_id=0)

    def test_from_mapping_defaults(self):
        channel = Channel.from_mapping({})
        assert channel.channel_id == 1
        assert channel.field_names["field1"] == "GreenhouseTemperature"


class TestIngest:
    def test_first_entry_id_is_one(self, tmp_path):
        service = make_service(tmp_path)
        assert service.ingest_update(1, "WK", {"field1": "27.5"}) == 1
        assert service.ingest_update(1, "WK", {"field1": "27.6"}) == 2

    def test_values_stored_verbatim(self, tmp_path):
        service = make_service(tmp_path)
        service.ingest_update(1, "WK", {"field1": "27.50", "field3": "007.2"})
        _, entries = service.query_feeds(1)
        assert entries[0].fields["field1"] == "27.50"
        assert entries[0].fields["field3"] == "007.2"

    def test_bad_write_key_rejected(self, tmp_path):
        service = make_service(tmp_path)
        with pytest.raises(AuthorizationError):
            service.ingest_update(1, "RK", {"field1": "1"})
        with pytest.raises(AuthorizationError):
            service.ingest_update(1, None, {"field1": "1"})

    def test_unknown_channel_rejected(self, tmp_path):
        service = make_service(tmp_path)
        with pytest.raises(UnknownChannelError):
            service.ingest_update(99, "WK", {"field1": "1"})

    def test_empty_update_rejected(self, tmp_path):
        service = make_service(tmp_path)
        with pytest.raises(ValidationError):
            service.ingest_update(1, "WK", {})

    def test_non_numeric_value_rejected(self, tmp_path):
        service = make_service(tmp_path)
        with pytest.raises(ValidationError, match="field1"):
            service.ingest_update(1, "WK", {"field1": "warm"})

    def test_non_finite_value_rejected(self, tmp_path):
        service = make_service(tmp_path)
        for bad in ("nan", "inf", "-inf"):
            with pytest.raises(ValidationError, match="finite"):
                service.ingest_update(1, "WK", {"field2": bad})

    def test_unknown_field_key_rejected(self, tmp_path):
        service = make_service(tmp_path)
        with pytest.raises(ValidationError, match="field9"):
            service.ingest_update(1, "WK", {"field9": "1"})

    def test_range_validity_flags(self, tmp_path):
        service = make_service(tmp_path)
        service.ingest_update(
            1, "WK", {"field1": "34", "field3": "-2.54", "field6": "12345"}
        )
        _, entries = service.query_feeds(1)
        entry = entries[0]
        assert entry.valid["field1"] is True
        assert entry.valid["field3"] is False  # impossible pH still stored
        assert "field6" not in entry.valid     # unmapped field: no range known

    def test_client_timestamps_must_not_go_backward(self, tmp_path):
        service = make_service(tmp_path)
        service.ingest_update(1, "WK", {"field1": "1"}, created_at=stamp(100))
        with pytest.raises(ValidationError, match="older than the channel head"):
            service.ingest_update(1, "WK", {"field1": "2"}, created_at=stamp(50))

    def test_equal_client_timestamp_allowed(self, tmp_path):
        service = make_service(tmp_path)
        service.ingest_update(1, "WK", {"field1": "1"}, created_at=stamp(100))
        service.ingest_update(1, "WK", {"field1": "2"}, created_at=stamp(100))
        _, entries = service.query_feeds(1)
        assert [e.entry_id for e in entries] == [1, 2]

    def test_server_clock_regression_clamped(self, tmp_path):
        moments = [T0, T0 - timedelta(seconds=30)]
        service = make_service(tmp_path, clock=lambda: moments.pop(0))
        service.ingest_update(1, "WK", {"field1": "1"})
        service.ingest_update(1, "WK", {"field1": "2"})
        _, entries = service.query_feeds(1)
        stamps = [e.created_at_dt() for e in entries]
        assert stamps[1] >= stamps[0]


class TestRateLimit:
    def test_rejects_within_interval(self, tmp_path):
        service = make_service(tmp_path, interval=15.0)
        service.ingest_update(1, "WK", {"field1": "1"}, created_at=stamp(0))
        with pytest.raises(RateLimitError):
            service.ingest_update(1, "WK", {"field1": "2"}, created_at=stamp(5))

    def test_accepts_at_exactly_the_interval(self, tmp_path):
        service = make_service(tmp_path, interval=15.0)
        service.ingest_update(1, "WK", {"field1": "1"}, created_at=stamp(0))
        assert service.ingest_update(1, "WK", {"field1": "2"}, created_at=stamp(15)) == 2

    def test_rejected_write_leaves_no_entry(self, tmp_path):
        service = make_service(tmp_path, interval=15.0)
        service.ingest_update(1, "WK", {"field1": "1"}, created_at=stamp(0))
        with pytest.raises(RateLimitError):
            service.ingest_update(1, "WK", {"field1": "2"}, created_at=stamp(1))
        _, entries = service.query_feeds(1)
        assert len(entries) == 1
        # The rejected write must not advance the head either.
        assert service.ingest_update(1, "WK", {"field1": "3"}, created_at=stamp(15)) == 2

    def test_zero_interval_disables_the_limit(self, tmp_path):
        service = make_service(tmp_path, interval=0.0)
        for i in range(5):
            service.ingest_update(1, "WK", {"field1": str(i)}, created_at=stamp(0))
        _, entries = service.query_feeds(1)
        assert len(entries) == 5


class TestQueries:
    def fill(self, service):
        for i in range(5):
            service.ingest_update(
                1, "WK", {"field1": str(20 + i)}, created_at=stamp(60 * i)
            )

    def test_results_returns_last_n_ascending(self, tmp_path):
        service = make_service(tmp_path)
        self.fill(service)
        _, entries = service.query_feeds(1, results=2)
        assert [e.entry_id for e in entries] == [4, 5]

    def test_results_zero_is_empty(self, tmp_path):
        service = make_service(tmp_path)
        self.fill(service)
        _, entries = service.query_feeds(1, results=0)
        assert entries == []

    def test_results_beyond_count_returns_all(self, tmp_path):
        service = make_service(tmp_path)
        self.fill(service)
        _, entries = service.query_feeds(1, results=50)
        assert len(entries) == 5

    def test_time_range_is_inclusive(self, tmp_path):
        service = make_service(tmp_path)
        self.fill(service)
        _, entries = service.query_feeds(1, start=stamp(60), end=stamp(180))
        assert [e.entry_id for e in entries] == [2, 3, 4]

    def test_open_ended_range(self, tmp_path):
        service = make_service(tmp_path)
        self.fill(service)
        _, entries = service.query_feeds(1, start=stamp(180))
        assert [e.entry_id for e in entries] == [4, 5]

    def test_results_cannot_combine_with_range(self, tmp_path):
        service = make_service(tmp_path)
        with pytest.raises(ValidationError):
            service.query_feeds(1, results=3, start=stamp(0))

    def test_negative_results_rejected(self, tmp_path):
        service = make_service(tmp_path)
        with pytest.raises(ValidationError):
            service.query_feeds(1, results=-1)

    def test_private_channel_needs_a_key(self, tmp_path):
        service = make_service(tmp_path, channel=make_channel(public_read=False))
        service.ingest_update(1, "WK", {"field1": "1"})
        with pytest.raises(AuthorizationError):
            service.query_feeds(1)
        _, by_read = service.query_feeds(1, api_key="RK")
        _, by_write = service.query_feeds(1, api_key="WK")
        assert len(by_read) == len(by_write) == 1

    def test_feeds_payload_shape(self, tmp_path):
        service = make_service(tmp_path)
        service.ingest_update(1, "WK", {"field3": "-2.54"}, created_at=stamp(0))
        channel, entries = service.query_feeds(1)
        payload = feeds_payload(channel, entries)
        assert payload["channel"]["id"] == 1
        assert payload["channel"]["field3"] == "PhLevel"
        assert payload["channel"]["last_entry_id"] == 1
        feed = payload["feeds"][0]
        assert feed["field3"] == "-2.54"
        assert feed["field3_valid"] is False
        assert feed["created_at"] == stamp(0)


class TestPreload:
    def test_all_bundled_logs_make_45_entries(self, tmp_path):
        service = make_service(tmp_path)
        readings = []
        for path in bundled_sensor_logs():
            readings.extend(replay_fixture(path))
        count = service.preload_readings(1, readings)
        assert count == 45
        _, entries = service.query_feeds(1)
        assert [e.entry_id for e in entries] == list(range(1, 46))
        stamps = [e.created_at_dt() for e in entries]
        assert stamps == sorted(stamps)

    def test_last_timestamp_group_in_field_order(self, tmp_path):
        service = make_service(tmp_path)
        readings = []
        for path in bundled_sensor_logs():
            readings.extend(replay_fixture(path))
        service.preload_readings(1, readings)
        _, entries = service.query_feeds(1, results=5)
        values = [next(iter(e.fields.items())) for e in entries]
        assert values == [
            ("field1", "33"),
            ("field2", "50"),
            ("field3", "-3.89"),
            ("field4", "89"),
            ("field5", "31.94"),
        ]

    def test_validity_flags_follow_the_readings(self, tmp_path):
        service = make_service(tmp_path)
        readings = replay_fixture(bundled_sensor_logs()[2])  # pH log
        service.preload_readings(1, readings)
        _, entries = service.query_feeds(1)
        flags = [e.valid["field3"] for e in entries]
        assert flags.count(False) == 3


class TestExportAndDurability:
    def test_export_wipe_reingest_is_byte_identical(self, tmp_path):
        service = make_service(tmp_path)
        service.ingest_update(
            1, "WK", {"field1": "27.50", "field2": "70"}, created_at=stamp(0)
        )
        service.ingest_update(1, "WK", {"field3": "-2.54"}, created_at=stamp(60))
        first = service.export_csv(1)

        service.wipe(1)
        _, entries = service.query_feeds(1)
        assert entries == []

        rows = first.splitlines()
        header = rows[0].split(",")
        for line in rows[1:]:
            cells = dict(zip(header, line.split(",")))
            fields = {
                k: v for k, v in cells.items()
                if k.startswith("field") and v != ""
            }
            service.ingest_update(1, "WK", fields, created_at=cells["created_at"])
        assert service.export_csv(1) == first

    def test_entries_survive_reopen(self, tmp_path):
        service = make_service(tmp_path)
        service.ingest_update(1, "WK", {"field1": "1"}, created_at=stamp(0))
        service.ingest_update(1, "WK", {"field1": "2"}, created_at=stamp(60))
        service.close()

        reopened = make_service(tmp_path)
        _, entries = reopened.query_feeds(1)
        assert [e.fields["field1"] for e in entries] == ["1", "2"]
        # entry ids continue, and the head timestamp still rules
        assert reopened.ingest_update(1, "WK", {"field1": "3"}, created_at=stamp(120)) == 3
        with pytest.raises(ValidationError):
            reopened.ingest_update(1, "WK", {"field1": "4"}, created_at=stamp(30))

    def test_torn_tail_is_dropped_on_reload(self, tmp_path):
        service = make_service(tmp_path)
        service.ingest_update(1, "WK", {"field1": "1"}, created_at=stamp(0))
        service.ingest_update(1, "WK", {"field1": "2"}, created_at=stamp(60))
        service.close()

        log = tmp_path / "channel_1.log"
        with open(log, "a", encoding="utf-8") as handle:
            handle.write('{"entry_id":3,"created_at":"2022-05-2')  # mid-write kill

        store = ChannelStore(log)
        assert [e.entry_id for e in store.entries()] == [1, 2]
        store.close()

    def test_wiped_channel_restarts_entry_ids(self, tmp_path):
        service = make_service(tmp_path)
        service.ingest_update(1, "WK", {"field1": "1"}, created_at=stamp(0))
        service.wipe(1)
        assert service.ingest_update(1, "WK", {"field1": "9"}, created_at=stamp(0)) == 1


class TestConcurrency:
    def test_parallel_writers_get_gapless_ids(self, tmp_path):
        service = make_service(tmp_path, interval=0.0)
        ids = []
        ids_lock = threading.Lock()
        barrier = threading.Barrier(16)

        def writer(worker: int):
            barrier.wait()
            for i in range(25):
                entry_id = service.ingest_update(
                    1, "WK", {"field1": f"{worker}.{i}"}
                )
                with ids_lock:
                    ids.append(entry_id)

        threads = [threading.Thread(target=writer, args=(w,)) for w in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert sorted(ids) == list(range(1, 401))
        _, entries = service.query_feeds(1)
        assert [e.entry_id for e in entries] == list(range(1, 401))
        stamps = [e.created_at_dt() for e in entries]
        assert stamps == sorted(stamps)


class TestControlPlane:
    def test_thresholds_round_trip(self, tmp_path):
        service = make_service(tmp_path)
        before = service.get_thresholds(1)
        assert before["water_high"] == 31.0
        updated = service.set_thresholds(1, "WK", {"water_high": 30.0})
        assert updated["water_high"] == 30.0
        assert service.get_thresholds(1)["water_high"] == 30.0

    def test_thresholds_need_write_key(self, tmp_path):
        service = make_service(tmp_path)
        with pytest.raises(AuthorizationError):
            service.set_thresholds(1, "RK", {"water_high": 30.0})

    def test_bad_thresholds_leave_config_alone(self, tmp_path):
        from hydrostat.control import ConfigValidationError

        service = make_service(tmp_path)
        with pytest.raises(ConfigValidationError):
            service.set_thresholds(1, "WK", {"ph_low": 9.5})
        assert service.get_thresholds(1)["ph_low"] == 6.5

    def test_override_flow(self, tmp_path):
        service = make_service(tmp_path)
        status = service.set_override(1, "WK", "cooling", "on")
        assert status["actuators"]["cooling"]["on"] is True
        assert status["actuators"]["cooling"]["override"] == "on"
        status = service.set_override(1, "WK", "cooling", "auto")
        assert status["actuators"]["cooling"]["on"] is False
        assert status["actuators"]["cooling"]["override"] is None

    def test_override_validation(self, tmp_path):
        service = make_service(tmp_path)
        with pytest.raises(AuthorizationError):
            service.set_override(1, "RK", "cooling", "on")
        with pytest.raises(UnknownChannelError):
            service.set_override(1, "WK", "heater", "on")
        with pytest.raises(ValidationError):
            service.set_override(1, "WK", "cooling", "sideways")

    def test_recorded_alerts_appear_in_status(self, tmp_path):
        service = make_service(tmp_path)
        decision = ControlDecision(
            commands={"cooling": True, "dosing": False, "ventilation": False},
            alerts=[Alert("water_temp", "OutOfIdealRange")],
            suppressed={},
            overridden={},
        )
        service.record_decision(T0, decision)
        status = service.actuator_status(1)
        assert status["alerts"] == [{
            "time": format_rfc3339(T0),
            "parameter": "water_temp",
            "reason": "OutOfIdealRange",
        }]

    def test_alert_feed_keeps_the_latest_fifty(self, tmp_path):
        service = make_service(tmp_path)
        for i in range(60):
            decision = ControlDecision(
                commands={}, alerts=[Alert("ph", f"reason{i}")],
                suppressed={}, overridden={},
            )
            service.record_decision(T0 + timedelta(seconds=i), decision)
        status = service.actuator_status(1)
        assert len(status["alerts"]) == 50
        assert status["alerts"][-1]["reason"] == "reason59"
        assert status["alerts"][0]["reason"] == "reason10"


@pytest.fixture()
def http_server(tmp_path):
    controller = Controller()
    service = make_service(tmp_path, interval=0.0, controller=controller)
    server = TelemetryHTTPServer(service, port=0)
    server.start()
    yield server
    server.stop()
    service.close()


class TestHTTPSurface:
    def test_post_update_returns_entry_id(self, http_server):
        url = http_server.url
        first = requests.post(
            f"{url}/update",
            data={"api_key": "WK", "field1": "27.5", "field2": "70"},
        )
        assert first.status_code == 200
        assert first.text == "1"
        second = requests.post(f"{url}/update?api_key=WK&field1=28.0")
        assert second.text == "2"

    def test_post_bad_key_is_401(self, http_server):
        response = requests.post(
            f"{http_server.url}/update", data={"api_key": "NOPE", "field1": "1"}
        )
        assert response.status_code == 401
        assert "error" in response.json()

    def test_rate_limit_is_429(self, tmp_path):
        service = make_service(tmp_path, interval=15.0)
        server = TelemetryHTTPServer(service, port=0)
        server.start()
        try:
            url = server.url
            ok = requests.post(
                f"{url}/update",
                data={"api_key": "WK", "field1": "1",
                      "created_at": "2022-05-23T12:00:00Z"},
            )
            assert ok.status_code == 200
            throttled = requests.post(
                f"{url}/update",
                data={"api_key": "WK", "field1": "2",
                      "created_at": "2022-05-23T12:00:05Z"},
            )
            assert throttled.status_code == 429
        finally:
            server.stop()
            service.close()

    def test_feeds_json_round_trip(self, http_server):
        url = http_server.url
        requests.post(f"{url}/update", data={"api_key": "WK", "field3": "-2.54"})
        requests.post(f"{url}/update", data={"api_key": "WK", "field3": "7.01"})
        payload = requests.get(f"{url}/channels/1/feeds.json").json()
        assert payload["channel"]["last_entry_id"] == 2
        assert payload["feeds"][0]["field3"] == "-2.54"
        assert payload["feeds"][0]["field3_valid"] is False
        assert payload["feeds"][1]["field3_valid"] is True

    def test_feeds_json_results_param(self, http_server):
        url = http_server.url
        for i in range(4):
            requests.post(f"{url}/update", data={"api_key": "WK", "field1": str(i)})
        payload = requests.get(f"{url}/channels/1/feeds.json?results=2").json()
        assert [f["entry_id"] for f in payload["feeds"]] == [3, 4]
        bad = requests.get(f"{url}/channels/1/feeds.json?results=two")
        assert bad.status_code == 400

    def test_feeds_csv_matches_export(self, http_server):
        url = http_server.url
        requests.post(f"{url}/update", data={"api_key": "WK", "field1": "27.50"})
        response = requests.get(f"{url}/channels/1/feeds.csv")
        assert response.status_code == 200
        assert response.text == http_server.service.export_csv(1)
        assert response.text.splitlines()[0] == (
            "created_at,entry_id,field1,field2,field3,field4,"
            "field5,field6,field7,field8"
        )

    def test_unknown_channel_is_404(self, http_server):
        response = requests.get(f"{http_server.url}/channels/9/feeds.json")
        assert response.status_code == 404

    def test_unknown_route_is_404(self, http_server):
        assert requests.get(f"{http_server.url}/nope").status_code == 404
        assert requests.post(f"{http_server.url}/nope").status_code == 404

    def test_thresholds_get_and_put(self, http_server):
        url = http_server.url
        initial = requests.get(f"{url}/channels/1/thresholds").json()
        assert initial["water_high"] == 31.0
        updated = requests.put(
            f"{url}/channels/1/thresholds",
            json={"api_key": "WK", "water_high": 30.5},
        )
        assert updated.status_code == 200
        assert updated.json()["water_high"] == 30.5

    def test_thresholds_put_validation_names_field(self, http_server):
        response = requests.put(
            f"{http_server.url}/channels/1/thresholds?api_key=WK",
            json={"ph_low": 9.5},
        )
        assert response.status_code == 400
        body = response.json()
        assert body["field"] == "ph_low"

    def test_thresholds_put_key_in_query_and_body(self, http_server):
        # A client sending the key both ways must not have the body copy
        # misread as a threshold field.
        response = requests.put(
            f"{http_server.url}/channels/1/thresholds?api_key=WK",
            json={"api_key": "WK", "air_high": 29.5},
        )
        assert response.status_code == 200
        assert response.json()["air_high"] == 29.5

    def test_thresholds_put_needs_key(self, http_server):
        response = requests.put(
            f"{http_server.url}/channels/1/thresholds", json={"water_high": 30.0}
        )
        assert response.status_code == 401

    def test_actuators_and_override(self, http_server):
        url = http_server.url
        status = requests.get(f"{url}/channels/1/actuators").json()
        assert status["actuators"]["cooling"]["on"] is False
        flipped = requests.put(
            f"{url}/channels/1/actuators/cooling/override?api_key=WK", data="on"
        )
        assert flipped.status_code == 200
        assert flipped.json()["actuators"]["cooling"]["on"] is True
        as_json = requests.put(
            f"{url}/channels/1/actuators/cooling/override?api_key=WK",
            json={"mode": "auto"},
        )
        assert as_json.json()["actuators"]["cooling"]["override"] is None

    def test_override_bad_mode_is_400(self, http_server):
        response = requests.put(
            f"{http_server.url}/channels/1/actuators/cooling/override?api_key=WK",
            data="sideways",
        )
        assert response.status_code == 400

    def test_options_preflight(self, http_server):
        response = requests.options(f"{http_server.url}/update")
        assert response.status_code == 204
        assert response.headers["Access-Control-Allow-Origin"] == "*"

    def test_cors_header_on_get(self, http_server):
        response = requests.get(f"{http_server.url}/channels/1/thresholds")
        assert response.headers["Access-Control-Allow-Origin"] == "*"


class TestStaticFiles:
    def test_serves_index_and_guards_traversal(self, tmp_path):
        static = tmp_path / "static"
        static.mkdir()
        (static / "index.html").write_text("<h1>dash</h1>")
        (tmp_path / "secret.txt").write_text("keep out")

        service = make_service(tmp_path / "data")
        server = TelemetryHTTPServer(service, port=0, static_dir=static)
        server.start()
        try:
            url = server.url
            index = requests.get(f"{url}/")
            assert index.status_code == 200
            assert "dash" in index.text
            assert index.headers["Content-Type"].startswith("text/html")
            named = requests.get(f"{url}/index.html")
            assert named.status_code == 200
            sneaky = requests.get(f"{url}/%2e%2e/secret.txt")
            assert sneaky.status_code == 404
        finally:
            server.stop()
            service.close()
