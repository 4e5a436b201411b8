"""Hydroponic greenhouse monitoring, control, and evaluation toolkit."""

from .control import (
    ACTUATORS,
    ActuatorState,
    Alert,
    ClockRegressionError,
    ConfigValidationError,
    ControlConfig,
    ControlDecision,
    Controller,
    Thresholds,
    apply_config,
    evaluate,
)
from .evaluation import (
    GrandMean,
    ItemStats,
    LikertBand,
    LIKERT_BANDS,
    SurveyMatrix,
    TrialReport,
    band_for_mean,
    compare_trials,
    cronbach_alpha,
    grand_mean,
    likert_item_stats,
    load_trials_csv,
    percentage_difference,
)
from .sensors import (
    CalibrationCurve,
    SensorKind,
    SensorReading,
    apply_calibration,
    fit_ph_calibration,
    standard_range,
    validate_reading,
)
from .simulator import (
    EnvState,
    NoiseConfig,
    SimConfig,
    closed_loop,
    diurnal_profile,
    env_step,
    initial_state,
    replay_fixture,
    run_closed_loop,
    sample_sensors,
)
from .telemetry import (
    Channel,
    ChannelEntry,
    ChannelStore,
    TelemetryHTTPServer,
    TelemetryService,
)
from .cli import bundled_fixture, bundled_sensor_logs, fixtures_dir

__version__ = "0.1.0"

__all__ = [
    "ACTUATORS",
    "ActuatorState",
    "Alert",
    "CalibrationCurve",
    "Channel",
    "ChannelEntry",
    "ChannelStore",
    "ClockRegressionError",
    "ConfigValidationError",
    "ControlConfig",
    "ControlDecision",
    "Controller",
    "EnvState",
    "GrandMean",
    "ItemStats",
    "LikertBand",
    "LIKERT_BANDS",
    "NoiseConfig",
    "SensorKind",
    "SensorReading",
    "SimConfig",
    "SurveyMatrix",
    "TelemetryHTTPServer",
    "TelemetryService",
    "Thresholds",
    "TrialReport",
    "apply_calibration",
    "apply_config",
    "band_for_mean",
    "bundled_fixture",
    "bundled_sensor_logs",
    "closed_loop",
    "compare_trials",
    "cronbach_alpha",
    "diurnal_profile",
    "env_step",
    "evaluate",
    "fit_ph_calibration",
    "fixtures_dir",
    "grand_mean",
    "initial_state",
    "likert_item_stats",
    "load_trials_csv",
    "percentage_difference",
    "replay_fixture",
    "run_closed_loop",
    "sample_sensors",
    "standard_range",
    "validate_reading",
]
