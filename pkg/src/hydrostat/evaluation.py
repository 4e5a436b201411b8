"""Evaluation statistics for prototype trials and survey responses.

Covers the percentage-difference comparison between the prototype's probes
and commercial reference devices, five-point Likert aggregation with
agreement/quality bands, and Cronbach's alpha (raw and standardized) for
questionnaire internal consistency. Report renderers truncate for display;
the underlying values keep full precision.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .control import Thresholds


class DegenerateVarianceError(ValueError):
    """Alpha is undefined because an item or the total score is constant."""


class SurveyFormatError(ValueError):
    """A survey CSV cell or row cannot be used; message names the spot."""


def percentage_difference(v1: float, v2: float) -> float:
    """|v1 - v2| over the pair mean, as a percentage.

    Intended for positive physical measurements; undefined when the pair
    mean is zero.
    """
    mean = (v1 + v2) / 2.0
    if mean == 0.0:
        raise ValueError("percentage difference undefined when v1 + v2 == 0")
    return abs(v1 - v2) / mean * 100.0


def truncate(value: float, decimals: int = 1) -> float:
    """Drop digits past `decimals` without rounding (display convention)."""
    factor = 10.0 ** decimals
    return math.trunc(value * factor) / factor


def format_truncated(value: float, decimals: int = 1) -> str:
    return f"{truncate(value, decimals):.{decimals}f}"


# ----- Likert bands -----

@dataclass(frozen=True)
class LikertBand:
    scale: int
    agreement: str
    quality: str
    low: float
    high: float


LIKERT_BANDS: tuple[LikertBand, ...] = (
    LikertBand(5, "Strongly Agree", "Excellent", 4.20, 5.00),
    LikertBand(4, "Agree", "Very Good", 3.40, 4.19),
    LikertBand(3, "Slightly Agree", "Good", 2.60, 3.39),
    LikertBand(2, "Disagree", "Fair", 1.80, 2.59),
    LikertBand(1, "Strongly Disagree", "Deficient", 1.00, 1.79),
)


def _round2(value: float) -> float:
    # Decimal half-up so x.xx5 rounds away from the band edge consistently.
    return float(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def band_for_mean(mean: float) -> LikertBand:
    """Band lookup; means compare at two decimals so the bands partition."""
    if not math.isfinite(mean):
        raise ValueError(f"mean must be finite, got {mean!r}")
    rounded = _round2(mean)
    for band in LIKERT_BANDS:
        if band.low <= rounded <= band.high:
            return band
    raise ValueError(f"mean {mean} outside the 1.00..5.00 scale")


@dataclass(frozen=True)
class ItemStats:
    mean: float
    std_dev: float
    band: LikertBand


def likert_item_stats(scores: Sequence[float]) -> ItemStats:
    """Mean, sample standard deviation (n-1), and band for one item."""
    arr = np.asarray(list(scores), dtype=float)
    if arr.size == 0:
        raise ValueError("likert_item_stats needs at least one response")
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return ItemStats(mean=mean, std_dev=std, band=band_for_mean(mean))


@dataclass(frozen=True)
class GrandMean:
    mean: float        # full precision
    rounded: float     # two decimals, half-up, as printed in reports
    band: LikertBand


def grand_mean(item_means: Sequence[float]) -> GrandMean:
    """Mean of item means with its display rounding and band."""
    means = [float(m) for m in item_means]
    if not means:
        raise ValueError("grand_mean needs at least one item mean")
    for m in means:
        if not math.isfinite(m) or not 1.0 <= m <= 5.0:
            raise ValueError(f"item mean {m!r} outside the 1..5 scale")
    # Average in decimal: binary float sums of two-decimal item means can
    # land a hair under an exact .xx5 and then round the wrong way.
    total = sum(Decimal(repr(m)) for m in means)
    exact = total / len(means)
    rounded = float(exact.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))
    return GrandMean(mean=float(exact), rounded=rounded, band=band_for_mean(rounded))


# ----- Cronbach's alpha -----

def cronbach_alpha(matrix) -> tuple[float, float]:
    """Raw and standardized alpha for a respondents x items score matrix.

    raw = k/(k-1) * (1 - sum(item variances) / variance(total score)),
    standardized = k*rbar / (1 + (k-1)*rbar) with rbar the mean pairwise
    inter-item Pearson correlation. Sample statistics throughout (n-1).
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2:
        raise ValueError("score matrix must be 2-dimensional (respondents x items)")
    n, k = arr.shape
    if k < 2:
        raise ValueError("alpha needs at least two items")
    if n < 2:
        raise ValueError("alpha needs at least two respondents")

    item_var = arr.var(axis=0, ddof=1)
    total_var = float(arr.sum(axis=1).var(ddof=1))
    if total_var <= 0.0:
        raise DegenerateVarianceError("total score is constant across respondents")
    for idx, variance in enumerate(item_var):
        if variance <= 0.0:
            raise DegenerateVarianceError(f"item {idx + 1} is constant across respondents")

    raw = (k / (k - 1)) * (1.0 - float(item_var.sum()) / total_var)

    corr = np.corrcoef(arr, rowvar=False)
    upper = corr[np.triu_indices(k, k=1)]
    rbar = float(upper.mean())
    # rbar == -1/(k-1) means the standardized items sum to a constant,
    # the z-score analogue of a constant total.
    denominator = 1.0 + (k - 1) * rbar
    if denominator <= 0.0:
        raise DegenerateVarianceError(
            "standardized total score is constant across respondents"
        )
    standardized = (k * rbar) / denominator
    return raw, standardized


# ----- Survey matrices -----

@dataclass
class SurveyMatrix:
    """Integer 1..5 responses, one row per respondent, one column per item."""

    items: list[str]
    scores: np.ndarray

    @classmethod
    def from_csv(cls, path: str | Path) -> "SurveyMatrix":
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise SurveyFormatError(f"cannot read survey file {p}: {exc}") from exc
        rows = list(csv.reader(text.splitlines()))
        if not rows or not any(cell.strip() for cell in rows[0]):
            raise SurveyFormatError(f"{p}: missing header row of item labels")
        items = [cell.strip() for cell in rows[0]]
        data: list[list[int]] = []
        for row_num, row in enumerate(rows[1:], start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(items):
                raise SurveyFormatError(
                    f"{p}: row {row_num} has {len(row)} cells, expected {len(items)}"
                )
            parsed: list[int] = []
            for col_idx, cell in enumerate(row):
                label = items[col_idx]
                token = cell.strip()
                try:
                    value = int(token, 10)
                except ValueError:
                    raise SurveyFormatError(
                        f"{p}: row {row_num}, column {label!r}: "
                        f"not an integer: {token!r}"
                    ) from None
                if not 1 <= value <= 5:
                    raise SurveyFormatError(
                        f"{p}: row {row_num}, column {label!r}: "
                        f"value {value} outside 1..5"
                    )
                parsed.append(value)
            data.append(parsed)
        if not data:
            raise SurveyFormatError(f"{p}: no respondent rows")
        return cls(items=items, scores=np.asarray(data, dtype=int))

    def item_stats(self) -> list[ItemStats]:
        return [likert_item_stats(self.scores[:, i]) for i in range(len(self.items))]

    def grand(self) -> GrandMean:
        return grand_mean([stats.mean for stats in self.item_stats()])

    def alpha(self) -> tuple[float, float]:
        return cronbach_alpha(self.scores)


# ----- Trials comparison -----

# Ideal band per trial parameter, drawn from the controller thresholds.
# None means monitor-only (no published band).
def _parameter_band(parameter: str, t: Thresholds) -> tuple[float | None, float | None] | None:
    bands: dict[str, tuple[float | None, float | None]] = {
        "ph": (t.ph_low, t.ph_high),
        "greenhouse_temp": (t.air_low, t.air_high),
        "water_temp": (t.water_low, t.water_high),
        "humidity": (t.humidity_min, None),
    }
    return bands.get(parameter)


def _in_band(value: float, band: tuple[float | None, float | None] | None) -> bool | None:
    if band is None:
        return None
    low, high = band
    if low is not None and value < low:
        return False
    if high is not None and value > high:
        return False
    return True


@dataclass(frozen=True)
class TrialCell:
    parameter: str
    trial: int
    prototype: float
    commercial: float
    pct_diff: float
    prototype_in_range: bool | None
    commercial_in_range: bool | None


@dataclass
class TrialReport:
    cells: list[TrialCell]

    def cell(self, parameter: str, trial: int) -> TrialCell:
        for c in self.cells:
            if c.parameter == parameter and c.trial == trial:
                return c
        raise KeyError(f"no cell for {parameter!r} trial {trial}")

    def parameters(self) -> list[str]:
        seen: list[str] = []
        for c in self.cells:
            if c.parameter not in seen:
                seen.append(c.parameter)
        return seen

    def to_text(self, decimals: int = 1) -> str:
        """Aligned table, one row per parameter, values truncated for display."""
        trials = sorted({c.trial for c in self.cells})
        header = ["parameter"]
        for t in trials:
            header += [f"proto_{t}", f"comm_{t}", f"diff%_{t}"]
        rows = [header]
        for parameter in self.parameters():
            row = [parameter]
            for t in trials:
                c = self.cell(parameter, t)
                row += [
                    f"{c.prototype:g}",
                    f"{c.commercial:g}",
                    format_truncated(c.pct_diff, decimals),
                ]
            rows.append(row)
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = [
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            for row in rows
        ]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        """Machine-readable cells at full precision."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([
            "parameter", "trial", "prototype", "commercial",
            "pct_diff", "prototype_in_range", "commercial_in_range",
        ])
        for c in self.cells:
            writer.writerow([
                c.parameter, c.trial, repr(c.prototype), repr(c.commercial),
                repr(c.pct_diff),
                "" if c.prototype_in_range is None else str(c.prototype_in_range).lower(),
                "" if c.commercial_in_range is None else str(c.commercial_in_range).lower(),
            ])
        return out.getvalue()


def compare_trials(
    prototype: Mapping[str, Sequence[float]],
    commercial: Mapping[str, Sequence[float]],
    thresholds: Thresholds | None = None,
) -> TrialReport:
    """Per-trial percentage differences with in-ideal-range flags."""
    t = thresholds or Thresholds()
    if list(prototype.keys()) != list(commercial.keys()):
        raise ValueError("prototype and commercial series list different parameters")
    cells: list[TrialCell] = []
    for parameter, proto_values in prototype.items():
        comm_values = commercial[parameter]
        if len(proto_values) != len(comm_values):
            raise ValueError(f"{parameter}: trial counts differ between series")
        band = _parameter_band(parameter, t)
        for idx, (pv, cv) in enumerate(zip(proto_values, comm_values), start=1):
            cells.append(TrialCell(
                parameter=parameter,
                trial=idx,
                prototype=float(pv),
                commercial=float(cv),
                pct_diff=percentage_difference(float(pv), float(cv)),
                prototype_in_range=_in_band(float(pv), band),
                commercial_in_range=_in_band(float(cv), band),
            ))
    return TrialReport(cells=cells)


def load_trials_csv(path: str | Path) -> tuple[dict[str, list[float]], dict[str, list[float]]]:
    """Read a parameter,trial,prototype,commercial CSV into two series maps."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SurveyFormatError(f"cannot read trials file {p}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    expected = ["parameter", "trial", "prototype", "commercial"]
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != expected:
        raise SurveyFormatError(f"{p}: expected header {','.join(expected)}")
    prototype: dict[str, list[float]] = {}
    commercial: dict[str, list[float]] = {}
    for row_num, row in enumerate(reader, start=2):
        parameter = (row["parameter"] or "").strip()
        if not parameter:
            raise SurveyFormatError(f"{p}: row {row_num}: empty parameter")
        try:
            pv = float(row["prototype"])
            cv = float(row["commercial"])
        except (TypeError, ValueError):
            raise SurveyFormatError(f"{p}: row {row_num}: non-numeric trial value") from None
        prototype.setdefault(parameter, []).append(pv)
        commercial.setdefault(parameter, []).append(cv)
    if not prototype:
        raise SurveyFormatError(f"{p}: no trial rows")
    return prototype, commercial
