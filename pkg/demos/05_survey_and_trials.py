"""
Evaluation reports: trial comparison and Likert survey statistics.

Two bundled datasets drive this script. The first holds paired readings
from a prototype monitor and a commercial meter over three trials; the
report computes the symmetric percentage difference for every cell and
truncates (never rounds) the displayed value. The second is a 10x20
Likert survey; the report computes per-item means with agreement bands,
a grand mean, and Cronbach's alpha in both raw and standardized form.
"""

from hydrostat import (
    SurveyMatrix,
    bundled_fixture,
    compare_trials,
    load_trials_csv,
    percentage_difference,
)


def trial_report():
    prototype, commercial = load_trials_csv(bundled_fixture("device_comparison.csv"))
    report = compare_trials(prototype, commercial)

    print("Prototype vs commercial meter, percentage difference per trial:")
    print(report.to_text())

    # The text table truncates to one decimal; full precision stays
    # available on the cells for anything downstream.
    cell = report.cell("ph", 1)
    print(f"pH trial 1 at full precision: {cell.pct_diff!r}")
    print(f"Both devices in ideal range: {cell.prototype_in_range and cell.commercial_in_range}")
    print()


def symmetric_difference():
    # The measure is symmetric by construction: both orders divide the
    # same gap by the same average.
    a, b = 7.18, 7.73
    print(f"pct_diff({a}, {b}) = {percentage_difference(a, b):.6f}")
    print(f"pct_diff({b}, {a}) = {percentage_difference(b, a):.6f}")
    print()


def survey_report():
    survey = SurveyMatrix.from_csv(bundled_fixture("sample_survey.csv"))
    stats = survey.item_stats()

    print(f"Survey: {len(survey.scores)} respondents x {len(stats)} items")
    print(f"{'item':>4} {'mean':>6} {'std':>6} band")
    for i, item in enumerate(stats, start=1):
        print(f"{i:>4} {item.mean:>6.2f} {item.std_dev:>6.3f} {item.band.agreement}")

    grand = survey.grand()
    print(f"\nGrand mean {grand.rounded:.2f} -> {grand.band.agreement}")

    raw, standardized = survey.alpha()
    print(f"Cronbach alpha: raw {raw:.3f}, standardized {standardized:.3f}")
    # Above 0.9 both ways: the items measure one construct consistently.


if __name__ == "__main__":
    trial_report()
    symmetric_difference()
    survey_report()
