from datetime import timedelta

import humanize
from tabulate import tabulate


def TimeFormatter(seconds: float) -> str:
    return humanize.precisedelta(timedelta(seconds=seconds), minimum_unit="milliseconds", format="%0.0f")


def summarize_trials(records) -> tuple:
    """Column totals of a verification battery, in Txt.VERIFY_HEADERS order."""
    return (
        len(records),
        sum(r.ok for r in records),
        sum(r.raa_mismatches for r in records),
        sum(r.rr_mismatches for r in records),
        sum(r.raa_rollout_failures for r in records),
        sum(r.rr_rollout_failures for r in records),
        sum(r.stationary_violations for r in records),
        sum(r.stationary_checked for r in records),
    )


def trials_table(records, headers) -> str:
    return tabulate([summarize_trials(records)], headers=headers, tablefmt="simple")
