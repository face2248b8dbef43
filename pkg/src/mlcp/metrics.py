"""Daytime share, activity hours and location consistency over scenarios."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .instance import MlcpInstance
from .solver.model import Solution

__all__ = ["DayActivity", "ScenarioReport", "ConsistencyReport", "daily_activity",
           "mean_daytime_share", "mean_total_hours", "location_day_hours",
           "scenario_report", "consistency", "write_share_csv", "write_locations_csv"]


@dataclass(frozen=True)
class DayActivity:
    day: int  # 1-based calendar day
    daytime_hours: float
    nighttime_hours: float

    @property
    def total_hours(self) -> float:
        return self.daytime_hours + self.nighttime_hours


def n_days(instance: MlcpInstance) -> int:
    return max(1, math.ceil(instance.horizon_min / (24 * 60)))


def daily_activity(solution: Solution, instance: MlcpInstance) -> list[DayActivity]:
    """Activity hours per calendar day.

    Each activity counts its full duration on the day its MO starts, as
    daytime or nighttime work according to the MO's classification.
    """
    days = n_days(instance)
    day_h = [0.0] * days
    night_h = [0.0] * days
    dur = {t.id: t.duration_v for t in instance.types}
    for unit, sched in solution.schedules.items():
        mos = instance.mos[unit]
        for j, k in sched:
            mo = mos[j - 1]
            d = min(mo.start_min // (24 * 60), days - 1)
            if mo.is_day:
                day_h[d] += dur[k]
            else:
                night_h[d] += dur[k]
    return [DayActivity(d + 1, day_h[d], night_h[d]) for d in range(days)]


def mean_daytime_share(series: Sequence[DayActivity]) -> float:
    if not series:
        raise ValueError("empty series")
    total = sum(a.total_hours for a in series)
    if total == 0:
        return 0.0
    return sum(a.daytime_hours for a in series) / total


def mean_total_hours(series: Sequence[DayActivity]) -> float:
    if not series:
        raise ValueError("empty series")
    return sum(a.total_hours for a in series) / len(series)


def location_day_hours(solution: Solution, instance: MlcpInstance) -> dict[str, float]:
    """Mean daytime activity hours per day at each location with daytime work."""
    days = n_days(instance)
    dur = {t.id: t.duration_v for t in instance.types}
    hours: dict[str, float] = {}
    for unit, sched in solution.schedules.items():
        mos = instance.mos[unit]
        for j, k in sched:
            mo = mos[j - 1]
            if mo.is_day:
                hours[mo.location] = hours.get(mo.location, 0.0) + dur[k]
    return {loc: h / days for loc, h in sorted(hours.items())}


@dataclass
class ScenarioReport:
    scenario: str
    lmax: int
    mean_daytime_share: float
    mean_total_hours: float
    per_location_day_hours: dict[str, float]
    y_day: tuple[str, ...]
    status: str = "optimal"


def scenario_report(solution: Solution, instance: MlcpInstance, scenario: str = "") -> ScenarioReport:
    if not solution.feasible:
        return ScenarioReport(scenario, instance.lmax_day, math.nan, math.nan, {}, (), "infeasible")
    series = daily_activity(solution, instance)
    return ScenarioReport(scenario, instance.lmax_day, mean_daytime_share(series),
                          mean_total_hours(series), location_day_hours(solution, instance),
                          tuple(sorted(solution.y_day)), solution.status)


@dataclass
class ConsistencyReport:
    n_scenarios: int
    opened: dict[str, int] = field(default_factory=dict)
    mean_day_hours: dict[str, float] = field(default_factory=dict)


def consistency(reports: Iterable[ScenarioReport]) -> ConsistencyReport:
    """How often each location is opened, and its mean daytime hours when opened."""
    reports = [r for r in reports if r.status != "infeasible"]
    if not reports:
        raise ValueError("need at least one feasible report")
    opened: dict[str, int] = {}
    hours: dict[str, float] = {}
    for r in reports:
        for loc in r.y_day:
            opened[loc] = opened.get(loc, 0) + 1
            hours[loc] = hours.get(loc, 0.0) + r.per_location_day_hours.get(loc, 0.0)
    return ConsistencyReport(len(reports), dict(sorted(opened.items())),
                             {loc: hours[loc] / opened[loc] for loc in sorted(opened)})


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else f"{x:.6f}"


def write_share_csv(reports: Iterable[ScenarioReport], sink=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("scenario", "lmax", "status", "mean_daytime_share", "mean_total_hours", "y_day"))
    for r in reports:
        w.writerow((r.scenario, r.lmax, r.status, _fmt(r.mean_daytime_share),
                    _fmt(r.mean_total_hours), " ".join(r.y_day)))
    return _emit(buf.getvalue(), sink)


def write_locations_csv(report: ConsistencyReport, sink=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("location", "scenarios_open", "mean_day_hours"))
    for loc in report.opened:
        w.writerow((loc, report.opened[loc], f"{report.mean_day_hours[loc]:.6f}"))
    return _emit(buf.getvalue(), sink)


def _emit(text: str, sink) -> str:
    if sink is not None:
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return text
