"""Rolling stock circulations and the maintenance opportunities they imply.

Times are kept as integer minutes since midnight of day 1 and exposed as
real hours.  A maintenance opportunity (MO) is any strictly positive
standstill of a unit between two consecutive trips, optionally extended with
the standstills before the first and after the last trip of the horizon.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

__all__ = [
    "CirculationFormatError",
    "Trip",
    "UnitRoster",
    "Circulation",
    "MaintenanceOpportunity",
    "Violation",
    "encode_time",
    "encode_minutes",
    "parse_clock",
    "classify_mo",
    "validate_circulation",
    "extract_mos",
    "truncate",
    "read_circulation_csv",
    "write_circulation_csv",
    "read_mos_csv",
    "write_mos_csv",
]

MINUTES_PER_DAY = 24 * 60

CIRCULATION_HEADER = ("unit_id", "dep_station", "dep_day", "dep_clock",
                      "arr_station", "arr_day", "arr_clock")
MO_HEADER = ("unit_id", "j", "location", "start_hours", "end_hours", "is_day")


class CirculationFormatError(ValueError):
    """Raised when circulation input cannot be parsed at all."""


def parse_clock(clock: str) -> int:
    """Return minutes after midnight for an ``HH:MM`` string (< 24:00)."""
    try:
        hh, mm = clock.strip().split(":")
        hours, minutes = int(hh), int(mm)
    except (AttributeError, ValueError):
        raise CirculationFormatError(f"bad clock value {clock!r}, expected HH:MM")
    if not (0 <= hours < 24 and 0 <= minutes < 60):
        raise CirculationFormatError(f"clock {clock!r} outside 00:00..23:59")
    return hours * 60 + minutes


def format_clock(minutes: int) -> str:
    minutes %= MINUTES_PER_DAY
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def encode_minutes(day: int, clock: str) -> int:
    if int(day) < 1:
        raise ValueError(f"day must be >= 1, got {day}")
    return (int(day) - 1) * MINUTES_PER_DAY + parse_clock(clock)


def encode_time(day: int, clock: str) -> float:
    """Hours since midnight of day 1, e.g. ``encode_time(4, "09:30") == 81.5``."""
    return encode_minutes(day, clock) / 60


def _hours_to_minutes(hours: float) -> int:
    return int(round(float(hours) * 60))


@dataclass(frozen=True)
class Trip:
    unit_id: str
    dep_station: str
    dep_min: int
    arr_station: str
    arr_min: int

    @property
    def dep_time(self) -> float:
        return self.dep_min / 60

    @property
    def arr_time(self) -> float:
        return self.arr_min / 60

    @classmethod
    def from_hours(cls, unit_id, dep_station, dep_time, arr_station, arr_time):
        return cls(str(unit_id), dep_station, _hours_to_minutes(dep_time),
                   arr_station, _hours_to_minutes(arr_time))


@dataclass(frozen=True)
class UnitRoster:
    unit_id: str
    trips: tuple[Trip, ...]

    def __post_init__(self):
        object.__setattr__(self, "trips", tuple(
            sorted(self.trips, key=lambda t: (t.dep_min, t.arr_min))))


@dataclass(frozen=True)
class Circulation:
    rosters: tuple[UnitRoster, ...]
    horizon_min: int

    def __post_init__(self):
        object.__setattr__(self, "rosters", tuple(self.rosters))
        if self.horizon_min <= 0:
            raise ValueError("horizon must be positive")

    @property
    def horizon_T(self) -> float:
        return self.horizon_min / 60

    @property
    def unit_ids(self) -> list[str]:
        return [r.unit_id for r in self.rosters]

    @classmethod
    def from_trips(cls, trips: Iterable[Trip], horizon_min: int | None = None):
        """Group trips per unit (units ordered by id).

        Without an explicit horizon, the horizon is the smallest whole number
        of days covering every arrival.
        """
        by_unit: dict[str, list[Trip]] = {}
        for t in trips:
            by_unit.setdefault(t.unit_id, []).append(t)
        if horizon_min is None:
            last = max((t.arr_min for ts in by_unit.values() for t in ts), default=0)
            horizon_min = max(1, math.ceil(last / MINUTES_PER_DAY)) * MINUTES_PER_DAY
        rosters = tuple(UnitRoster(u, tuple(by_unit[u])) for u in sorted(by_unit))
        return cls(rosters, int(horizon_min))

    def subset(self, unit_ids: Iterable[str]) -> "Circulation":
        keep = set(unit_ids)
        return Circulation(tuple(r for r in self.rosters if r.unit_id in keep),
                           self.horizon_min)


@dataclass(frozen=True)
class MaintenanceOpportunity:
    unit_id: str
    index_j: int
    location: str
    start_min: int
    end_min: int
    is_day: bool

    @property
    def start(self) -> float:
        return self.start_min / 60

    @property
    def end(self) -> float:
        return self.end_min / 60

    @property
    def length_min(self) -> int:
        return self.end_min - self.start_min


@dataclass(frozen=True)
class Violation:
    unit_id: str
    trip_index: int | None
    rule: str
    message: str = field(default="", compare=False)

    def __str__(self):
        where = f"trip {self.trip_index}" if self.trip_index is not None else "roster"
        return f"{self.unit_id}\t{where}\t{self.rule}\t{self.message}"


def validate_circulation(circ: Circulation) -> list[Violation]:
    """Check every trip and roster invariant; an empty list means valid.

    Trip indices in the records are 1-based positions after sorting by
    departure time.
    """
    out: list[Violation] = []
    seen: set[str] = set()
    T = circ.horizon_min
    for roster in circ.rosters:
        uid = roster.unit_id
        if uid in seen:
            out.append(Violation(uid, None, "duplicate-unit", "unit id appears twice"))
        seen.add(uid)
        trips = roster.trips
        for n, t in enumerate(trips, start=1):
            if t.unit_id != uid:
                out.append(Violation(uid, n, "unit-mismatch",
                                     f"trip belongs to {t.unit_id}"))
            if t.dep_min >= t.arr_min:
                out.append(Violation(uid, n, "positive-duration",
                                     f"departure {t.dep_time:g}h not before arrival {t.arr_time:g}h"))
            if t.dep_min < 0 or t.arr_min > T:
                out.append(Violation(uid, n, "horizon",
                                     f"trip outside [0, {circ.horizon_T:g}]h"))
            if n > 1:
                prev = trips[n - 2]
                if prev.arr_min > t.dep_min:
                    out.append(Violation(uid, n, "overlap",
                                         f"departs {t.dep_time:g}h before previous arrival {prev.arr_time:g}h"))
                if prev.arr_station != t.dep_station:
                    out.append(Violation(uid, n, "station-continuity",
                                         f"arrived at {prev.arr_station}, departs from {t.dep_station}"))
    return out


def _is_day_minutes(start: int, end: int, delta_d: int, delta_n: int,
                    classification: str) -> bool:
    if classification == "formula":
        return delta_d <= end % MINUTES_PER_DAY < delta_n
    if classification != "prose":
        raise ValueError(f"unknown classification {classification!r}")
    if start // MINUTES_PER_DAY != end // MINUTES_PER_DAY:
        return False
    return delta_d <= start % MINUTES_PER_DAY and end % MINUTES_PER_DAY < delta_n


def _hour_of_day_minutes(value) -> int:
    if isinstance(value, str):
        return parse_clock(value)
    return _hours_to_minutes(value)


def classify_mo(start: float, end: float, delta_D=7.0, delta_N=19.0,
                classification: str = "prose") -> bool:
    """True iff the standstill counts as a daytime MO.

    ``start`` and ``end`` are hours since midnight of day 1; the window bounds
    are hours of day (or ``"HH:MM"`` strings).  The default rule requires both
    ends on the same calendar day inside ``[delta_D, delta_N)``;
    ``classification="formula"`` only tests the end time.
    """
    return _is_day_minutes(_hours_to_minutes(start), _hours_to_minutes(end),
                           _hour_of_day_minutes(delta_D), _hour_of_day_minutes(delta_N),
                           classification)


def extract_mos(circ: Circulation, delta_D=7.0, delta_N=19.0,
                include_boundaries: bool = True,
                classification: str = "prose") -> dict[str, list[MaintenanceOpportunity]]:
    violations = validate_circulation(circ)
    if violations:
        raise ValueError(f"invalid circulation: {violations[0]}"
                         + (f" (+{len(violations) - 1} more)" if len(violations) > 1 else ""))
    dd, dn = _hour_of_day_minutes(delta_D), _hour_of_day_minutes(delta_N)
    if not 0 <= dd < dn < MINUTES_PER_DAY:
        raise ValueError("need 0 <= delta_D < delta_N < 24h")
    T = circ.horizon_min
    out: dict[str, list[MaintenanceOpportunity]] = {}
    for roster in circ.rosters:
        windows: list[tuple[str, int, int]] = []
        trips = roster.trips
        if trips and include_boundaries and trips[0].dep_min > 0:
            windows.append((trips[0].dep_station, 0, trips[0].dep_min))
        for a, b in zip(trips, trips[1:]):
            if b.dep_min > a.arr_min:
                windows.append((a.arr_station, a.arr_min, b.dep_min))
        if trips and include_boundaries and trips[-1].arr_min < T:
            windows.append((trips[-1].arr_station, trips[-1].arr_min, T))
        out[roster.unit_id] = [
            MaintenanceOpportunity(roster.unit_id, j, loc, s, e,
                                   _is_day_minutes(s, e, dd, dn, classification))
            for j, (loc, s, e) in enumerate(windows, start=1)
        ]
    return out


def truncate(circ: Circulation, days: int) -> Circulation:
    """Cut the horizon to ``days`` days.

    Trips departing at or after the cut are dropped; a trip still running at
    the cut is kept with its arrival clamped to the new horizon, so no
    boundary MO follows it.
    """
    T = int(days) * MINUTES_PER_DAY
    if T <= 0:
        raise ValueError("days must be >= 1")
    rosters = []
    for r in circ.rosters:
        kept = []
        for t in r.trips:
            if t.dep_min >= T:
                continue
            if t.arr_min > T:
                t = Trip(t.unit_id, t.dep_station, t.dep_min, t.arr_station, T)
            kept.append(t)
        rosters.append(UnitRoster(r.unit_id, tuple(kept)))
    return Circulation(tuple(rosters), T)


# --------------------------------------------------------------------- CSV I/O

def read_circulation_csv(source, horizon_min: int | None = None) -> Circulation:
    """Parse the circulation CSV from a path or an open text stream."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_circulation_csv(fh, horizon_min)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise CirculationFormatError("empty circulation file (missing header)")
    header = [h.strip().lstrip("﻿") for h in header]
    if tuple(header) != CIRCULATION_HEADER:
        raise CirculationFormatError(
            f"unexpected header {header}, expected {list(CIRCULATION_HEADER)}")
    trips = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(CIRCULATION_HEADER):
            raise CirculationFormatError(f"line {lineno}: expected 7 fields, got {len(row)}")
        uid, dst, dday, dclk, ast, aday, aclk = (c.strip() for c in row)
        try:
            dep = encode_minutes(int(dday), dclk)
            arr = encode_minutes(int(aday), aclk)
        except (ValueError, CirculationFormatError) as exc:
            raise CirculationFormatError(f"line {lineno}: {exc}") from None
        if not uid or not dst or not ast:
            raise CirculationFormatError(f"line {lineno}: empty identifier")
        trips.append(Trip(uid, dst, dep, ast, arr))
    return Circulation.from_trips(trips, horizon_min)


def _day_clock(minutes: int) -> tuple[int, str]:
    return minutes // MINUTES_PER_DAY + 1, format_clock(minutes)


def write_circulation_csv(circ: Circulation, sink=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CIRCULATION_HEADER)
    for r in circ.rosters:
        for t in r.trips:
            dday, dclk = _day_clock(t.dep_min)
            aday, aclk = _day_clock(t.arr_min)
            w.writerow((r.unit_id, t.dep_station, dday, dclk, t.arr_station, aday, aclk))
    text = buf.getvalue()
    if sink is not None:
        _emit(text, sink)
    return text


def write_mos_csv(mos: Mapping[str, Sequence[MaintenanceOpportunity]], sink=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MO_HEADER)
    for uid in sorted(mos):
        for mo in mos[uid]:
            w.writerow((uid, mo.index_j, mo.location, f"{mo.start_min / 60:.6f}",
                        f"{mo.end_min / 60:.6f}", int(mo.is_day)))
    text = buf.getvalue()
    if sink is not None:
        _emit(text, sink)
    return text


def read_mos_csv(source) -> dict[str, list[MaintenanceOpportunity]]:
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_mos_csv(fh)
    reader = csv.DictReader(source)
    if tuple(reader.fieldnames or ()) != MO_HEADER:
        raise CirculationFormatError(f"unexpected MO header {reader.fieldnames}")
    out: dict[str, list[MaintenanceOpportunity]] = {}
    for row in reader:
        uid = row["unit_id"]
        out.setdefault(uid, []).append(MaintenanceOpportunity(
            uid, int(row["j"]), row["location"], _hours_to_minutes(row["start_hours"]),
            _hours_to_minutes(row["end_hours"]), row["is_day"].strip() in ("1", "true", "True")))
    return out


def _emit(text: str, sink) -> None:
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
