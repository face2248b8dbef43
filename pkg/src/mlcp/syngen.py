"""Seeded synthetic circulations with a railway-like daily rhythm.

Every unit runs on a small "line" of stations.  Each day it leaves its
overnight station in the early morning, runs back-to-back trips with
occasional short turnaround standstills, optionally stands still for a few
hours around midday (preferably at the line's main station), and ends the
day with an overnight standstill.  Randomness comes from a counter-based SplitMix64
stream per (seed, unit), so output is identical on every platform and does
not depend on generation order.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

from .circulation import Circulation, Trip, UnitRoster

__all__ = ["DEFAULT_STATIONS", "SplitMix64", "GenParams", "generate"]

DEFAULT_STATIONS = ("Amr", "Hdr", "Hfdo", "Mt", "Gvc", "Bkd", "Bkh", "Dv", "Gn", "Ekz",
                    "Hrl", "Ehv", "Vs", "Zl")

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Counter-based SplitMix64: the n-th draw is ``mix64(key + n * gamma)``."""

    def __init__(self, seed: int, stream: int = 0):
        self.key = _mix64((int(seed) & _MASK) ^ _mix64((int(stream) * _GAMMA + 1) & _MASK))
        self.counter = 0

    def next_u64(self) -> int:
        self.counter += 1
        return _mix64((self.key + self.counter * _GAMMA) & _MASK)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.next_u64() % (hi - lo + 1)

    def choice(self, seq, weights=None):
        if weights is None:
            return seq[self.randint(0, len(seq) - 1)]
        r = self.random() * sum(weights)
        acc = 0.0
        for item, w in zip(seq, weights):
            acc += w
            if r < acc:
                return item
        return seq[-1]


@dataclass
class GenParams:
    n_units: int = 20
    stations: tuple[str, ...] = DEFAULT_STATIONS
    horizon_days: int = 42
    mean_trip_hours: float = 1.5
    line_length: int = 4
    p_midday: float = 0.5
    p_midday_home: float = 0.5
    p_turnaround_stop: float = 0.3
    overnight_rotation: bool = True
    seed: int = 0
    hub_bias: float = 1.0

    def __post_init__(self):
        self.stations = tuple(self.stations)
        if self.n_units < 1 or self.horizon_days < 1:
            raise ValueError("n_units and horizon_days must be >= 1")
        for name in ("p_midday", "p_midday_home", "p_turnaround_stop"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if len(self.stations) < 2:
            raise ValueError("need at least two stations")
        if not 2 <= self.line_length:
            raise ValueError("line_length must be >= 2")
        if self.mean_trip_hours <= 0:
            raise ValueError("mean_trip_hours must be > 0")

    @classmethod
    def from_dict(cls, data) -> "GenParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown generator parameters: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "GenParams":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stations"] = list(self.stations)
        return d


def _line(rng: SplitMix64, p: GenParams) -> list[str]:
    size = min(p.line_length, len(p.stations))
    pool = list(p.stations)
    weights = [1.0 / (1 + r) ** p.hub_bias for r in range(len(pool))]
    line = []
    for _ in range(size):
        s = rng.choice(pool, weights)
        i = pool.index(s)
        pool.pop(i)
        weights.pop(i)
        line.append(s)
    # main station first: the most popular one on the line
    line.sort(key=p.stations.index)
    return line


def _unit_trips(uid: str, rng: SplitMix64, p: GenParams) -> list[Trip]:
    day_min = 24 * 60
    T = p.horizon_days * day_min
    line = _line(rng, p)
    home = line[0]
    cur = home
    t_free = 0
    trips: list[Trip] = []
    trip_len = p.mean_trip_hours * 60

    def add(dest: str, dep: int) -> int | None:
        nonlocal cur
        dur = max(15, int(round(trip_len * (0.5 + rng.random()))))
        if dep + dur > T - 60:
            return None
        trips.append(Trip(uid, cur, dep, dest, dep + dur))
        cur = dest
        return dep + dur

    def turnaround() -> int:
        return rng.randint(5, 25) if rng.random() < p.p_turnaround_stop else 0

    def other(station: str) -> str:
        return rng.choice([s for s in line if s != station])

    for d in range(p.horizon_days):
        base = d * day_min
        t = max(base + 5 * 60 + 30 + rng.randint(0, 120), t_free + 180)
        if t >= T - 120:
            break
        midday = rng.random() < p.p_midday
        end_target = base + 21 * 60 + rng.randint(0, 150)
        stop_after = base + 9 * 60 + rng.randint(0, 90)
        stopped = not midday
        while t < end_target:
            if not stopped and t >= stop_after:
                stopped = True
                target = home if rng.random() < p.p_midday_home else rng.choice(line)
                if cur != target:
                    arr = add(target, t)
                    if arr is None:
                        break
                    t = arr
                latest_end = base + 18 * 60 + 30
                if t <= base + 15 * 60:
                    t = min(t + rng.randint(150, 300), latest_end)
                    continue
            arr = add(other(cur), t)
            if arr is None:
                break
            t = arr + turnaround()
        if not p.overnight_rotation and cur != home:
            arr = add(home, t)
            if arr is not None:
                t = arr
        t_free = trips[-1].arr_min if trips else t
    return trips


def generate(params: GenParams) -> Circulation:
    """Synthetic circulation for ``params``; identical output for identical params."""
    width = max(3, len(str(params.n_units)))
    rosters = []
    for i in range(params.n_units):
        uid = f"u{i + 1:0{width}d}"
        rng = SplitMix64(params.seed, i)
        rosters.append(UnitRoster(uid, tuple(_unit_trips(uid, rng, params))))
    return Circulation(tuple(rosters), params.horizon_days * 24 * 60)
