"""Result types shared by the solvers, the checker and the JSON writers."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from ..instance import MlcpInstance


class Objective(NamedTuple):
    """Lexicographic objective: nighttime activities first, then all activities."""
    night: int
    total: int

    def blended(self, epsilon: float) -> float:
        return self.night + epsilon * self.total


@dataclass(frozen=True)
class UnitSchedule:
    assignments: frozenset[tuple[int, str]] = frozenset()

    def __iter__(self):
        return iter(sorted(self.assignments))

    def __len__(self):
        return len(self.assignments)

    def at(self, j: int) -> list[str]:
        return sorted(k for jj, k in self.assignments if jj == j)

    def of_type(self, k: str) -> list[int]:
        return sorted(j for j, kk in self.assignments if kk == k)


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """No chain of usable MOs can meet a deadline, even with every candidate open.

    ``window_start`` is the end of the last activity the deadline counts from
    (``-inf`` for the initial requirement); ``window_end`` is the deadline.
    ``type_id`` is ``None`` when every type is feasible on its own and the
    conflict comes from sharing MO capacity.
    """
    unit_id: str
    type_id: str | None
    window_start: float
    window_end: float

    def to_dict(self) -> dict:
        return {
            "unit": self.unit_id,
            "k": self.type_id,
            "window": [None if math.isinf(self.window_start) else round(self.window_start, 6),
                       None if math.isinf(self.window_end) else round(self.window_end, 6)],
        }


@dataclass
class Solution:
    status: str
    y_day: tuple[str, ...]
    schedules: dict[str, UnitSchedule]
    objective: Objective | None
    infeasible_units: tuple[str, ...] = ()
    certificates: tuple[InfeasibilityCertificate, ...] = ()
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"

    def to_dict(self, instance: MlcpInstance) -> dict:
        rows = []
        for unit in sorted(self.schedules):
            mos = instance.mos.get(unit, ())
            for j, k in self.schedules[unit]:
                mo = mos[j - 1]
                rows.append({"unit": unit, "j": j, "k": k, "location": mo.location,
                             "start": round(mo.start, 6), "end": round(mo.end, 6),
                             "is_day": mo.is_day})
        return {
            "y_day": sorted(self.y_day),
            "objective": None if self.objective is None else
            {"night": self.objective.night, "total": self.objective.total},
            "schedules": rows,
            "status": self.status,
            "certificates": [c.to_dict() for c in self.certificates],
            "infeasible_units": list(self.infeasible_units),
        }

    def to_json(self, instance: MlcpInstance) -> str:
        return json.dumps(self.to_dict(instance), indent=2, sort_keys=False) + "\n"


def solution_from_dict(data: Mapping) -> Solution:
    schedules: dict[str, set] = {}
    for row in data.get("schedules", []):
        schedules.setdefault(str(row["unit"]), set()).add((int(row["j"]), str(row["k"])))
    obj = data.get("objective")
    certs = tuple(
        InfeasibilityCertificate(c["unit"], c["k"],
                                 -math.inf if c["window"][0] is None else c["window"][0],
                                 math.inf if c["window"][1] is None else c["window"][1])
        for c in data.get("certificates", []))
    return Solution(data.get("status", "optimal"), tuple(data.get("y_day", [])),
                    {u: UnitSchedule(frozenset(a)) for u, a in schedules.items()},
                    None if obj is None else Objective(int(obj["night"]), int(obj["total"])),
                    tuple(data.get("infeasible_units", [])), certs)


def objective_of(instance: MlcpInstance, schedules: Mapping[str, Iterable[tuple[int, str]]]) -> Objective:
    night = total = 0
    for unit, sched in schedules.items():
        mos = instance.mos[unit]
        for j, _k in sched:
            total += 1
            if not mos[j - 1].is_day:
                night += 1
    return Objective(night, total)
