"""Independent feasibility check of a solution against the model constraints.

Works directly from MO times and the constraint definitions; it does not use
the successor sets, the DP or anything else from the solvers.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..instance import MlcpInstance
from .model import Solution, objective_of

__all__ = ["ConstraintViolation", "validate_solution"]


@dataclass(frozen=True)
class ConstraintViolation:
    constraint: str
    unit: str | None = None
    j: int | None = None
    k: str | None = None
    detail: str = ""

    def __str__(self):
        where = "/".join(str(x) for x in (self.unit, self.j, self.k) if x is not None)
        return f"{self.constraint}[{where}] {self.detail}".rstrip()


def validate_solution(instance: MlcpInstance, solution: Solution) -> list[ConstraintViolation]:
    out: list[ConstraintViolation] = []
    cands = set(instance.catalog.day_candidates)
    night_open = instance.catalog.night_open
    y_day = set(solution.y_day)
    T = instance.horizon_min

    if len(y_day) > instance.lmax_day:
        out.append(ConstraintViolation("budget", detail=f"{len(y_day)} > {instance.lmax_day}"))
    for loc in sorted(y_day - cands):
        out.append(ConstraintViolation("candidate", detail=f"{loc} is not a daytime candidate"))

    types = {t.id: t for t in instance.types}
    clean: dict[str, set] = {}
    for unit, sched in solution.schedules.items():
        mos = instance.mos.get(unit)
        if mos is None:
            out.append(ConstraintViolation("index", unit, detail="unknown unit"))
            continue
        for j, k in sched:
            if not 1 <= j <= len(mos) or k not in types:
                out.append(ConstraintViolation("index", unit, j, k, "no such MO or type"))
                continue
            clean.setdefault(unit, set()).add((j, k))

    for unit in sorted(instance.mos):
        mos = instance.mos[unit]
        assigned = clean.get(unit, set())
        per_mo: dict[int, list[str]] = {}
        for j, k in assigned:
            per_mo.setdefault(j, []).append(k)

        for j in sorted(per_mo):
            mo = mos[j - 1]
            open_now = (mo.location in y_day) if mo.is_day else night_open.get(mo.location, False)
            if not open_now:
                for k in sorted(per_mo[j]):
                    out.append(ConstraintViolation(
                        "availability", unit, j, k,
                        f"{'day' if mo.is_day else 'night'} MO at closed location {mo.location}"))
            used = sum(types[k].duration_min for k in per_mo[j])
            if used > mo.end_min - mo.start_min:
                out.append(ConstraintViolation("capacity", unit, j, None,
                                               f"{used / 60:g}h in a {(mo.end_min - mo.start_min) / 60:g}h MO"))

        for t in instance.types:
            starts = [mos[j - 1].start_min for j, k in assigned if k == t.id]
            b = instance.b_hours(unit, t.id) * 60
            o = t.interval_min
            required = (not instance.guard_initial) or (b + o <= T)
            if required and not any(s <= o + b for s in starts):
                out.append(ConstraintViolation("initial", unit, None, t.id,
                                               f"no activity starting by {(o + b) / 60:g}h"))
            for j, k in sorted(assigned):
                if k != t.id:
                    continue
                e = mos[j - 1].end_min
                if e + o > T:
                    continue
                if not any(e < s <= e + o for s in starts):
                    out.append(ConstraintViolation("chain", unit, j, t.id,
                                                   f"no follow-up activity in ({e / 60:g}, {(e + o) / 60:g}]h"))

    if solution.objective is not None and not out:
        recount = objective_of(instance, clean)
        if recount != tuple(solution.objective):
            out.append(ConstraintViolation("objective",
                                           detail=f"reported {tuple(solution.objective)}, recount {tuple(recount)}"))
    return out
