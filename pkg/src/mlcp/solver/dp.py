"""Exact single-unit maintenance scheduling by forward dynamic programming.

For a fixed availability mask the units are independent, so each unit is
solved on its own.  A DP state is the vector of pending deadlines, one per
maintenance type: the next activity of type k must start no later than
``deadline[k]``; ``inf`` means no activity is required any more.  Taking an
activity of type k in MO j resets its deadline to ``e_j + o_k`` (or ``inf``
when that lies beyond the horizon).  States whose deadline has passed before
the next MO starts are dropped, and a state is dominated by another one with
a lexicographically no-worse objective and componentwise no-earlier
deadlines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from ..circulation import MaintenanceOpportunity
from ..instance import MaintenanceType, MlcpInstance
from .model import Objective, UnitSchedule

INF = math.inf

__all__ = ["usable_mask", "schedule_unit_optimal", "UnitProblem", "DPResult"]


def usable_mask(unit_mos: Sequence[MaintenanceOpportunity], y_day, night_open: Mapping[str, bool]) -> tuple[bool, ...]:
    """Per-MO availability: day MOs need a daytime-open location, night MOs a night-open one."""
    y_day = set(y_day)
    return tuple((mo.location in y_day) if mo.is_day else bool(night_open.get(mo.location, False))
                 for mo in unit_mos)


@dataclass
class DPResult:
    assignments: frozenset | None
    objective: Objective | None
    # position (0-based) of the MO before which every state died; len(mos) = at the horizon end
    death_pos: int | None = None
    # for infeasible runs: (deadlines, last activity end) of the surviving state with the latest deadlines
    witness: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    @property
    def feasible(self) -> bool:
        return self.assignments is not None


class UnitProblem:
    """Precomputed data for repeatedly solving one unit under different masks."""

    def __init__(self, unit_id: str, mos: Sequence[MaintenanceOpportunity],
                 types: Sequence[MaintenanceType], b_min: Sequence[float],
                 horizon_min: float, guard_initial: bool = True):
        self.unit_id = unit_id
        self.mos = tuple(mos)
        self.types = tuple(types)
        self.horizon = horizon_min
        self.starts = [mo.start_min for mo in self.mos]
        self.ends = [mo.end_min for mo in self.mos]
        self.night = [not mo.is_day for mo in self.mos]
        self.dur = [t.duration_min for t in self.types]
        self.interval = [t.interval_min for t in self.types]
        init = []
        for k, t in enumerate(self.types):
            d = b_min[k] + self.interval[k]
            init.append(INF if guard_initial and d > horizon_min else d)
        self.initial = tuple(init)
        # subsets of types in a fixed order; the empty set first
        subsets = [((), 0.0)]
        for r in range(1, len(self.types) + 1):
            for members in combinations(range(len(self.types)), r):
                subsets.append((members, sum(self.dur[k] for k in members)))
        self.subsets = subsets
        self.day_locations = frozenset(mo.location for mo in self.mos if mo.is_day)

    @classmethod
    def from_instance(cls, instance: MlcpInstance, unit: str) -> "UnitProblem":
        b = [instance.b_hours(unit, t.id) * 60 for t in instance.types]
        return cls(unit, instance.mos[unit], instance.types, b, instance.horizon_min,
                   instance.guard_initial)

    def mask(self, y_day, night_open) -> tuple[bool, ...]:
        return usable_mask(self.mos, y_day, night_open)

    def solve(self, usable: Sequence[bool], types_subset: Sequence[int] | None = None) -> DPResult:
        """Lexicographically optimal schedule under ``usable``.

        ``types_subset`` restricts the run to some type positions (the other
        types are ignored entirely); used when localizing infeasibility.
        """
        active = tuple(range(len(self.types))) if types_subset is None else tuple(types_subset)
        initial = tuple(self.initial[k] for k in active)
        if types_subset is None:
            subsets = self.subsets
        else:
            subsets = [((), 0.0)]
            for r in range(1, len(active) + 1):
                for members in combinations(range(len(active)), r):
                    subsets.append((members, sum(self.dur[active[m]] for m in members)))
        interval = [self.interval[k] for k in active]
        T = self.horizon

        states: dict[tuple, tuple] = {initial: (0, 0, None, ())}
        layers: list[dict] = []
        for pos in range(len(self.mos)):
            s, e = self.starts[pos], self.ends[pos]
            alive = [(key, val) for key, val in states.items() if min(key, default=INF) >= s]
            if not alive:
                return self._dead(pos, states, layers, active)
            cap = e - s
            can_use = usable[pos]
            night = self.night[pos]
            nxt: dict[tuple, tuple] = {}
            for key, val in alive:
                n0, t0 = val[0], val[1]
                for members, dur in subsets:
                    if members:
                        if not can_use or dur > cap:
                            continue
                        new = list(key)
                        for m in members:
                            d = e + interval[m]
                            new[m] = d if d <= T else INF
                        new = tuple(new)
                        c = len(members)
                        nn, nt = (n0 + c if night else n0), t0 + c
                    else:
                        new, nn, nt = key, n0, t0
                    cur = nxt.get(new)
                    if cur is None or (nn, nt) < (cur[0], cur[1]):
                        nxt[new] = (nn, nt, key, members)
            states = _prune(nxt)
            layers.append(states)

        done = [(key, val) for key, val in states.items() if all(d == INF for d in key)]
        if not done:
            return self._dead(len(self.mos), states, layers, active)
        key, val = done[0]
        assignments = self._backtrack(layers, key, active)
        return DPResult(frozenset(assignments), Objective(val[0], val[1]))

    def _backtrack(self, layers, key, active) -> list[tuple[int, str]]:
        out = []
        for pos in range(len(layers) - 1, -1, -1):
            n, t, prev, members = layers[pos][key]
            for m in members:
                out.append((pos + 1, self.types[active[m]].id))
            key = prev
        return out

    def _dead(self, pos, states, layers, active) -> DPResult:
        # the surviving state with the latest deadlines localizes the failure
        key = max(states, key=lambda k: (sorted(k), k))
        last_end = []
        trail = self._backtrack(layers, key, active) if layers else []
        for m in range(len(active)):
            tid = self.types[active[m]].id
            js = [j for j, k in trail if k == tid]
            last_end.append(self.ends[max(js) - 1] if js else -INF)
        return DPResult(None, None, pos, (key, tuple(last_end)))


def _prune(states: dict) -> dict:
    """Drop dominated states; survivors ordered by objective, then latest deadlines."""
    if len(states) <= 1:
        return states
    items = sorted(states.items(), key=lambda kv: (kv[1][0], kv[1][1], tuple(-d for d in kv[0])))
    kept: list[tuple] = []
    for key, val in items:
        dominated = False
        for kkey, _ in kept:
            if all(a >= b for a, b in zip(kkey, key)):
                dominated = True
                break
        if not dominated:
            kept.append((key, val))
    return dict(kept)


def schedule_unit_optimal(unit_mos: Sequence[MaintenanceOpportunity], usable: Sequence[bool],
                          types: Sequence[MaintenanceType], b_hours: Sequence[float] | None,
                          horizon_T: float, guard: bool = True) -> UnitSchedule | None:
    """Optimal schedule of one unit for a fixed availability mask, or ``None`` if infeasible.

    ``b_hours`` gives, per type (in the order of ``types``), the hours since the
    last activity at the start of the horizon.
    """
    b = [0.0] * len(types) if b_hours is None else [h * 60 for h in b_hours]
    unit = unit_mos[0].unit_id if unit_mos else ""
    res = UnitProblem(unit, unit_mos, types, b, horizon_T * 60, guard).solve(usable)
    if not res.feasible:
        return None
    return UnitSchedule(res.assignments)
