"""Daytime location choice: evaluation of a fixed choice, exact search and greedy."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Iterable

from ..instance import MlcpInstance
from .dp import DPResult, UnitProblem
from .model import Objective, Solution, UnitSchedule

log = logging.getLogger(__name__)

__all__ = ["ChoiceEvaluator", "solve_for_choice", "solve_exact", "solve_greedy",
           "DEFAULT_ENUMERATION_CAP", "resolve_threads"]

DEFAULT_ENUMERATION_CAP = 5000


def resolve_threads(n_threads: int | None) -> int:
    if n_threads is None:
        n_threads = int(os.environ.get("MLCP_THREADS", "1") or 1)
    return max(1, int(n_threads))


class ChoiceEvaluator:
    """Solves every unit for a given set of daytime-open locations, with caching.

    A unit's optimum only depends on which of *its* daytime MO locations are
    open, so results are cached per unit under that intersection.
    """

    def __init__(self, instance: MlcpInstance, n_threads: int | None = 1):
        self.instance = instance
        self.units = instance.units
        self.problems = {u: UnitProblem.from_instance(instance, u) for u in self.units}
        self._cache: dict[str, dict[frozenset, DPResult]] = {u: {} for u in self.units}
        self.n_threads = resolve_threads(n_threads)
        self.dp_runs = 0

    def _key(self, unit: str, y_day: frozenset) -> frozenset:
        return y_day & self.problems[unit].day_locations

    def unit_results(self, y_day: Iterable[str]) -> dict[str, DPResult]:
        y = frozenset(y_day)
        night_open = self.instance.catalog.night_open
        todo = [u for u in self.units if self._key(u, y) not in self._cache[u]]
        if todo:
            def run(u):
                p = self.problems[u]
                return p.solve(p.mask(y, night_open))
            if self.n_threads > 1 and len(todo) > 1:
                with ThreadPoolExecutor(self.n_threads) as pool:
                    results = list(pool.map(run, todo))
            else:
                results = [run(u) for u in todo]
            # merged in unit order regardless of completion order
            for u, res in zip(todo, results):
                self._cache[u][self._key(u, y)] = res
            self.dp_runs += len(todo)
        return {u: self._cache[u][self._key(u, y)] for u in self.units}

    def evaluate(self, y_day: Iterable[str]) -> tuple[Objective | None, tuple[str, ...]]:
        """Summed objective (``None`` when infeasible) and the infeasible units."""
        res = self.unit_results(y_day)
        bad = tuple(u for u in self.units if not res[u].feasible)
        if bad:
            return None, bad
        night = sum(r.objective.night for r in res.values())
        total = sum(r.objective.total for r in res.values())
        return Objective(night, total), ()

    def rank(self, y_day: Iterable[str]) -> tuple:
        """Sort key: feasible choices first, by objective; infeasible by unit count."""
        obj, bad = self.evaluate(y_day)
        return (0, obj.night, obj.total) if obj is not None else (1, len(bad), 0)

    def solution(self, y_day: Iterable[str], status: str = "optimal") -> Solution:
        y = tuple(sorted(set(y_day)))
        res = self.unit_results(y)
        obj, bad = self.evaluate(y)
        if bad:
            return Solution("infeasible", y, {}, None, infeasible_units=bad,
                            stats={"dp_runs": self.dp_runs})
        scheds = {u: UnitSchedule(res[u].assignments) for u in self.units}
        return Solution(status, y, scheds, obj, stats={"dp_runs": self.dp_runs})


def solve_for_choice(instance: MlcpInstance, y_day: Iterable[str], n_threads: int | None = 1,
                     evaluator: ChoiceEvaluator | None = None) -> Solution:
    y = tuple(sorted(set(y_day)))
    unknown = set(y) - set(instance.catalog.day_candidates)
    if unknown:
        raise ValueError(f"not daytime candidates: {sorted(unknown)}")
    if len(y) > instance.lmax_day:
        raise ValueError(f"{len(y)} locations exceed the daytime budget {instance.lmax_day}")
    ev = evaluator or ChoiceEvaluator(instance, n_threads)
    return ev.solution(y)


def _infeasible(instance, ev: ChoiceEvaluator, bad) -> Solution:
    from .certify import detect_structural_infeasibility
    certs = tuple(detect_structural_infeasibility(instance, ev))
    return Solution("infeasible", (), {}, None, infeasible_units=tuple(bad), certificates=certs,
                    stats={"dp_runs": ev.dp_runs})


def solve_exact(instance: MlcpInstance, enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
                n_threads: int | None = 1) -> Solution:
    """Globally optimal location choice and schedules.

    Enumerates all budget-sized choices when there are at most
    ``enumeration_cap`` of them, otherwise runs branch-and-bound over the
    candidates with the all-undecided-open relaxation as bound.  Opening more
    locations never hurts, so only choices using the full budget are leaves.
    """
    ev = ChoiceEvaluator(instance, n_threads)
    cands = list(instance.catalog.day_candidates)
    m = instance.effective_lmax
    full_obj, bad = ev.evaluate(cands)
    if full_obj is None:
        return _infeasible(instance, ev, bad)

    if math.comb(len(cands), m) <= enumeration_cap:
        best_key, best_y = None, None
        n_leaves = 0
        for combo in combinations(cands, m):
            n_leaves += 1
            key = ev.rank(combo)
            if best_key is None or key < best_key:
                best_key, best_y = key, combo
        method, nodes = "enumeration", n_leaves
    else:
        best_key, best_y, nodes = _branch_and_bound(ev, cands, m)
        method = "branch-and-bound"

    if best_key is None or best_key[0] == 1:
        # feasible with everything open, but not within the budget
        sol = ev.solution(best_y or ())
        sol.stats.update(method=method, nodes=nodes)
        return sol
    sol = ev.solution(best_y, "optimal")
    sol.stats.update(method=method, nodes=nodes)
    log.debug("solve_exact: %s, %d nodes, %d DP runs", method, nodes, ev.dp_runs)
    return sol


def _branch_and_bound(ev: ChoiceEvaluator, cands: list[str], m: int):
    # root order: best single-location improvement first, ties by location id
    order = sorted(cands, key=lambda l: (ev.rank((l,)), l))
    best = {"key": None, "y": None}
    nodes = 0

    def visit(idx: int, opened: tuple[str, ...]):
        nonlocal nodes
        nodes += 1
        relaxed = opened + tuple(order[idx:])
        bound = ev.rank(relaxed)
        if bound[0] == 1:
            return
        if best["key"] is not None and bound >= best["key"]:
            return
        if len(relaxed) <= m:
            best["key"], best["y"] = bound, tuple(sorted(relaxed))
            return
        if len(opened) == m:
            key = ev.rank(opened)
            if best["key"] is None or key < best["key"]:
                best["key"], best["y"] = key, tuple(sorted(opened))
            return
        visit(idx + 1, opened + (order[idx],))
        visit(idx + 1, opened)

    visit(0, ())
    return best["key"], best["y"], nodes


def solve_greedy(instance: MlcpInstance, n_threads: int | None = 1) -> Solution:
    """Open locations one at a time, always the one improving the objective most."""
    ev = ChoiceEvaluator(instance, n_threads)
    cands = list(instance.catalog.day_candidates)
    chosen: list[str] = []
    current = ev.rank(chosen)
    while len(chosen) < instance.effective_lmax:
        best_key, best_l = None, None
        for l in cands:
            if l in chosen:
                continue
            key = ev.rank(chosen + [l])
            if best_key is None or key < best_key:
                best_key, best_l = key, l
        if best_key is None or not best_key < current:
            break
        chosen.append(best_l)
        current = best_key
    if current[0] == 1:
        full_obj, bad = ev.evaluate(cands)
        if full_obj is None:
            return _infeasible(instance, ev, bad)
        return ev.solution(chosen)
    sol = ev.solution(chosen, "heuristic")
    sol.stats.update(method="greedy", order=list(chosen))
    return sol
