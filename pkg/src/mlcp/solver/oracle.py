"""Brute-force reference solver for tiny instances.

Enumerates every admissible daytime choice and every 0/1 assignment vector
and filters them with the model constraints written out literally as linear
rows.  Only meant as a test oracle.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from ..instance import MlcpInstance
from .model import Objective, Solution, UnitSchedule

__all__ = ["OracleSizeError", "brute_force_oracle", "MAX_ORACLE_VARS", "MAX_ORACLE_LOCATIONS"]

MAX_ORACLE_VARS = 24
MAX_ORACLE_LOCATIONS = 12
_CHUNK = 1 << 16


class OracleSizeError(ValueError):
    pass


def _rows(instance: MlcpInstance, variables, y_day):
    """Linear rows ``A x <= rhs`` for a fixed daytime choice."""
    index = {v: n for n, v in enumerate(variables)}
    n = len(variables)
    T = instance.horizon_min
    night_open = instance.catalog.night_open
    rows, rhs = [], []

    def row():
        r = np.zeros(n)
        rows.append(r)
        return r

    for unit in sorted(instance.mos):
        mos = instance.mos[unit]
        for t in instance.types:
            o = t.interval_min
            b = instance.b_hours(unit, t.id) * 60
            if not instance.guard_initial or b + o <= T:
                # sum_{p: s_p <= o + b} x_p >= 1
                r = row()
                for p, mo in enumerate(mos, start=1):
                    if mo.start_min <= o + b:
                        r[index[(unit, p, t.id)]] = -1
                rhs.append(-1)
            for j, mo in enumerate(mos, start=1):
                e = mo.end_min
                if e + o <= T:
                    # x_j - sum_{p: e_j < s_p <= e_j + o} x_p <= 0
                    r = row()
                    r[index[(unit, j, t.id)]] = 1
                    for p, other in enumerate(mos, start=1):
                        if e < other.start_min <= e + o:
                            r[index[(unit, p, t.id)]] -= 1
                    rhs.append(0)
        for j, mo in enumerate(mos, start=1):
            if mo.is_day:
                avail = 1 if mo.location in y_day else 0
            else:
                avail = 1 if night_open.get(mo.location, False) else 0
            for t in instance.types:
                r = row()
                r[index[(unit, j, t.id)]] = 1
                rhs.append(avail)
            r = row()
            for t in instance.types:
                r[index[(unit, j, t.id)]] = t.duration_min
            rhs.append(mo.end_min - mo.start_min)
    if not rows:
        return np.zeros((0, n)), np.zeros(0)
    return np.array(rows), np.array(rhs, dtype=float)


def _choices(instance: MlcpInstance, y_day):
    if y_day is not None:
        yield tuple(sorted(y_day))
        return
    cands = sorted(instance.catalog.day_candidates)
    for size in range(0, min(instance.lmax_day, len(cands)) + 1):
        yield from combinations(cands, size)


def brute_force_oracle(instance: MlcpInstance, y_day=None) -> Solution:
    """Lexicographic optimum by exhaustive enumeration (optionally for a fixed choice)."""
    variables = [(u, j, t.id) for u in sorted(instance.mos)
                 for j in range(1, len(instance.mos[u]) + 1) for t in instance.types]
    n = len(variables)
    if n > MAX_ORACLE_VARS:
        raise OracleSizeError(f"{n} assignment variables exceed the oracle cap {MAX_ORACLE_VARS}")
    if len(instance.catalog.day_candidates) > MAX_ORACLE_LOCATIONS:
        raise OracleSizeError("too many candidate locations for the oracle")
    if y_day is not None and len(set(y_day)) > instance.lmax_day:
        raise ValueError("fixed choice exceeds the budget")

    night = np.array([0 if instance.mos[u][j - 1].is_day else 1 for u, j, _ in variables], dtype=np.int64)
    bits = np.arange(n, dtype=np.int64)
    best = None  # (key, y, x_row)
    for y in _choices(instance, y_day):
        A, rhs = _rows(instance, variables, set(y))
        for lo in range(0, 1 << n, _CHUNK):
            codes = np.arange(lo, min(lo + _CHUNK, 1 << n), dtype=np.int64)
            X = ((codes[:, None] >> bits) & 1).astype(np.float64)
            ok = np.all(X @ A.T <= rhs + 1e-9, axis=1) if len(rhs) else np.ones(len(codes), bool)
            if not ok.any():
                continue
            Xi = X[ok].astype(np.int64)
            key = (Xi @ night) * (n + 1) + Xi.sum(axis=1)
            pos = int(np.argmin(key))
            if best is None or key[pos] < best[0]:
                best = (int(key[pos]), y, Xi[pos])
    if best is None:
        return Solution("infeasible", (), {}, None, infeasible_units=tuple(sorted(instance.mos)))
    _, y, x = best
    scheds: dict[str, set] = {u: set() for u in instance.mos}
    for flag, (u, j, k) in zip(x, variables):
        if flag:
            scheds[u].add((j, k))
    obj = Objective(int(x @ night), int(x.sum()))
    return Solution("optimal", tuple(y), {u: UnitSchedule(frozenset(a)) for u, a in scheds.items()}, obj)
