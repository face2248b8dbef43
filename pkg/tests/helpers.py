import random

from mlcp.circulation import (Circulation, MaintenanceOpportunity, Trip, UnitRoster, classify_mo,
                              encode_minutes)
from mlcp.instance import LocationCatalog, MaintenanceType, build_instance


def trip(unit, dep_station, dep_day, dep_clock, arr_station, arr_day, arr_clock):
    return Trip(unit, dep_station, encode_minutes(dep_day, dep_clock),
                arr_station, encode_minutes(arr_day, arr_clock))


def example_roster(unit="r1"):
    """The two-day example roster from the problem description."""
    return [
        trip(unit, "Ekz", 1, "07:09", "Hrl", 1, "10:41"),
        trip(unit, "Hrl", 1, "16:19", "Ekz", 1, "19:52"),
        trip(unit, "Ekz", 1, "20:09", "Mt", 1, "23:31"),
        trip(unit, "Mt", 2, "00:01", "Ehv", 2, "01:06"),
        trip(unit, "Ehv", 2, "05:34", "Amr", 2, "08:12"),
    ]


def example_circulation():
    return Circulation((UnitRoster("r1", tuple(example_roster())),), 48 * 60)


def mo(unit, j, loc, start_h, end_h, is_day=None):
    s, e = int(round(start_h * 60)), int(round(end_h * 60))
    if is_day is None:
        is_day = classify_mo(s / 60, e / 60)
    return MaintenanceOpportunity(unit, j, loc, s, e, is_day)


def unit_mos(unit, rows):
    """``rows``: list of (location, start_h, end_h[, is_day])."""
    return [mo(unit, j, *row) for j, row in enumerate(rows, start=1)]


def random_instance(rng: random.Random, max_units=3, max_mos=8, max_types=2, max_locs=4,
                    max_lmax=2, max_vars=10, lmax=None, n_units=None):
    """Random oracle-scale instance; roughly half of them are feasible."""
    K = rng.randint(1, max_types)
    types = [MaintenanceType(str(k + 1), rng.choice([0.25, 0.5, 1.0]), rng.choice([12, 16, 24, 24]))
             for k in range(K)]
    T = rng.choice([24, 36, 48]) * 60
    locs = ["A", "B", "C", "D"][:rng.randint(1, max_locs)]
    if n_units is None:
        n_units = rng.randint(1, max_units)
    budget = max_vars // K
    mos = {}
    for u in range(n_units):
        uid = f"u{u + 1}"
        left = budget - (n_units - u - 1)  # keep room for later units
        n_max = max(0, min(max_mos, left))
        t = rng.randint(0, 6 * 60)
        ms = []
        while len(ms) < n_max:
            length = rng.choice([15, 30, 45, 60, 90, 120, 180])
            if t + length > T:
                break
            j = len(ms) + 1
            ms.append(MaintenanceOpportunity(uid, j, rng.choice(locs), t, t + length,
                                             classify_mo(t / 60, (t + length) / 60)))
            t += length + rng.randint(30, 8 * 60)
        budget -= len(ms)
        mos[uid] = ms
    night = {l: rng.random() < 0.85 for l in locs}
    cands = tuple(l for l in locs if rng.random() < 0.85)
    b = {(u, t.id): (0.0 if rng.random() < 0.7 else float(rng.randint(1, 6)))
         for u in mos for t in types}
    if lmax is None:
        lmax = rng.randint(0, max_lmax)
    return build_instance(mos, types, LocationCatalog(tuple(locs), night, cands), lmax, b,
                          horizon_min=T, guard_initial=rng.random() < 0.75)


def oracle_suite(n=200, seed=20240601, **kw):
    rng = random.Random(seed)
    return [random_instance(rng, **kw) for _ in range(n)]


def lp_point_check(inst, tol=1e-9):
    """Enumerate every 0/1 point of the exported and re-read LP model.

    Returns ``(lp_ok, checker_ok, blended, lex)`` where the first two are
    boolean arrays over all points, ``blended`` is the LP objective per
    point and ``lex`` the (night, total) pair per point.
    """
    import numpy as np

    from mlcp.lpexport import build_lp, read_lp, write_lp
    from mlcp.solver import Solution, UnitSchedule, validate_solution

    built = build_lp(inst)
    model = read_lp(write_lp(built))
    names = sorted(model.binaries)
    n = len(names)
    col = {v: i for i, v in enumerate(names)}
    codes = np.arange(1 << n, dtype=np.int64)
    X = ((codes[:, None] >> np.arange(n)) & 1).astype(np.float64)
    ok = np.ones(len(codes), bool)
    for r in model.rows:
        a = np.zeros(n)
        for v, c in r.terms.items():
            a[col[v]] += c
        lhs = X @ a
        if r.sense == "<=":
            ok &= lhs <= r.rhs + tol
        elif r.sense == ">=":
            ok &= lhs >= r.rhs - tol
        else:
            ok &= np.abs(lhs - r.rhs) <= tol
    for v, (lo, hi) in model.bounds.items():
        ok &= (X[:, col[v]] >= lo - tol) & (X[:, col[v]] <= hi + tol)
    c = np.zeros(n)
    for v, coef in model.objective.items():
        c[col[v]] = coef
    blended = X @ c

    x_cols = [(col[v], built.x_vars[v]) for v in names if v in built.x_vars]
    y_cols = [(col[v], model.y_vars[v]) for v in names if v in model.y_vars]
    night = np.zeros(n)
    for i, (u, j, _k) in x_cols:
        night[i] = 0 if inst.mos[u][j - 1].is_day else 1
    x_mask = np.zeros(n)
    for i, _ in x_cols:
        x_mask[i] = 1
    lex = np.stack([X @ night, X @ x_mask], axis=1).astype(np.int64)

    checker = np.zeros(len(codes), bool)
    Xi = X.astype(bool)
    for p in range(len(codes)):
        row = Xi[p]
        scheds = {u: set() for u in inst.mos}
        for i, (u, j, k) in x_cols:
            if row[i]:
                scheds[u].add((j, k))
        y = tuple(loc for i, loc in y_cols if row[i])
        sol = Solution("optimal", y, {u: UnitSchedule(frozenset(a)) for u, a in scheds.items()}, None)
        checker[p] = not validate_solution(inst, sol)
    return ok, checker, blended, lex
