"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest -v -s -m acceptance`` or ``python tests/test_acceptance.py``.
"""
import json
import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import lp_point_check, oracle_suite, example_circulation, random_instance, unit_mos  # noqa: E402
from mlcp.circulation import classify_mo, encode_time, extract_mos, truncate, write_circulation_csv  # noqa: E402
from mlcp.cli import main as cli_main  # noqa: E402
from mlcp.instance import DEFAULT_TYPES, InstanceConfig, build_instance, instance_from_config  # noqa: E402
from mlcp.metrics import daily_activity, location_day_hours, mean_daytime_share  # noqa: E402
from mlcp.solver import (brute_force_oracle, detect_structural_infeasibility, solve_exact,  # noqa: E402
                         validate_solution)
from mlcp.solver.certify import check_certificate  # noqa: E402
from mlcp.solver.dp import UnitProblem  # noqa: E402
from mlcp.syngen import DEFAULT_STATIONS, GenParams, generate  # noqa: E402

pytestmark = pytest.mark.acceptance

# all 14 stations are night-open and daytime candidates
ALL_STATIONS = InstanceConfig(locations={s: True for s in DEFAULT_STATIONS})


def report(cid, ok, detail, elapsed):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {cid}: {detail} ({elapsed:.2f}s)")
    return ok


def test_c1_classification():
    t0 = time.perf_counter()
    mos = extract_mos(example_circulation(), include_boundaries=False)["r1"]
    got = [m.is_day for m in mos]
    late = classify_mo(11.0, 19 + 1 / 60)
    ok = got == [True, False, False, False] and late is False
    elapsed = time.perf_counter() - t0
    report(1, ok and elapsed < 1, f"worked example {got}, 11:00-19:01 day={late}", elapsed)
    assert ok and elapsed < 1


def test_c2_time_encoding():
    t0 = time.perf_counter()
    got = (encode_time(4, "09:30"), encode_time(4, "13:15"))
    elapsed = time.perf_counter() - t0
    ok = got == (81.5, 85.25)
    report(2, ok and elapsed < 1, f"(day 4, 09:30, 13:15) -> {got}", elapsed)
    assert ok and elapsed < 1


@pytest.fixture(scope="module")
def suite():
    return oracle_suite(200)


def test_c3_oracle_equivalence(suite):
    t0 = time.perf_counter()
    mismatches, violations, feasible = [], 0, 0
    for n, inst in enumerate(suite):
        assert len(inst.mos) <= 3 and len(inst.types) <= 2 and inst.lmax_day <= 2
        assert all(len(m) <= 8 for m in inst.mos.values()) and len(inst.catalog.locations) <= 4
        exact, oracle = solve_exact(inst), brute_force_oracle(inst)
        if exact.objective != oracle.objective:
            mismatches.append(n)
        if exact.feasible:
            feasible += 1
            violations += len(validate_solution(inst, exact))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and violations == 0 and elapsed < 120
    report(3, ok, f"{len(suite)} instances ({feasible} feasible), {len(mismatches)} objective "
                  f"mismatches, {violations} violations", elapsed)
    assert ok, mismatches[:10]


def test_c4_monotone_daytime_share():
    t0 = time.perf_counter()
    budgets = (0, 1, 2, 3, 5, 20)
    failures = []
    for seed in range(10):
        circ = generate(GenParams(n_units=20, horizon_days=42, seed=seed))
        inst = instance_from_config(circ, ALL_STATIONS)
        shares = []
        for L in budgets:
            sol = solve_exact(inst.with_lmax(L))
            shares.append(mean_daytime_share(daily_activity(sol, inst)) if sol.feasible else math.nan)
        has_day = any(m.is_day for ms in inst.mos.values() for m in ms)
        good = (all(a <= b for a, b in zip(shares, shares[1:])) and shares[0] == 0.0
                and (shares[-1] > 0 or not has_day))
        if not good:
            failures.append((seed, shares))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 600
    report(4, ok, f"10 seeds x L={list(budgets)}, {len(failures)} seeds break the trend", elapsed)
    assert ok, failures


def test_c5_decomposition():
    t0 = time.perf_counter()
    rng = random.Random(77)
    cases, bad = 0, []
    while cases < 60:
        inst = random_instance(rng, n_units=2, max_vars=14, max_mos=7, max_lmax=2)
        if len(inst.mos) != 2:
            continue
        cands = list(inst.catalog.day_candidates)
        y = tuple(rng.sample(cands, min(len(cands), inst.lmax_day, rng.randint(0, 2))))
        joint = brute_force_oracle(inst, y_day=y)
        parts = []
        for u in inst.units:
            p = UnitProblem.from_instance(inst, u)
            parts.append(p.solve(p.mask(y, inst.catalog.night_open)).objective)
        if any(o is None for o in parts):
            summed = None
        else:
            summed = (sum(o.night for o in parts), sum(o.total for o in parts))
        if (None if joint.objective is None else tuple(joint.objective)) != summed:
            bad.append(cases)
        cases += 1
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60
    report(5, ok, f"{cases} two-unit instances, {len(bad)} joint/sum mismatches", elapsed)
    assert ok, bad


def test_c6_infeasibility_certificate():
    t0 = time.perf_counter()
    mos = {"fine": unit_mos("fine", [("A", 2, 4), ("A", 22, 26), ("A", 44, 48), ("A", 66, 68)]),
           "gap": unit_mos("gap", [("A", 2, 4), ("A", 34, 36), ("A", 64, 66)])}
    inst = build_instance(mos, DEFAULT_TYPES, lmax_day=1, horizon_T=72)
    sol = solve_exact(inst)
    named = [c for c in sol.certificates if c.unit_id == "gap" and c.type_id == "1"]
    ok = (sol.status == "infeasible" and len(named) == 1 and check_certificate(inst, named[0])
          and all(c.unit_id == "gap" for c in detect_structural_infeasibility(inst)))
    elapsed = time.perf_counter() - t0
    cert = named[0].to_dict() if named else None
    report(6, ok and elapsed < 1, f"status {sol.status}, certificate {cert}", elapsed)
    assert ok and elapsed < 1


def test_c7_lp_cross_check(suite):
    t0 = time.perf_counter()
    set_mismatch, blend_mismatch, points = [], [], 0
    for n, inst in enumerate(suite):
        lp_ok, checker_ok, blended, lex = lp_point_check(inst)
        points += len(lp_ok)
        if not np.array_equal(lp_ok, checker_ok):
            set_mismatch.append(n)
            continue
        if not lp_ok.any():
            continue
        feas_lex = lex[checker_ok]
        lex_best = min(map(tuple, feas_lex))
        best = blended[lp_ok].min()
        winners = {tuple(w) for w in lex[lp_ok][np.isclose(blended[lp_ok], best, rtol=0, atol=1e-9)]}
        if winners != {lex_best} or lex_best != tuple(solve_exact(inst).objective):
            blend_mismatch.append(n)
    elapsed = time.perf_counter() - t0
    ok = not set_mismatch and not blend_mismatch and elapsed < 300
    report(7, ok, f"{len(suite)} instances, {points} 0/1 points, {len(set_mismatch)} feasible-set "
                  f"mismatches, {len(blend_mismatch)} blended/lexicographic mismatches", elapsed)
    assert ok, (set_mismatch[:10], blend_mismatch[:10])


def test_c8_horizon_consistency():
    t0 = time.perf_counter()
    circ = generate(GenParams(n_units=20, horizon_days=42, seed=0))
    opened = {}
    for tau in (7, 21, 42):
        inst = instance_from_config(truncate(circ, tau), ALL_STATIONS, 5)
        sol = solve_exact(inst)
        opened[tau] = set(sol.y_day)
        if tau == 42:
            hours = location_day_hours(sol, inst)
            top2 = sorted(hours, key=lambda l: (-hours[l], l))[:2]
    ok = all(set(top2) <= s for s in opened.values())
    elapsed = time.perf_counter() - t0
    detail = f"top-2 at tau=42 {top2}; opened " + "; ".join(
        f"tau={t}: {sorted(s)}" for t, s in opened.items())
    report(8, ok and elapsed < 300, detail, elapsed)
    assert ok and elapsed < 300


def test_c9_desk_scale(tmp_path):
    circ = generate(GenParams(n_units=20, horizon_days=42, seed=0))
    inst = instance_from_config(circ, ALL_STATIONS, 5)
    assert len(inst.catalog.day_candidates) == 14
    t0 = time.perf_counter()
    sol = solve_exact(inst)
    elapsed = time.perf_counter() - t0

    csv_path = tmp_path / "circ.csv"
    write_circulation_csv(circ, csv_path)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"locations": [{"id": s, "night_open": True} for s in DEFAULT_STATIONS]}))
    outputs = []
    for threads in (1, 8):
        out = tmp_path / f"t{threads}"
        code = cli_main(["solve", "--circulation", str(csv_path), "--config", str(cfg), "--lmax", "5",
                         "--threads", str(threads), "--out", str(out)])
        assert code == 0
        outputs.append((out / "solution.json").read_bytes())
    same = outputs[0] == outputs[1]
    ok = sol.feasible and elapsed < 60 and same
    report(9, ok, f"20 units, 42 days, 14 candidates, lmax=5: {sol.status} {tuple(sol.objective)} "
                  f"in {elapsed:.2f}s; JSON identical for 1 and 8 threads: {same}", elapsed)
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
