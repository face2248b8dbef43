"""Certificates for units that cannot be maintained even with every location open."""
from __future__ import annotations

import math

from ..instance import MlcpInstance
from .dp import UnitProblem
from .model import InfeasibilityCertificate

__all__ = ["detect_structural_infeasibility", "check_certificate"]

_TOL = 1e-9


def detect_structural_infeasibility(instance: MlcpInstance, evaluator=None) -> list[InfeasibilityCertificate]:
    """One certificate per failing (unit, type) with all daytime candidates open.

    Each type is first checked on its own; if all pass but the unit still
    fails (types compete for MO capacity), a single certificate with
    ``type_id=None`` is emitted for the unit.
    """
    cands = instance.catalog.day_candidates
    night_open = instance.catalog.night_open
    certs: list[InfeasibilityCertificate] = []
    for unit in instance.units:
        if evaluator is not None:
            p = evaluator.problems[unit]
            joint = evaluator.unit_results(cands)[unit]
        else:
            p = UnitProblem.from_instance(instance, unit)
            joint = p.solve(p.mask(cands, night_open))
        if joint.feasible:
            continue
        mask = p.mask(cands, night_open)
        found = False
        for k, t in enumerate(instance.types):
            window = _broken_window(p, mask, k)
            if window is None:
                continue
            certs.append(InfeasibilityCertificate(unit, t.id, window[0] / 60, window[1] / 60))
            found = True
        if not found:
            deadlines, last_ends = joint.witness
            k = min(range(len(deadlines)), key=lambda i: (deadlines[i], i))
            certs.append(InfeasibilityCertificate(unit, None, last_ends[k] / 60, deadlines[k] / 60))
    return certs


def _broken_window(p: UnitProblem, mask, k: int):
    """Window (minutes) after the furthest reachable type-k activity with no follow-up.

    ``None`` when type k alone can be scheduled.  Reachable MOs are those that
    can hold a type-k activity at the end of a valid chain from the start.
    """
    first_deadline = p.initial[k]
    if math.isinf(first_deadline):
        return None
    o, T = p.interval[k], p.horizon
    capable = [mask[q] and p.ends[q] - p.starts[q] >= p.dur[k] for q in range(len(p.mos))]
    reached_end = -math.inf
    reachable = False
    for q in range(len(p.mos)):
        if not capable[q]:
            continue
        s = p.starts[q]
        # MOs are time ordered, so the latest reachable end so far decides
        if s <= first_deadline or (reachable and reached_end < s <= reached_end + o):
            reachable = True
            reached_end = p.ends[q]
            if reached_end + o > T:
                return None
    if not reachable:
        return (-math.inf, first_deadline)
    return (reached_end, reached_end + o)


def check_certificate(instance: MlcpInstance, cert: InfeasibilityCertificate) -> bool:
    """Re-derive the certificate from the instance alone.

    For a typed certificate: no MO of the unit that is usable with every
    candidate open and long enough for the type starts inside
    ``(window_start, window_end]``, and the deadline is an active one.  For a
    capacity certificate the unit's all-open problem must be infeasible.
    """
    if cert.unit_id not in instance.mos:
        return False
    cands = set(instance.catalog.day_candidates)
    night_open = instance.catalog.night_open
    mos = instance.mos[cert.unit_id]
    if cert.type_id is None:
        p = UnitProblem.from_instance(instance, cert.unit_id)
        return not p.solve(p.mask(cands, night_open)).feasible
    types = {t.id: t for t in instance.types}
    if cert.type_id not in types:
        return False
    t = types[cert.type_id]
    if math.isinf(cert.window_start):
        if not instance.initial_applies(cert.unit_id, t):
            return False
        expected = instance.b_hours(cert.unit_id, t.id) + t.interval_o
    else:
        expected = cert.window_start + t.interval_o
        if expected > instance.horizon_T + _TOL:
            return False
    if abs(expected - cert.window_end) > 1e-6:
        return False
    for mo in mos:
        usable = (mo.location in cands) if mo.is_day else night_open.get(mo.location, False)
        if not usable or mo.length_min < t.duration_min:
            continue
        if cert.window_start + _TOL < mo.start <= cert.window_end + _TOL:
            return False
    return True
