"""MLCP instances: maintenance types, location catalog, budget and successor sets."""
from __future__ import annotations

import bisect
import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .circulation import MaintenanceOpportunity, parse_clock

__all__ = [
    "InstanceError",
    "EpsilonBoundWarning",
    "MaintenanceType",
    "LocationCatalog",
    "SuccessorSets",
    "MlcpInstance",
    "InstanceConfig",
    "DEFAULT_TYPES",
    "successor_set",
    "initial_set",
    "build_instance",
    "instance_from_config",
]


class InstanceError(ValueError):
    pass


class EpsilonBoundWarning(UserWarning):
    """epsilon times the number of possible activities reaches 1."""


@dataclass(frozen=True)
class MaintenanceType:
    id: str
    duration_v: float
    interval_o: float

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        if not self.duration_v > 0 or not self.interval_o > 0:
            raise InstanceError(f"type {self.id}: duration and interval must be > 0")

    @property
    def duration_min(self) -> float:
        return self.duration_v * 60

    @property
    def interval_min(self) -> float:
        return self.interval_o * 60


DEFAULT_TYPES = (MaintenanceType("1", 0.5, 24.0), MaintenanceType("2", 1.0, 48.0))


@dataclass(frozen=True)
class LocationCatalog:
    locations: tuple[str, ...]
    night_open: Mapping[str, bool]
    day_candidates: tuple[str, ...]

    def __post_init__(self):
        locs = tuple(sorted(set(self.locations)))
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "day_candidates", tuple(sorted(set(self.day_candidates))))
        object.__setattr__(self, "night_open", {l: bool(self.night_open.get(l, False)) for l in locs})
        extra = set(self.day_candidates) - set(locs)
        if extra:
            raise InstanceError(f"day candidates not in catalog: {sorted(extra)}")

    @classmethod
    def open_all(cls, locations: Iterable[str]) -> "LocationCatalog":
        """Every location open at night and eligible for daytime opening."""
        locs = tuple(locations)
        return cls(locs, {l: True for l in locs}, locs)


def successor_set(unit_mos: Sequence[MaintenanceOpportunity], j: int, o_k: float) -> tuple[int, ...]:
    """Indices p with ``e_j < s_p <= e_j + o_k`` (j is 1-based, o_k in hours)."""
    if not 1 <= j <= len(unit_mos):
        raise IndexError(f"MO index {j} outside 1..{len(unit_mos)}")
    starts = [mo.start_min for mo in unit_mos]
    e = unit_mos[j - 1].end_min
    lo = bisect.bisect_right(starts, e)
    hi = bisect.bisect_right(starts, e + o_k * 60)
    return tuple(range(lo + 1, hi + 1))


def initial_set(unit_mos: Sequence[MaintenanceOpportunity], o_k: float, b_ik: float) -> tuple[int, ...]:
    """Indices p with ``s_p <= o_k + b_ik`` (hours)."""
    if b_ik < 0:
        raise ValueError("b_ik must be >= 0")
    starts = [mo.start_min for mo in unit_mos]
    hi = bisect.bisect_right(starts, (o_k + b_ik) * 60)
    return tuple(range(1, hi + 1))


@dataclass(frozen=True)
class SuccessorSets:
    V: Mapping[tuple[str, int, str], tuple[int, ...]]
    V0: Mapping[tuple[str, str], tuple[int, ...]]


@dataclass(frozen=True)
class MlcpInstance:
    mos: Mapping[str, tuple[MaintenanceOpportunity, ...]]
    types: tuple[MaintenanceType, ...]
    catalog: LocationCatalog
    lmax_day: int
    b: Mapping[tuple[str, str], float]
    horizon_min: int
    delta_D: float = 7.0
    delta_N: float = 19.0
    epsilon: float = 0.001
    guard_initial: bool = True
    successors: SuccessorSets | None = field(default=None, compare=False, repr=False)

    @property
    def units(self) -> list[str]:
        return sorted(self.mos)

    @property
    def horizon_T(self) -> float:
        return self.horizon_min / 60

    @property
    def effective_lmax(self) -> int:
        return min(self.lmax_day, len(self.catalog.day_candidates))

    def b_hours(self, unit: str, type_id: str) -> float:
        return float(self.b.get((unit, type_id), 0.0))

    def initial_applies(self, unit: str, t: MaintenanceType) -> bool:
        """Whether the initial-interval requirement is imposed for (unit, type)."""
        if not self.guard_initial:
            return True
        return (self.b_hours(unit, t.id) + t.interval_o) * 60 <= self.horizon_min

    def n_activity_slots(self) -> int:
        return sum(len(m) for m in self.mos.values()) * len(self.types)

    def with_lmax(self, lmax: int) -> "MlcpInstance":
        return _replace(self, lmax_day=int(lmax))


def _replace(inst: MlcpInstance, **changes) -> MlcpInstance:
    from dataclasses import replace
    return replace(inst, **changes)


def _check_unit_mos(unit: str, mos: Sequence[MaintenanceOpportunity]) -> None:
    for pos, mo in enumerate(mos, start=1):
        if mo.index_j != pos:
            raise InstanceError(f"unit {unit}: MO indices must run 1..n, found {mo.index_j} at {pos}")
        if mo.start_min >= mo.end_min:
            raise InstanceError(f"unit {unit}: MO {pos} has non-positive length")
        if pos > 1 and mos[pos - 2].end_min >= mo.start_min:
            # extracted MOs are always separated by a trip of positive length
            raise InstanceError(f"unit {unit}: MO {pos} does not start after MO {pos - 1} ends")


def build_instance(mos: Mapping[str, Sequence[MaintenanceOpportunity]],
                   types: Sequence[MaintenanceType] = DEFAULT_TYPES,
                   catalog: LocationCatalog | None = None,
                   lmax_day: int = 0,
                   b: Mapping[tuple[str, str], float] | None = None,
                   horizon_T: float | None = None,
                   deltas: tuple[float, float] = (7.0, 19.0),
                   epsilon: float = 0.001,
                   guard_initial: bool = True,
                   *, horizon_min: int | None = None) -> MlcpInstance:
    """Assemble a validated instance with materialized successor sets.

    ``catalog=None`` opens every visited location at night and makes all of
    them daytime candidates.  Missing ``b`` entries default to 0.
    """
    if horizon_min is None:
        if horizon_T is None:
            raise InstanceError("horizon is required")
        horizon_min = int(round(horizon_T * 60))
    if horizon_min <= 0:
        raise InstanceError("horizon must be positive")
    if lmax_day < 0:
        raise InstanceError("lmax_day must be >= 0")
    if not epsilon > 0:
        raise InstanceError("epsilon must be > 0")
    types = tuple(sorted(types, key=lambda t: t.id))
    if len({t.id for t in types}) != len(types):
        raise InstanceError("duplicate maintenance type ids")

    frozen = {str(u): tuple(ms) for u, ms in mos.items()}
    for u, ms in frozen.items():
        _check_unit_mos(u, ms)
    visited = sorted({mo.location for ms in frozen.values() for mo in ms})
    if catalog is None:
        catalog = LocationCatalog.open_all(visited)
    known = set(catalog.locations)
    for u in sorted(frozen):
        for mo in frozen[u]:
            if mo.location not in known:
                raise InstanceError(f"MO {u}/{mo.index_j} at unknown location {mo.location!r}")

    bb = {}
    for (u, k), hours in (b or {}).items():
        if hours < 0:
            raise InstanceError(f"b[{u},{k}] must be >= 0")
        bb[(str(u), str(k))] = float(hours)

    V, V0 = {}, {}
    for u in sorted(frozen):
        ms = frozen[u]
        for t in types:
            V0[(u, t.id)] = initial_set(ms, t.interval_o, bb.get((u, t.id), 0.0))
            for j in range(1, len(ms) + 1):
                V[(u, j, t.id)] = successor_set(ms, j, t.interval_o)

    inst = MlcpInstance(frozen, types, catalog, int(lmax_day), bb, int(horizon_min),
                        deltas[0], deltas[1], float(epsilon), bool(guard_initial),
                        SuccessorSets(V, V0))
    if epsilon * inst.n_activity_slots() >= 1:
        warnings.warn(f"epsilon={epsilon} times {inst.n_activity_slots()} possible activities "
                      "is >= 1; the blended objective may disagree with the lexicographic one",
                      EpsilonBoundWarning, stacklevel=2)
    return inst


# ------------------------------------------------------------------ config JSON

def _hours_of_day(value) -> float:
    if isinstance(value, str):
        return parse_clock(value) / 60
    return float(value)


@dataclass
class InstanceConfig:
    types: tuple[MaintenanceType, ...] = DEFAULT_TYPES
    locations: dict[str, bool] | None = None
    day_candidates: list[str] | None = None
    lmax_day: int = 0
    b: dict[tuple[str, str], float] = field(default_factory=dict)
    delta_day: float = 7.0
    delta_night: float = 19.0
    epsilon: float = 0.001
    include_boundary_mos: bool = True
    guard_initial_constraint: bool = True
    classification: str = "prose"
    horizon_hours: float | None = None

    @classmethod
    def from_dict(cls, data: Mapping) -> "InstanceConfig":
        cfg = cls()
        if "types" in data:
            cfg.types = tuple(MaintenanceType(t["id"], float(t["duration_hours"]),
                                              float(t["interval_hours"])) for t in data["types"])
        if "locations" in data and data["locations"] is not None:
            cfg.locations = {str(l["id"]): bool(l.get("night_open", True)) for l in data["locations"]}
        if data.get("day_candidates") is not None:
            cfg.day_candidates = [str(l) for l in data["day_candidates"]]
        cfg.lmax_day = int(data.get("lmax_day", cfg.lmax_day))
        for key, hours in (data.get("b") or {}).items():
            unit, _, k = str(key).rpartition(":")
            if not unit:
                raise InstanceError(f"b key {key!r} must look like 'unit:type'")
            cfg.b[(unit, k)] = float(hours)
        cfg.delta_day = _hours_of_day(data.get("delta_day", cfg.delta_day))
        cfg.delta_night = _hours_of_day(data.get("delta_night", cfg.delta_night))
        cfg.epsilon = float(data.get("epsilon", cfg.epsilon))
        cfg.include_boundary_mos = bool(data.get("include_boundary_mos", cfg.include_boundary_mos))
        cfg.guard_initial_constraint = bool(data.get("guard_initial_constraint",
                                                     cfg.guard_initial_constraint))
        cfg.classification = data.get("classification", cfg.classification)
        if data.get("horizon_hours") is not None:
            cfg.horizon_hours = float(data["horizon_hours"])
        return cfg

    @classmethod
    def load(cls, path) -> "InstanceConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def catalog_for(self, visited: Iterable[str]) -> LocationCatalog:
        visited = sorted(set(visited))
        if self.locations is None:
            night = {l: True for l in visited}
        else:
            night = dict(self.locations)
        locs = tuple(night)
        cands = tuple(self.day_candidates) if self.day_candidates is not None else locs
        return LocationCatalog(locs, night, cands)


def instance_from_config(circ, cfg: InstanceConfig, lmax: int | None = None) -> MlcpInstance:
    """Extract MOs from a circulation and build the instance described by ``cfg``."""
    from .circulation import extract_mos

    mos = extract_mos(circ, cfg.delta_day, cfg.delta_night,
                      include_boundaries=cfg.include_boundary_mos,
                      classification=cfg.classification)
    visited = {mo.location for ms in mos.values() for mo in ms}
    return build_instance(mos, cfg.types, cfg.catalog_for(visited),
                          cfg.lmax_day if lmax is None else lmax, cfg.b,
                          deltas=(cfg.delta_day, cfg.delta_night), epsilon=cfg.epsilon,
                          guard_initial=cfg.guard_initial_constraint,
                          horizon_min=circ.horizon_min)
