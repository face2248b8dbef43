"""Export of the MLCP as a binary program in CPLEX LP text format.

The objective is the blended form ``sum x (1 - d) + epsilon * sum x``.  Fixed
nighttime availability is folded into variable bounds, so only daytime MOs at
candidate locations get an availability row.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .instance import MlcpInstance

__all__ = ["LpRow", "LpModel", "build_lp", "write_lp", "read_lp", "variable_map", "format_coef"]

_NAME_BAD = re.compile(r"[^A-Za-z0-9_.]")


def _clean(name: str) -> str:
    return _NAME_BAD.sub("_", str(name))


def format_coef(value: float) -> str:
    text = f"{abs(value):.6f}".rstrip("0").rstrip(".")
    return text or "0"


@dataclass
class LpRow:
    name: str
    terms: dict[str, float]
    sense: str  # "<=", ">=" or "="
    rhs: float


@dataclass
class LpModel:
    objective: dict[str, float] = field(default_factory=dict)
    rows: list[LpRow] = field(default_factory=list)
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    binaries: list[str] = field(default_factory=list)
    x_vars: dict[str, tuple[str, int, str]] = field(default_factory=dict)
    y_vars: dict[str, str] = field(default_factory=dict)

    def check(self) -> None:
        declared = set(self.binaries)
        names = [r.name for r in self.rows]
        if len(names) != len(set(names)):
            raise ValueError("duplicate row names")
        if len(declared) != len(self.binaries):
            raise ValueError("duplicate variable names")
        for r in self.rows:
            missing = set(r.terms) - declared
            if missing:
                raise ValueError(f"row {r.name} uses undeclared {sorted(missing)}")
        if set(self.objective) - declared or set(self.bounds) - declared:
            raise ValueError("objective or bounds use undeclared variables")

    def is_feasible(self, values: dict[str, int], tol: float = 1e-9) -> bool:
        for name, (lo, hi) in self.bounds.items():
            if not lo - tol <= values.get(name, 0) <= hi + tol:
                return False
        for r in self.rows:
            lhs = sum(c * values.get(v, 0) for v, c in r.terms.items())
            if r.sense == "<=" and lhs > r.rhs + tol:
                return False
            if r.sense == ">=" and lhs < r.rhs - tol:
                return False
            if r.sense == "=" and abs(lhs - r.rhs) > tol:
                return False
        return True

    def objective_value(self, values: dict[str, int]) -> float:
        return sum(c * values.get(v, 0) for v, c in self.objective.items())


def build_lp(instance: MlcpInstance) -> LpModel:
    m = LpModel()
    T = instance.horizon_min
    night_open = instance.catalog.night_open
    cands = set(instance.catalog.day_candidates)
    units = instance.units
    uname = {u: _clean(u) for u in units}
    tname = {t.id: _clean(t.id) for t in instance.types}

    def x(u, j, k):
        return f"x_{uname[u]}_{j}_{tname[k]}"

    for u in units:
        for j, mo in enumerate(instance.mos[u], start=1):
            for t in instance.types:
                name = x(u, j, t.id)
                m.x_vars[name] = (u, j, t.id)
                m.binaries.append(name)
                m.objective[name] = (0.0 if mo.is_day else 1.0) + instance.epsilon
    for loc in sorted(cands):
        name = f"yD_{_clean(loc)}"
        m.y_vars[name] = loc
        m.binaries.append(name)

    for u in units:
        mos = instance.mos[u]
        for t in instance.types:
            if instance.initial_applies(u, t):
                V0 = instance.successors.V0[(u, t.id)] if instance.successors else ()
                m.rows.append(LpRow(f"init_{uname[u]}_{tname[t.id]}",
                                    {x(u, p, t.id): 1.0 for p in V0}, ">=", 1.0))
        for j, mo in enumerate(mos, start=1):
            for t in instance.types:
                if mo.end_min + t.interval_min <= T:
                    terms = {x(u, j, t.id): 1.0}
                    for p in instance.successors.V[(u, j, t.id)]:
                        terms[x(u, p, t.id)] = terms.get(x(u, p, t.id), 0.0) - 1.0
                    m.rows.append(LpRow(f"chain_{uname[u]}_{j}_{tname[t.id]}", terms, "<=", 0.0))
        for j, mo in enumerate(mos, start=1):
            for t in instance.types:
                name = x(u, j, t.id)
                if mo.is_day and mo.location in cands:
                    m.rows.append(LpRow(f"avail_{uname[u]}_{j}_{tname[t.id]}",
                                        {name: 1.0, f"yD_{_clean(mo.location)}": -1.0}, "<=", 0.0))
                else:
                    open_ = night_open.get(mo.location, False) if not mo.is_day else False
                    m.bounds[name] = (0.0, 1.0 if open_ else 0.0)
            m.rows.append(LpRow(f"cap_{uname[u]}_{j}",
                                {x(u, j, t.id): t.duration_v for t in instance.types},
                                "<=", (mo.end_min - mo.start_min) / 60))
    if m.y_vars:
        m.rows.append(LpRow("budget", {n: 1.0 for n in m.y_vars}, "<=", float(instance.lmax_day)))
    m.check()
    return m


def _term_parts(terms: dict[str, float]) -> list[str]:
    parts = []
    for name in sorted(terms):
        c = terms[name]
        parts.append(f"{'-' if c < 0 else '+'} {format_coef(c)} {name}")
    if parts and parts[0].startswith("+ "):
        parts[0] = parts[0][2:]
    return parts


def _wrap(prefix: str, parts: list[str], width: int = 78) -> list[str]:
    lines, cur = [], prefix
    for chunk in parts:
        if len(cur) + 1 + len(chunk) > width and cur.strip() != prefix.strip():
            lines.append(cur)
            cur = "   " + chunk
        else:
            cur = f"{cur} {chunk}"
    lines.append(cur)
    return lines


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def write_lp(model: LpModel, sink=None) -> str:
    """Serialize deterministically; returns the text and writes it to ``sink`` if given."""
    out = ["\\ Maintenance location choice model", "Minimize"]
    obj = {v: c for v, c in model.objective.items() if c != 0}
    out += _wrap(" obj:", _term_parts(obj) if obj else ["0 zero_"])
    out.append("Subject To")
    needs_zero = not obj
    for r in model.rows:
        terms = {v: c for v, c in r.terms.items() if c != 0}
        if terms:
            body = _term_parts(terms)
        else:
            body, needs_zero = ["0 zero_"], True
        rhs = ("-" if r.rhs < 0 else "") + format_coef(r.rhs)
        out += _wrap(f" {r.name}:", body + [f"{r.sense} {rhs}"])
    if model.bounds or needs_zero:
        out.append("Bounds")
        for name in sorted(model.bounds):
            lo, hi = model.bounds[name]
            if lo == hi:
                out.append(f" {name} = {format_coef(lo)}")
            else:
                out.append(f" {format_coef(lo)} <= {name} <= {format_coef(hi)}")
        if needs_zero:
            out.append(" zero_ = 0")
    out.append("Binaries")
    for name in sorted(model.binaries):
        out.append(f" {name}")
    out.append("End")
    text = "\n".join(out) + "\n"
    if sink is not None:
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    return text


def variable_map(model: LpModel) -> dict:
    return {
        "x": {name: {"unit": u, "j": j, "k": k} for name, (u, j, k) in sorted(model.x_vars.items())},
        "yD": {name: loc for name, loc in sorted(model.y_vars.items())},
    }


def write_map_json(model: LpModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(variable_map(model), fh, indent=2)
        fh.write("\n")


def _parse_terms(text: str) -> dict[str, float]:
    terms: dict[str, float] = {}
    tokens = text.split()
    sign, coef = 1.0, None
    for tok in tokens:
        if tok in ("+", "-"):
            sign = -1.0 if tok == "-" else 1.0
        elif _is_number(tok):
            coef = float(tok)
        else:
            terms[tok] = terms.get(tok, 0.0) + sign * (1.0 if coef is None else coef)
            sign, coef = 1.0, None
    return terms


def read_lp(source) -> LpModel:
    """Parse the subset of the LP format produced by :func:`write_lp`."""
    if hasattr(source, "read"):
        text = source.read()
    elif "\n" in str(source):
        text = str(source)
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    sections: dict[str, list[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].rstrip()
        if not line.strip():
            continue
        head = line.strip().lower()
        if head in ("minimize", "subject to", "bounds", "binaries", "end"):
            current = head
            sections.setdefault(current, [])
            continue
        if line.startswith("   ") and sections.get(current):
            sections[current][-1] += " " + line.strip()
        else:
            sections[current].append(line.strip())

    m = LpModel()
    for line in sections.get("minimize", []):
        _, body = line.split(":", 1)
        m.objective = {v: c for v, c in _parse_terms(body).items() if v != "zero_"}
    for line in sections.get("subject to", []):
        name, body = line.split(":", 1)
        match = re.search(r"(<=|>=|=)\s*(-?[0-9.eE+]+)\s*$", body)
        sense, rhs = match.group(1), float(match.group(2))
        terms = {v: c for v, c in _parse_terms(body[:match.start()]).items() if v != "zero_"}
        m.rows.append(LpRow(name.strip(), terms, sense, rhs))
    for line in sections.get("bounds", []):
        parts = line.split()
        if len(parts) == 3 and parts[1] == "=":
            if parts[0] != "zero_":
                m.bounds[parts[0]] = (float(parts[2]), float(parts[2]))
        elif len(parts) == 5:
            m.bounds[parts[2]] = (float(parts[0]), float(parts[4]))
    m.binaries = list(sections.get("binaries", []))
    for name in m.binaries:
        if name.startswith("yD_"):
            m.y_vars[name] = name[3:]
    return m
