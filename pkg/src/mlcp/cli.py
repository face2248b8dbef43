"""Command-line interface: ``mlcp <subcommand> ...``.

Exit codes: 0 success, 1 validation failure, 2 I/O or format error,
3 infeasible model.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from .circulation import (CirculationFormatError, extract_mos, read_circulation_csv, truncate,
                          validate_circulation, write_circulation_csv, write_mos_csv)
from .instance import EpsilonBoundWarning, InstanceConfig, InstanceError, instance_from_config
from .lpexport import build_lp, write_lp, write_map_json
from .metrics import consistency, scenario_report, write_locations_csv, write_share_csv
from .solver import brute_force_oracle, solve_exact, solve_greedy
from .solver.oracle import OracleSizeError
from .solver.search import resolve_threads
from .syngen import GenParams, generate

log = logging.getLogger("mlcp")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_INFEASIBLE = 0, 1, 2, 3


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _load_config(args) -> InstanceConfig:
    cfg = InstanceConfig.load(args.config) if getattr(args, "config", None) else InstanceConfig()
    if getattr(args, "include_boundaries", None) is not None:
        cfg.include_boundary_mos = args.include_boundaries
    if getattr(args, "guard_initial", None) is not None:
        cfg.guard_initial_constraint = args.guard_initial
    if getattr(args, "classification", None) is not None:
        cfg.classification = args.classification
    return cfg


def _load_circulation(args, cfg: InstanceConfig | None = None):
    horizon = None
    if cfg is not None and cfg.horizon_hours is not None:
        horizon = int(round(cfg.horizon_hours * 60))
    circ = read_circulation_csv(args.circulation, horizon)
    if getattr(args, "tau", None):
        circ = truncate(circ, args.tau)
    return circ


def _check_valid(circ) -> bool:
    problems = validate_circulation(circ)
    for v in problems:
        print(v, file=sys.stderr)
    return not problems


def _out_dir(args) -> Path | None:
    if not getattr(args, "out", None):
        return None
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _solve(inst, solver: str, threads: int):
    if solver == "exact":
        return solve_exact(inst, n_threads=threads)
    if solver == "greedy":
        return solve_greedy(inst, n_threads=threads)
    return brute_force_oracle(inst)


# ------------------------------------------------------------------ commands

def cmd_validate(args) -> int:
    circ = _load_circulation(args)
    problems = validate_circulation(circ)
    for v in problems:
        print(v)
    if problems:
        return EXIT_INVALID
    print(f"ok: {len(circ.rosters)} units, {sum(len(r.trips) for r in circ.rosters)} trips")
    return EXIT_OK


def cmd_extract(args) -> int:
    cfg = _load_config(args)
    circ = _load_circulation(args, cfg)
    if not _check_valid(circ):
        return EXIT_INVALID
    mos = extract_mos(circ, cfg.delta_day, cfg.delta_night, cfg.include_boundary_mos,
                      cfg.classification)
    out = _out_dir(args)
    write_mos_csv(mos, out / "mos.csv" if out else sys.stdout)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    circ = _load_circulation(args, cfg)
    if not _check_valid(circ):
        return EXIT_INVALID
    inst = instance_from_config(circ, cfg, args.lmax)
    sol = _solve(inst, args.solver, resolve_threads(args.threads))
    out = _out_dir(args)
    text = sol.to_json(inst)
    if out:
        (out / "solution.json").write_text(text, encoding="utf-8")
        report = scenario_report(sol, inst, scenario=Path(args.circulation).stem)
        write_share_csv([report], out / "share.csv")
        if sol.feasible:
            write_locations_csv(consistency([report]), out / "locations.csv")
    else:
        sys.stdout.write(text)
    if not sol.feasible:
        for c in sol.certificates:
            print(f"infeasible: {json.dumps(c.to_dict())}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_export_lp(args) -> int:
    cfg = _load_config(args)
    circ = _load_circulation(args, cfg)
    if not _check_valid(circ):
        return EXIT_INVALID
    inst = instance_from_config(circ, cfg, args.lmax)
    model = build_lp(inst)
    out = _out_dir(args)
    if out:
        write_lp(model, out / "model.lp")
        write_map_json(model, out / "model.map.json")
    else:
        sys.stdout.write(write_lp(model))
    return EXIT_OK


def cmd_gen(args) -> int:
    params = GenParams.load(args.params) if args.params else GenParams()
    if args.seed is not None:
        params.seed = args.seed
    circ = generate(params)
    out = _out_dir(args)
    write_circulation_csv(circ, out / "circulation.csv" if out else sys.stdout)
    return EXIT_OK


def _scenarios(sweep: dict, base: Path, default_seed: int | None):
    """Yield (name, circulation) per scenario index."""
    if "circulations" in sweep:
        for path in sweep["circulations"]:
            p = Path(path)
            if not p.is_absolute():
                p = base / p
            yield p.stem, read_circulation_csv(p)
        return
    gen = GenParams.from_dict(sweep.get("gen", {}))
    seeds = sweep.get("seeds") or [gen.seed if default_seed is None else default_seed]
    for seed in seeds:
        gen.seed = int(seed)
        yield f"seed{seed}", generate(gen)


def cmd_experiment(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        sweep = json.load(fh)
    base = Path(args.config).resolve().parent
    inst_spec = sweep.get("instance", {})
    if isinstance(inst_spec, str):
        cfg = InstanceConfig.load(base / inst_spec)
    else:
        cfg = InstanceConfig.from_dict(inst_spec)
    if args.include_boundaries is not None:
        cfg.include_boundary_mos = args.include_boundaries
    if args.guard_initial is not None:
        cfg.guard_initial_constraint = args.guard_initial
    if args.classification is not None:
        cfg.classification = args.classification
    lmaxes = sweep.get("lmax") or [cfg.lmax_day]
    taus = sweep.get("tau") or [None]
    nus = sweep.get("units") or [None]
    solver = sweep.get("solver", args.solver)
    threads = resolve_threads(args.threads)

    reports = []
    for beta, circ in _scenarios(sweep, base, args.seed):
        if not _check_valid(circ):
            return EXIT_INVALID
        for nu in nus:
            sub = circ if nu is None else circ.subset(sorted(circ.unit_ids)[:int(nu)])
            for tau in taus:
                cell = sub if tau is None else truncate(sub, int(tau))
                for lmax in lmaxes:
                    inst = instance_from_config(cell, cfg, int(lmax))
                    sol = _solve(inst, solver, threads)
                    name = f"{beta};nu={'all' if nu is None else nu};tau={'full' if tau is None else tau}"
                    reports.append(scenario_report(sol, inst, name))
                    log.info("%s lmax=%s: %s", name, lmax, sol.status)

    out = _out_dir(args) or Path(".")
    write_share_csv(reports, out / "share.csv")
    summary = {}
    lines = ["lmax,location,scenarios_open,mean_day_hours"]
    for lmax in lmaxes:
        group = [r for r in reports if r.lmax == int(lmax) and r.status != "infeasible"]
        if not group:
            continue
        cons = consistency(group)
        summary[str(lmax)] = {"scenarios": cons.n_scenarios, "opened": cons.opened,
                              "mean_day_hours": {k: round(v, 6) for k, v in cons.mean_day_hours.items()}}
        for loc in cons.opened:
            lines.append(f"{lmax},{loc},{cons.opened[loc]},{cons.mean_day_hours[loc]:.6f}")
    (out / "locations.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "consistency.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    n_bad = sum(r.status == "infeasible" for r in reports)
    print(f"{len(reports)} cells, {n_bad} infeasible -> {out}")
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlcp", description="Maintenance location choice")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, circulation=True, config=True):
        if circulation:
            p.add_argument("--circulation", required=True, help="circulation CSV")
        if config:
            p.add_argument("--config", help="instance config JSON")
            p.add_argument("--include-boundaries", type=_bool, default=None)
            p.add_argument("--guard-initial", type=_bool, default=None)
            p.add_argument("--classification", choices=("prose", "formula"), default=None)
        p.add_argument("--tau", type=int, help="truncate the horizon to this many days")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("validate", help="check a circulation CSV")
    p.add_argument("--circulation", required=True)
    p.add_argument("--tau", type=int)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("extract-mos", help="write the maintenance opportunities")
    common(p)
    p.set_defaults(func=cmd_extract)

    for name, func, help_ in (("solve", cmd_solve, "choose locations and schedule maintenance"),
                              ("export-lp", cmd_export_lp, "write the model in LP format")):
        p = sub.add_parser(name, help=help_)
        common(p)
        p.add_argument("--lmax", type=int, default=None, help="daytime location budget")
        if name == "solve":
            p.add_argument("--solver", choices=("exact", "greedy", "oracle"), default="exact")
            p.add_argument("--threads", type=int, default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("gen", help="generate a synthetic circulation")
    p.add_argument("--params", help="generator parameters JSON")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("experiment", help="run a parameter sweep")
    p.add_argument("--config", required=True, help="experiment JSON")
    p.add_argument("--solver", choices=("exact", "greedy", "oracle"), default="exact")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="output directory")
    p.add_argument("--include-boundaries", type=_bool, default=None)
    p.add_argument("--guard-initial", type=_bool, default=None)
    p.add_argument("--classification", choices=("prose", "formula"), default=None)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore", EpsilonBoundWarning)
    try:
        return args.func(args)
    except (OSError, CirculationFormatError, json.JSONDecodeError, InstanceError,
            OracleSizeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
