"""Command-line front end.

Subcommands mirror the pipeline stages: link-budget, leakage, adoption,
deploy, simulate, sweep-guard, compliance.  A JSON config file
(--config) can pre-load any ScenarioConfig / CellConfig field; explicit
flags win.  All commands exit nonzero on error.
"""

import argparse
import dataclasses
import json
import sys

from .adoption import BASELINE_MODEL, scale_scenario, gompertz, scenario_penetration
from .airlink import CellConfig
from .deployment import build_snapshot, ingest_counties, load_bundled_counties
from .filterbank import edge_psd_margin, leaked_psd_dbm_per_mhz
from .linkbudget import build_link_budget, load_sensor_catalog
from .reports import emit_guard_sweep, emit_leakage_table, emit_report, emit_rows
from .scenario import (
    CANONICAL_YEARS,
    ScenarioConfig,
    leakage_table,
    simulate,
    sweep_guard_bands,
)


def _load_config_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return payload


def _build_configs(args, overrides):
    payload = _load_config_file(args.config) if getattr(args, "config", None) else {}
    scen_kwargs = dict(payload.get("scenario", {}))
    cell_kwargs = dict(payload.get("cell", {}))
    for key, value in overrides.items():
        if value is not None:
            scen_kwargs[key] = value
    if getattr(args, "seed", None) is not None:
        scen_kwargs["seed"] = args.seed
    if "sensor_ids" in scen_kwargs:
        scen_kwargs["sensor_ids"] = tuple(scen_kwargs["sensor_ids"])
    cfg = ScenarioConfig(**scen_kwargs)
    cell_kwargs.setdefault("bandwidth_hz", cfg.bandwidth_hz)
    cell = CellConfig(**cell_kwargs)
    return cfg, cell


def _counties(args):
    if getattr(args, "counties", None):
        if not getattr(args, "gazetteer", None):
            raise ValueError("--counties requires --gazetteer")
        result = ingest_counties(args.counties, args.gazetteer)
    else:
        result = load_bundled_counties()
    for diag in result.rejected:
        print(f"warning: line {diag.line}: {diag.reason}", file=sys.stderr)
    return result.records


def _cmd_link_budget(args):
    catalog = load_sensor_catalog(args.catalog)
    if args.sensor not in catalog:
        raise KeyError(f"unknown sensor {args.sensor!r}; have {sorted(catalog)}")
    budget = build_link_budget(catalog[args.sensor], g_tx_db=args.g_tx,
                               f_ghz=args.freq)
    print(json.dumps(budget.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_leakage(args):
    orders = [int(x) for x in args.orders.split(",")]
    guards = [float(x) for x in args.guards.split(",")]
    sensors = tuple(args.sensors.split(","))
    rows = leakage_table(orders=orders, guards_mhz=guards, sensor_ids=sensors,
                         ripple_db=args.ripple)
    if args.out_dir:
        paths = emit_leakage_table(rows, args.out_dir,
                                   header={"ripple_db": args.ripple})
        print(json.dumps(paths, indent=2, sort_keys=True))
    else:
        for row in rows:
            print(f"{row['sensor_id']},{row['order']},{row['guard_mhz']:.1f},"
                  f"{row['delta']:.6e},{row['delta_db']:.4f}")
    return 0


def _cmd_adoption(args):
    factor = args.scenario / 100.0
    model = scale_scenario(BASELINE_MODEL, factor)
    out = {
        "year": args.year,
        "factor": factor,
        "penetration_per_100": scenario_penetration(args.year, factor),
        "curve_per_100": gompertz(model, args.year),
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_deploy(args):
    cfg, _ = _build_configs(args, {
        "year": args.year,
        "adoption_factor": args.scenario / 100.0 if args.scenario is not None else None,
        "guard_mhz": args.guard,
        "rate_bps": args.rate,
    })
    records = _counties(args)
    snapshot = build_snapshot(records, cfg.year, cfg.adoption_factor,
                              args.rate if args.rate is not None else cfg.max_demand_bps,
                              cfg.eta_bps_per_hz, cfg.bandwidth_hz)
    by_fips = {r.fips: r for r in records}
    rows = [
        {
            "fips": fips,
            "name": by_fips[fips].name,
            "state": by_fips[fips].state,
            "population": by_fips[fips].population,
            "land_area_km2": by_fips[fips].land_area_km2,
            "n_bs": count,
        }
        for fips, count in snapshot.counts.items()
    ]
    header = {
        "year": snapshot.year,
        "adoption_factor": snapshot.adoption_factor,
        "penetration_per_100": snapshot.penetration_per_100,
        "rate_bps": snapshot.rate_bps,
        "eta_bps_per_hz": snapshot.eta_bps_per_hz,
        "bandwidth_hz": snapshot.bandwidth_hz,
    }
    if args.out_dir:
        paths = emit_rows(rows, ["fips", "name", "state", "population",
                                 "land_area_km2", "n_bs"],
                          args.out_dir, "deployment", header=header)
        print(json.dumps(paths, indent=2, sort_keys=True))
    else:
        print(json.dumps({"config": header, "rows": rows}, indent=2, sort_keys=True))
    return 0


def _cmd_simulate(args):
    cfg, cell = _build_configs(args, {
        "year": args.year,
        "adoption_factor": args.scenario / 100.0 if args.scenario is not None else None,
        "guard_mhz": args.guard,
        "rate_bps": args.rate,
        "trials": args.trials,
    })
    records = _counties(args)
    report = simulate(cfg, cell=cell, counties=records, n_jobs=args.jobs)
    if args.out_dir:
        paths = emit_report(report, args.out_dir)
        print(json.dumps(paths, indent=2, sort_keys=True))
    else:
        payload = {"config": report.config,
                   "worst_sensor": report.worst_sensor_id,
                   "rows": [dataclasses.asdict(r) for r in report.rows]}
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    return 0


def _cmd_sweep_guard(args):
    cfg, cell = _build_configs(args, {"trials": args.trials})
    years = [int(y) for y in args.years.split(",")]
    lo, hi, step = (float(x) for x in args.guards.split(":"))
    guards = []
    g = lo
    while g <= hi + 1e-9:
        guards.append(round(g, 6))
        g += step
    records = _counties(args)
    rows = sweep_guard_bands(cfg, years=years, guards_mhz=guards, cell=cell,
                             counties=records, n_jobs=args.jobs)
    header = cfg.header(cell)
    header.pop("year", None)
    header.pop("rate_bps", None)
    if args.out_dir:
        paths = emit_guard_sweep(rows, args.out_dir, header=header)
        print(json.dumps(paths, indent=2, sort_keys=True))
    else:
        for row in rows:
            print(f"{row.year},{row.guard_mhz:.1f},{row.max_rate_mbps}")
    return 0


def _cmd_compliance(args):
    cfg, _ = _build_configs(args, {"guard_mhz": args.guard})
    spec = cfg.filter_spec
    if args.order is not None:
        spec = dataclasses.replace(spec, order=args.order)
    eval_f = args.eval_freq if args.eval_freq is not None else 7.1245
    psd = leaked_psd_dbm_per_mhz(spec, args.ptx, eval_f)
    margin = edge_psd_margin(spec, args.ptx, eval_f, limit_dbm_mhz=args.limit)
    out = {
        "p_tx_dbw": args.ptx,
        "guard_mhz": cfg.guard_mhz,
        "order": spec.order,
        "eval_freq_ghz": eval_f,
        "leaked_psd_dbm_per_mhz": psd,
        "limit_dbm_per_mhz": args.limit,
        "margin_db": margin,
        "compliant": margin >= 0,
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0 if margin >= 0 else 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eesscoex",
        description="Aggregate adjacent-band RFI from 7.125-7.4 GHz deployments "
                    "onto passive EESS radiometers",
    )
    parser.add_argument("--config", help="JSON file with 'scenario'/'cell' sections")
    parser.add_argument("--seed", type=int, help="master Monte Carlo seed")
    parser.add_argument("--out-dir", help="directory for CSV/JSON outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("link-budget", help="per-sensor propagation budget")
    p.add_argument("--sensor", required=True)
    p.add_argument("--freq", type=float, default=6.925, help="GHz")
    p.add_argument("--g-tx", type=float, default=-10.0, help="BS gain toward sensor, dB")
    p.add_argument("--catalog", help="alternate sensor catalog JSON")
    p.set_defaults(func=_cmd_link_budget)

    p = sub.add_parser("leakage", help="leakage fractions per order/guard/sensor")
    p.add_argument("--orders", default="3,5,7,9")
    p.add_argument("--guards", default="0,5,10,15,20,25,30,35,40,45,50")
    p.add_argument("--sensors", default="B1,B3,B4,B5,B7")
    p.add_argument("--ripple", type=float, default=0.2)
    p.set_defaults(func=_cmd_leakage)

    p = sub.add_parser("adoption", help="penetration for a year and growth scenario")
    p.add_argument("--scenario", type=float, default=100.0, help="percent of baseline b3")
    p.add_argument("--year", type=int, required=True)
    p.set_defaults(func=_cmd_adoption)

    p = sub.add_parser("deploy", help="per-county BS counts")
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--rate", type=float, help="sizing rate per user, bps")
    p.add_argument("--scenario", type=float, help="percent of baseline b3")
    p.add_argument("--guard", type=float, help="guard band, MHz")
    p.add_argument("--counties", help="county CSV (fips,name,state,rucc_code,population)")
    p.add_argument("--gazetteer", help="land-area CSV (fips,land_area_km2)")
    p.set_defaults(func=_cmd_deploy)

    p = sub.add_parser("simulate", help="aggregate RFI per sensor")
    p.add_argument("--year", type=int)
    p.add_argument("--rate", type=float, help="user rate, bps")
    p.add_argument("--scenario", type=float, help="percent of baseline b3")
    p.add_argument("--guard", type=float, help="guard band, MHz")
    p.add_argument("--trials", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--counties")
    p.add_argument("--gazetteer")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep-guard", help="max feasible rate per (year, guard)")
    p.add_argument("--years", default=",".join(str(y) for y in CANONICAL_YEARS))
    p.add_argument("--guards", default="0:50:5", help="lo:hi:step in MHz")
    p.add_argument("--trials", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--counties")
    p.add_argument("--gazetteer")
    p.set_defaults(func=_cmd_sweep_guard)

    p = sub.add_parser("compliance", help="emission-mask margin at the band edge")
    p.add_argument("--ptx", type=float, default=-5.0, help="total transmit power, dBW")
    p.add_argument("--guard", type=float, default=25.0)
    p.add_argument("--order", type=int)
    p.add_argument("--eval-freq", type=float, help="GHz; default 7.1245")
    p.add_argument("--limit", type=float, default=-13.0, help="dBm/MHz")
    p.set_defaults(func=_cmd_compliance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
