"""Command-line entry point: single runs, the four sweeps, and the DCF oracle check.

Exit codes: 0 success, 2 configuration error, 3 runtime abort.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .config import ConfigError, RunConfig, parse_config
from .engine import SchedulingError
from .experiments import SCENARIOS, SweepError, run_sweep, set_path
from .metrics import throughput_mbps
from .simulation import Simulation
from .wifi import MCS_RATES, analytic_goodput_mbps

RUN_CSV_HEADER = ("scenario,rep,seed,throughput_mbps,normalized,"
                  "wifi_airtime_frac,lte_airtime_frac,attempts,failures,drops")


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return parse_config(handle.read())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _parse_grid_value(token: str):
    token = token.strip()
    for cast in (int, float):
        try:
            return cast(token)
        except ValueError:
            continue
    return token


def _resolve_axis_path(path: str) -> str:
    if "." in path:
        return path
    matches = []
    for section_name in ("lte", "wifi", "radio"):
        section = getattr(RunConfig(), section_name)
        if path in {f.name for f in dataclasses.fields(section)}:
            matches.append(f"{section_name}.{path}")
    if len(matches) != 1:
        raise ConfigError(f"grid path {path!r} is {'ambiguous' if matches else 'unknown'}; "
                          f"use section.field")
    return matches[0]


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.duration is not None:
        cfg = dataclasses.replace(cfg, duration_s=args.duration)
    sim = Simulation(cfg, trace=args.trace is not None)
    metrics = sim.run()
    row = ",".join([
        "run", "0", str(cfg.seed),
        f"{throughput_mbps(metrics):.6f}", "",
        f"{metrics.wifi_airtime_ns / metrics.duration_ns:.6f}",
        f"{metrics.lte_airtime_ns / metrics.duration_ns:.6f}",
        str(metrics.attempts), str(metrics.failures), str(metrics.drops),
    ])
    _write(args.out, RUN_CSV_HEADER + "\n" + row + "\n")
    if args.trace is not None:
        _write(args.trace, "\n".join(sim.engine.trace_lines()) + "\n")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    builder = SCENARIOS.get(args.scenario)
    if builder is None:
        raise ConfigError(f"unknown scenario {args.scenario!r}; "
                          f"built-ins: {', '.join(sorted(SCENARIOS))}")
    scenario = builder()
    if args.config is not None:
        scenario.base = _load_config(args.config)
    if args.reps is not None:
        scenario.reps = args.reps
    if args.duration is not None:
        scenario.duration_s = args.duration
    for item in args.grid or []:
        if "=" not in item:
            raise ConfigError(f"--grid expects key=v1,v2,... got {item!r}")
        path, _, values = item.partition("=")
        resolved = _resolve_axis_path(path.strip())
        scenario.override_grid(resolved,
                               [_parse_grid_value(v) for v in values.split(",")])
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    result = run_sweep(scenario, args.seed, jobs=jobs)
    out = args.out or f"{scenario.name}_sweep.csv"
    _write(out, result.to_csv_text())
    summary = args.summary or (out if out == "-" else _summary_path(out))
    _write(summary, result.summary_csv_text())
    if out != "-":
        print(f"wrote {len(result.rows)} rows to {out} (summary: {summary})")
    return 0


def _summary_path(out: str) -> str:
    stem, dot, ext = out.rpartition(".")
    return f"{stem}.summary.{ext}" if dot else f"{out}.summary"


def cmd_baseline(args: argparse.Namespace) -> int:
    rates = MCS_RATES if args.mcs == "all" else tuple(
        int(tok) for tok in args.mcs.split(","))
    base = RunConfig()
    for rate in rates:
        if rate not in MCS_RATES:
            raise ConfigError(f"mcs must be one of {MCS_RATES}, got {rate}")
    print(f"{'mcs_mbps':>8} {'analytic_mbps':>14} {'simulated_mbps':>15} {'rel_err':>9}")
    worst = 0.0
    for rate in rates:
        analytic = analytic_goodput_mbps(rate, base.wifi.payload_bytes,
                                         base.wifi.dcf_params())
        cfg = dataclasses.replace(
            base,
            duration_s=args.duration,
            lte=dataclasses.replace(base.lte, duty=0.0),
            wifi=dataclasses.replace(base.wifi, mcs_mbps=rate))
        simulated = throughput_mbps(Simulation(cfg, seed=args.seed).run())
        rel_err = abs(simulated - analytic) / analytic
        worst = max(worst, rel_err)
        print(f"{rate:>8} {analytic:>14.4f} {simulated:>15.4f} {rel_err:>9.4%}")
    print(f"worst relative error: {worst:.4%}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coexsim",
        description="Duty-cycled unlicensed-LTE / 802.11 DCF coexistence simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="single simulation, one CSV row")
    run_p.add_argument("--config", help="configuration file (defaults: testbed)")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--duration", type=float, help="override run duration (s)")
    run_p.add_argument("--out", help="output path (default: stdout)")
    run_p.add_argument("--trace", help="write the event trace to this file")
    run_p.set_defaults(fn=cmd_run)

    sweep_p = sub.add_parser("sweep", help="run a named experiment sweep")
    sweep_p.add_argument("scenario", help="duty | power | prb | freq")
    sweep_p.add_argument("--config", help="base configuration file")
    sweep_p.add_argument("--seed", type=int, default=1, help="master seed (default 1)")
    sweep_p.add_argument("--reps", type=int, help="repetitions per grid point")
    sweep_p.add_argument("--duration", type=float, help="seconds per run")
    sweep_p.add_argument("--out", help="CSV output path (default <scenario>_sweep.csv)")
    sweep_p.add_argument("--summary", help="box-stats CSV path")
    sweep_p.add_argument("--jobs", type=int, help="parallel runs (default: cores)")
    sweep_p.add_argument("--grid", action="append", metavar="KEY=V1,V2,...",
                         help="override an axis grid, e.g. --grid duty=0,0.5,1")
    sweep_p.set_defaults(fn=cmd_sweep)

    base_p = sub.add_parser("baseline",
                            help="analytic vs simulated duty-0 DCF goodput")
    base_p.add_argument("--mcs", default="all", help="'all' or comma list, e.g. 6,54")
    base_p.add_argument("--duration", type=float, default=10.0)
    base_p.add_argument("--seed", type=int, default=1)
    base_p.set_defaults(fn=cmd_baseline)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SweepError, SchedulingError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
