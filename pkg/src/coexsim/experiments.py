"""Scenario builders and sweep runner for the four coexistence experiments.

Each built-in scenario fixes the testbed defaults and sweeps one axis family:

- duty:  LTE duty cycle 0..100% x LTE power x WiFi MCS
- power: LTE power x WiFi power x WiFi MCS at 50% duty
- prb:   LTE occupied bandwidth x LTE power x CCA profile x WiFi MCS
- freq:  LTE center-frequency offset x LTE power x WiFi MCS

Every run's seed derives from (master seed, canonical config, rep), so sweeps
are byte-reproducible and each grid point is independent of the others.
Normalization divides by the duty-0 run sharing all non-LTE parameters and
the same rep index, which makes duty-0 rows exactly 1.0.
"""

from __future__ import annotations

import dataclasses
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

from .config import RunConfig, canonical_for_seed, derive_seed, serialize_config
from .metrics import RunMetrics, box_stats, throughput_mbps
from .simulation import Simulation

CSV_METRIC_COLUMNS = ("throughput_mbps", "normalized", "wifi_airtime_frac",
                      "lte_airtime_frac", "attempts", "failures", "drops")


class SweepError(Exception):
    """A run inside a sweep aborted; the message names the grid point."""


def set_path(cfg: RunConfig, path: str, value) -> RunConfig:
    """Return a copy of cfg with the dotted ``section.field`` replaced.

    Values are coerced to the field's declared type so that e.g. a grid value
    of 0 lands in a float field as 0.0 (keeping canonical texts stable).
    """
    try:
        section_name, field_name = path.split(".")
        section = getattr(cfg, section_name)
    except (ValueError, AttributeError) as exc:
        raise SweepError(f"swept path {path!r} does not resolve to a config field") from exc
    declared = {f.name: str(f.type) for f in fields(section)}
    if field_name not in declared:
        raise SweepError(f"swept path {path!r} does not resolve to a config field")
    t = declared[field_name]
    if t.startswith("float"):
        value = float(value)
    elif t.startswith("int"):
        value = int(value)
    elif t.startswith("str"):
        value = str(value)
    section = dataclasses.replace(section, **{field_name: value})
    return dataclasses.replace(cfg, **{section_name: section})


@dataclass
class Scenario:
    """A named sweep: a fixed base config plus (path, value grid) axes."""

    name: str
    base: RunConfig
    axes: list[tuple[str, list]]
    reps: int = 5
    duration_s: float = 10.0

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise SweepError("reps must be >= 1")
        for path, values in self.axes:
            if not values:
                raise SweepError(f"axis {path!r} has an empty grid")
            set_path(self.base, path, values[0])  # raises if unresolvable

    def override_grid(self, path: str, values: list) -> None:
        """Replace an axis's grid (or add a new axis) for this scenario."""
        if not values:
            raise SweepError(f"axis {path!r} has an empty grid")
        set_path(self.base, path, values[0])
        for i, (existing, _) in enumerate(self.axes):
            if existing == path:
                self.axes[i] = (path, list(values))
                return
        self.axes.append((path, list(values)))

    def axis_names_list(self) -> list[str]:
        return [path for path, _ in self.axes]

    def points(self) -> list[tuple]:
        return list(itertools.product(*(values for _, values in self.axes)))

    def config_for(self, point: tuple) -> RunConfig:
        cfg = dataclasses.replace(self.base, duration_s=self.duration_s)
        for (path, _), value in zip(self.axes, point):
            cfg = set_path(cfg, path, value)
        return cfg


def exp_duty_cycle() -> Scenario:
    """Duty sweep at fixed 17 dBm WiFi, 100 PRB, zero offset."""
    return Scenario("duty", RunConfig(), [
        ("lte.duty", [round(0.1 * i, 1) for i in range(11)]),
        ("lte.tx_power_dbm", [-16.0, -6.0, -1.0, 12.0]),
        ("wifi.mcs_mbps", [6, 54]),
    ])


def exp_tx_power() -> Scenario:
    """Power sweep at 50% duty: both transmitters' powers and the WiFi MCS."""
    return Scenario("power", RunConfig(), [
        ("lte.tx_power_dbm", [-16.0, -11.0, -6.0, -1.0, 4.0, 12.0]),
        ("wifi.tx_power_dbm", [8.0, 17.0]),
        ("wifi.mcs_mbps", [6, 54]),
    ])


def exp_prb_sweep() -> Scenario:
    """Occupied-bandwidth sweep at 50% duty, under both vendor CCA profiles."""
    return Scenario("prb", RunConfig(), [
        ("lte.n_prb", [6, 15, 25, 50, 75, 100]),
        ("lte.tx_power_dbm", [-16.0, -1.0, 12.0]),
        ("wifi.cca_profile", ["vendor-A", "vendor-B"]),
        ("wifi.mcs_mbps", [6, 54]),
    ])


def exp_center_freq() -> Scenario:
    """Center-frequency offset sweep at 50% duty, 100 PRB."""
    return Scenario("freq", RunConfig(), [
        ("lte.center_offset_mhz", [float(x) for x in range(-20, 25, 5)]),
        ("lte.tx_power_dbm", [-16.0, -1.0, 12.0]),
        ("wifi.mcs_mbps", [6, 54]),
    ])


SCENARIOS = {"duty": exp_duty_cycle, "power": exp_tx_power,
             "prb": exp_prb_sweep, "freq": exp_center_freq}


def _execute(payload: tuple[RunConfig, int]) -> RunMetrics:
    cfg, seed = payload
    return Simulation(cfg, seed=seed).run()


@dataclass
class SweepResult:
    scenario: str
    axis_names: list[str]
    rows: list[dict] = field(default_factory=list)

    def header(self) -> list[str]:
        return ["scenario", *self.axis_names, "rep", "seed", *CSV_METRIC_COLUMNS]

    def to_csv_text(self) -> str:
        lines = [",".join(self.header())]
        for row in self.rows:
            cells = [row["scenario"], *[row[a] for a in self.axis_names],
                     str(row["rep"]), str(row["seed"])]
            for col in CSV_METRIC_COLUMNS:
                value = row[col]
                cells.append(f"{value:.6f}" if isinstance(value, float) else str(value))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def summary_csv_text(self) -> str:
        """Per-grid-point box statistics over the repetitions."""
        header = ["scenario", *self.axis_names, "n"]
        for prefix in ("thr", "norm"):
            header += [f"{prefix}_{s}" for s in
                       ("median", "q25", "q75", "whisker_lo", "whisker_hi", "outliers")]
        lines = [",".join(header)]
        for _, group in itertools.groupby(
                self.rows, key=lambda r: tuple(r[a] for a in self.axis_names)):
            group = list(group)
            cells = [group[0]["scenario"], *[group[0][a] for a in self.axis_names],
                     str(len(group))]
            for col in ("throughput_mbps", "normalized"):
                stats = box_stats([r[col] for r in group])
                cells += [f"{stats.median:.6f}", f"{stats.q25:.6f}", f"{stats.q75:.6f}",
                          f"{stats.whisker_lo:.6f}", f"{stats.whisker_hi:.6f}",
                          str(len(stats.outliers))]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def run_sweep(scenario: Scenario, master_seed: int, jobs: int = 1) -> SweepResult:
    """Execute reps x grid runs plus duty-0 baselines; deterministic output.

    Baseline runs are de-duplicated by canonical config, so grid points that
    differ only in LTE parameters share one baseline per rep.
    """
    points = scenario.points()
    plan: list[tuple[str, RunConfig, int, str]] = []  # key, cfg, seed, label
    seen: set[str] = set()
    row_keys: list[tuple[tuple, int, str, str, int]] = []

    def plan_run(cfg: RunConfig, rep: int, label: str) -> tuple[str, int]:
        key = f"{rep}|{serialize_config(canonical_for_seed(cfg))}"
        seed = derive_seed(master_seed, cfg, rep)
        if key not in seen:
            seen.add(key)
            plan.append((key, cfg, seed, label))
        return key, seed

    for point in points:
        cfg = scenario.config_for(point)
        baseline_cfg = set_path(cfg, "lte.duty", 0.0)
        for rep in range(scenario.reps):
            label = f"{dict(zip(scenario.axis_names_list(), point))} rep {rep}"
            run_key, run_seed = plan_run(cfg, rep, label)
            base_key, _ = plan_run(baseline_cfg, rep, f"baseline for {label}")
            row_keys.append((point, rep, run_key, base_key, run_seed))

    results: dict[str, RunMetrics] = {}
    if jobs > 1 and len(plan) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_execute, (cfg, seed)) for _, cfg, seed, _ in plan]
            for (key, _, _, label), future in zip(plan, futures):
                try:
                    results[key] = future.result()
                except Exception as exc:
                    raise SweepError(f"run failed at {label}: {exc}") from exc
    else:
        for key, cfg, seed, label in plan:
            try:
                results[key] = _execute((cfg, seed))
            except Exception as exc:
                raise SweepError(f"run failed at {label}: {exc}") from exc

    result = SweepResult(scenario.name, scenario.axis_names_list())
    for point, rep, run_key, base_key, run_seed in row_keys:
        metrics = results[run_key]
        baseline = results[base_key]
        thr = throughput_mbps(metrics)
        base_thr = throughput_mbps(baseline)
        result.rows.append({
            "scenario": scenario.name,
            **{axis: _fmt(value) for axis, value in zip(scenario.axis_names_list(), point)},
            "rep": rep,
            "seed": run_seed,
            "throughput_mbps": thr,
            "normalized": thr / base_thr,
            "wifi_airtime_frac": metrics.wifi_airtime_ns / metrics.duration_ns,
            "lte_airtime_frac": metrics.lte_airtime_ns / metrics.duration_ns,
            "attempts": metrics.attempts,
            "failures": metrics.failures,
            "drops": metrics.drops,
        })
    return result
