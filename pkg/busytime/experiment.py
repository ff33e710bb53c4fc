"""
Experiment runner: build the workload and fleet from a config, run every
configured algorithm, and assemble the comparison report.

EM variants run once per time weight in the sweep and report the mean busy
time and energy; the other algorithms run once. Every row is normalised
against the baseline row's energy.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from busytime.config import ExperimentConfig
from busytime.ingest import jobs_to_vms, load_trace, read_vm_csv, synthetic_workload
from busytime.model import HostSpec, VmRequest
from busytime.schedulers import Family, SchedulerConfig, run_scheduler
from busytime.timeline import total_busy_time, total_energy

log = logging.getLogger(__name__)

SECONDS_PER_HOUR = 3600.0
JOULES_PER_KWH = 3.6e6

CSV_COLUMNS = [
    "algorithm",
    "hosts",
    "vms_placed",
    "vms_rejected",
    "busy_time_hours",
    "energy_kwh",
    "normalized_energy",
    "saving_percent",
]
TABLE_COLUMNS = CSV_COLUMNS[:2] + ["hosts_used"] + CSV_COLUMNS[2:]


@dataclass(frozen=True)
class RunResult:
    """Outcome of one scheduler run."""

    algorithm: str
    w_time: Optional[float]
    busy_time_s: float
    energy_j: float
    placed: int
    rejected: int
    hosts_used: int
    pair_visits: int


@dataclass
class ReportRow:
    algorithm: str
    hosts: int
    vms_placed: int
    vms_rejected: int
    busy_time_hours: float
    energy_kwh: float
    normalized_energy: float = 1.0
    saving_percent: float = 0.0
    hosts_used: int = 0


@dataclass
class RunReport:
    rows: List[ReportRow] = field(default_factory=list)
    baseline: str = ""
    vms_total: int = 0
    hosts: int = 0

    def row(self, algorithm: str) -> ReportRow:
        for row in self.rows:
            if row.algorithm == algorithm:
                return row
        raise KeyError(algorithm)


# ── workload ─────────────────────────────────────────────────────────────────
def prepare_workload(config: ExperimentConfig) -> Tuple[List[VmRequest], List[HostSpec]]:
    """VMs from the trace (SWF or converted VM CSV) or a synthetic draw, plus the fleet."""
    hosts = config.fleet()
    if config.trace_path:
        if config.trace_path.lower().endswith(".csv"):
            if config.first_jobs is not None:
                log.warning("trace.first_jobs=%d ignored: %s is a converted VM file", config.first_jobs, config.trace_path)
            vms = read_vm_csv(config.trace_path)
        else:
            jobs = load_trace(config.trace_path, config.first_jobs)
            vms = jobs_to_vms(jobs, config.vm_catalog()).vms
    else:
        vms = synthetic_workload(config.workload_count, config.workload_horizon, config.seed, config.vm_catalog())
    log.info("workload: %d VMs on %d hosts", len(vms), len(hosts))
    return vms, hosts


# ── runs ─────────────────────────────────────────────────────────────────────
def evaluate(vms: Sequence[VmRequest], hosts: Sequence[HostSpec], scheduler: SchedulerConfig) -> RunResult:
    schedule = run_scheduler(vms, hosts, scheduler)
    result = RunResult(
        algorithm=scheduler.name,
        w_time=scheduler.weights.time if scheduler.family is Family.EM else None,
        busy_time_s=total_busy_time(schedule, hosts),
        energy_j=total_energy(schedule, hosts),
        placed=len(schedule.assignments),
        rejected=len(schedule.rejected),
        hosts_used=schedule.hosts_used,
        pair_visits=schedule.stats.pair_visits,
    )
    log.info(
        "%s%s: busy %.2f h, energy %.2f kWh, %d placed, %d rejected",
        result.algorithm,
        "" if result.w_time is None else f" (w_time={result.w_time:g})",
        result.busy_time_s / SECONDS_PER_HOUR,
        result.energy_j / JOULES_PER_KWH,
        result.placed,
        result.rejected,
    )
    return result


def _expand(config: ExperimentConfig) -> List[SchedulerConfig]:
    """One scheduler config per run: EM variants once per sweep value."""
    runs = []
    for scheduler in config.scheduler_configs():
        if scheduler.family is Family.EM:
            for w_time in config.sweep:
                runs.append(scheduler.model_copy(update={"weights": scheduler.weights.with_time(w_time)}))
        else:
            runs.append(scheduler)
    return runs


def _execute(vms: List[VmRequest], hosts: List[HostSpec], runs: List[SchedulerConfig], workers: int) -> List[RunResult]:
    if workers <= 1 or len(runs) <= 1:
        return [evaluate(vms, hosts, run) for run in runs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, [vms] * len(runs), [hosts] * len(runs), runs))


def normalize(energy: float, baseline_energy: float) -> float:
    if baseline_energy > 0:
        return energy / baseline_energy
    return 1.0 if energy == 0 else math.inf


def _row(name: str, results: Sequence[RunResult], fleet_size: int) -> ReportRow:
    worst = max(results, key=lambda r: r.rejected)
    return ReportRow(
        algorithm=name,
        hosts=fleet_size,
        vms_placed=worst.placed,
        vms_rejected=worst.rejected,
        busy_time_hours=math.fsum(r.busy_time_s for r in results) / len(results) / SECONDS_PER_HOUR,
        energy_kwh=math.fsum(r.energy_j for r in results) / len(results) / JOULES_PER_KWH,
        hosts_used=worst.hosts_used,
    )


def run_experiment(
    config: ExperimentConfig,
    vms: Optional[Sequence[VmRequest]] = None,
    hosts: Optional[Sequence[HostSpec]] = None,
) -> RunReport:
    """Run every configured algorithm and build the normalised report.

    vms and hosts default to the workload and fleet described by the config.
    """
    if vms is None or hosts is None:
        built_vms, built_hosts = prepare_workload(config)
        vms = built_vms if vms is None else vms
        hosts = built_hosts if hosts is None else hosts
    vms, hosts = list(vms), list(hosts)

    runs = _expand(config)
    results = _execute(vms, hosts, runs, config.workers)

    report = RunReport(baseline=config.baseline_name(), vms_total=len(vms), hosts=len(hosts))
    detail: List[ReportRow] = []
    for name in [s.name for s in config.scheduler_configs()]:
        mine = [r for r in results if r.algorithm == name]
        report.rows.append(_row(name, mine, len(hosts)))
        if config.sweep_detail and mine[0].w_time is not None:
            detail.extend(_row(f"{name}@w={r.w_time:g}", [r], len(hosts)) for r in mine)
    report.rows.extend(detail)

    base_energy = report.row(report.baseline).energy_kwh
    for row in report.rows:
        row.normalized_energy = normalize(row.energy_kwh, base_energy)
        row.saving_percent = (1.0 - row.normalized_energy) * 100.0
    return report


# ── formatting ───────────────────────────────────────────────────────────────
def report_frame(report: RunReport, columns: Sequence[str] = CSV_COLUMNS) -> pd.DataFrame:
    return pd.DataFrame([asdict(row) for row in report.rows], columns=list(columns))


def format_report(report: RunReport, fmt: str = "csv") -> str:
    """Render the report as csv (full precision), json (array of row objects) or a text table."""
    if fmt == "csv":
        return report_frame(report).to_csv(index=False, lineterminator="\n")
    if fmt == "json":
        rows = [{k: getattr(row, k) for k in CSV_COLUMNS} for row in report.rows]
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "table":
        frame = report_frame(report, TABLE_COLUMNS)
        frame["busy_time_hours"] = frame["busy_time_hours"].map(lambda v: f"{v:.2f}")
        frame["energy_kwh"] = frame["energy_kwh"].map(lambda v: f"{v:.2f}")
        frame["normalized_energy"] = frame["normalized_energy"].map(lambda v: f"{v:.2f}")
        frame["saving_percent"] = frame["saving_percent"].map(lambda v: f"{v:.0f}%")
        return frame.to_string(index=False) + "\n"
    raise ValueError(f"unknown report format '{fmt}'")


def compare_algorithms(config: ExperimentConfig, fmt: Optional[str] = None) -> str:
    return format_report(run_experiment(config), fmt or config.output_format)
