"""
Executable checks of the energy/busy-time equivalence on homogeneous fleets.

For random instances, every configured allocator is run and its schedule is
checked for:
  * decomposition: sweep-integrated energy == p_idle * sum(T_j) + sum(e_i)
  * mapping independence: sum(e_i) equal across schedules placing the same VMs
  * ordering: busy-time order and energy order agree between those schedules
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Tuple

from busytime.config import ExperimentConfig
from busytime.errors import HeterogeneousFleet, InputDataError
from busytime.ingest import synthetic_workload
from busytime.model import REL_TOL, HostSpec
from busytime.schedulers import audit_schedule, run_scheduler
from busytime.timeline import energy_decomposition, total_busy_time, total_energy

log = logging.getLogger(__name__)


@dataclass
class VerificationReport:
    instances: int = 0
    schedules: int = 0
    max_relative_error: float = 0.0
    mapping_violations: int = 0
    ordering_violations: int = 0
    infeasible_schedules: int = 0
    compared_pairs: int = 0
    skipped_pairs: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.max_relative_error <= REL_TOL
            and self.mapping_violations == 0
            and self.ordering_violations == 0
            and self.infeasible_schedules == 0
        )

    def summary(self) -> str:
        return "\n".join(
            [
                f"instances: {self.instances}",
                f"schedules checked: {self.schedules}",
                f"max relative error: {self.max_relative_error:.3e}",
                f"mapping-independence violations: {self.mapping_violations}",
                f"ordering violations: {self.ordering_violations}",
                f"infeasible schedules: {self.infeasible_schedules}",
                f"pairs compared / skipped: {self.compared_pairs} / {self.skipped_pairs}",
            ]
        )


def relative_error(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _same(a: float, b: float) -> bool:
    return relative_error(a, b) <= REL_TOL


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def ordering_agrees(busy_a: float, busy_b: float, energy_a: float, energy_b: float) -> bool:
    """Equal busy time iff equal energy, otherwise the same strict order."""
    if _same(busy_a, busy_b) or _same(energy_a, energy_b):
        return _same(busy_a, busy_b) and _same(energy_a, energy_b)
    return _sign(busy_a - busy_b) == _sign(energy_a - energy_b)


def require_homogeneous(hosts: List[HostSpec]) -> None:
    models = {h.power for h in hosts}
    if len(models) > 1:
        raise HeterogeneousFleet(f"verification needs one power model, fleet has {len(models)}")


def verify_theorems(config: ExperimentConfig) -> VerificationReport:
    """Run the decomposition, mapping-independence and ordering checks over seeded instances."""
    hosts = config.fleet()
    require_homogeneous(hosts)
    report = VerificationReport()
    if config.verify_instances == 0:
        return report
    if not hosts:
        raise InputDataError("verification needs at least one host")

    template = hosts[0]
    catalog = tuple(
        t for t in config.vm_catalog()
        if t.per_core_mips <= template.per_core_mips and t.demand().fits_within(template.capacity)
    )
    if not catalog:
        raise InputDataError(f"no VM type fits host type {template.kind or template.id}")

    schedulers = config.scheduler_configs()
    for i in range(config.verify_instances):
        seed = config.seed * 1_000_003 + i
        n = 1 + (seed % config.verify_max_vms)
        vms = synthetic_workload(n, config.verify_horizon, seed, catalog)
        report.instances += 1

        outcomes: List[Tuple[str, frozenset, float, float, float]] = []
        for scheduler in schedulers:
            schedule = run_scheduler(vms, hosts, scheduler)
            report.schedules += 1
            if audit_schedule(schedule, hosts):
                report.infeasible_schedules += 1
                report.failures.append(f"instance {i}: {scheduler.name} produced an infeasible schedule")
                continue
            energy = total_energy(schedule, hosts)
            busy = total_busy_time(schedule, hosts)
            idle_term, vm_term = energy_decomposition(schedule, hosts)
            err = relative_error(energy, idle_term + vm_term)
            report.max_relative_error = max(report.max_relative_error, err)
            outcomes.append((scheduler.name, frozenset(schedule.assignments), busy, energy, vm_term))

        for (name_a, placed_a, busy_a, energy_a, vm_a), (name_b, placed_b, busy_b, energy_b, vm_b) in combinations(outcomes, 2):
            if placed_a != placed_b:
                report.skipped_pairs += 1
                continue
            report.compared_pairs += 1
            if not _same(vm_a, vm_b):
                report.mapping_violations += 1
                report.failures.append(f"instance {i}: VM energy differs between {name_a} and {name_b}")
            if not ordering_agrees(busy_a, busy_b, energy_a, energy_b):
                report.ordering_violations += 1
                report.failures.append(f"instance {i}: busy-time and energy order disagree for {name_a} vs {name_b}")

    log.info(
        "verified %d instance(s): max rel error %.3e, %d ordering violation(s)",
        report.instances,
        report.max_relative_error,
        report.ordering_violations,
    )
    return report
