"""
List-scheduling allocators for fixed-interval VMs.

Every allocator walks a sorted VM list once and places each VM on one host
for its whole window, or rejects it. EM and MinDFT only consider hosts that
already run something and fall back to opening the most power-efficient idle
host; PABFD and BFD-ST rank used and idle hosts together by power increase.
Ties always go to the lowest host id.
"""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from busytime.errors import UnknownAlgorithm
from busytime.metrics import UtilizationMode, WeightConfig, ret_metric
from busytime.model import (
    RESOURCE_KINDS,
    HostSpec,
    ResourceVector,
    Schedule,
    SchedulingStats,
    VmRequest,
    perf_per_watt,
)
from busytime.timeline import HostState, check_host, host_states

log = logging.getLogger(__name__)


class SortPolicy(str, Enum):
    ST = "ST"          # earliest start first, then earliest finish
    LFT = "LFT"        # latest finish first
    LDTF = "LDTF"      # longest duration first
    EFT = "EFT"        # earliest finish first, then earliest start
    CPU = "CPU"        # aggregate MIPS demand, decreasing


_SORT_KEYS: Dict[SortPolicy, Callable[[VmRequest], object]] = {
    SortPolicy.ST: lambda vm: (vm.start, vm.end),
    SortPolicy.LFT: lambda vm: -vm.end,
    SortPolicy.LDTF: lambda vm: -vm.duration,
    SortPolicy.EFT: lambda vm: (vm.end, vm.start),
    SortPolicy.CPU: lambda vm: -vm.mips,
}


class Family(str, Enum):
    EM = "EM"
    MINDFT = "MinDFT"
    PABFD = "PABFD"
    BFD_ST = "BFD-ST"


DEFAULT_ALGORITHMS: Tuple[str, ...] = (
    "PABFD",
    "BFD-ST",
    "MinDFT-ST",
    "MinDFT-LFT",
    "MinDFT-LDTF",
    "EM-ST",
    "EM-LFT",
    "EM-LDTF",
)

_LIST_POLICIES = (SortPolicy.ST, SortPolicy.LFT, SortPolicy.LDTF, SortPolicy.EFT)


class SchedulerConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    family: Family
    sort_policy: SortPolicy
    weights: Optional[WeightConfig] = None
    utilization_mode: UtilizationMode = UtilizationMode.LITERAL
    opening_cost: bool = True

    @model_validator(mode="after")
    def _check_family(self) -> "SchedulerConfig":
        if self.family is Family.EM and self.weights is None:
            raise ValueError("EM needs a weight configuration")
        if self.family is Family.PABFD and self.sort_policy is not SortPolicy.CPU:
            raise ValueError("PABFD always sorts by CPU demand")
        if self.family is Family.BFD_ST and self.sort_policy is not SortPolicy.ST:
            raise ValueError("BFD-ST always sorts by start time")
        if self.family in (Family.EM, Family.MINDFT) and self.sort_policy not in _LIST_POLICIES:
            raise ValueError(f"{self.family.value} supports {[p.value for p in _LIST_POLICIES]}")
        return self

    @property
    def name(self) -> str:
        if self.family in (Family.PABFD, Family.BFD_ST):
            return self.family.value
        return f"{self.family.value}-{self.sort_policy.value}"

    @classmethod
    def from_name(
        cls,
        name: str,
        weights: Optional[WeightConfig] = None,
        utilization_mode: UtilizationMode = UtilizationMode.LITERAL,
        opening_cost: bool = True,
    ) -> "SchedulerConfig":
        """Parse an algorithm name such as 'EM-LDTF', 'MinDFT-ST', 'PABFD' or 'BFD-ST'."""
        label = name.strip()
        if label.upper() == "PABFD":
            return cls(family=Family.PABFD, sort_policy=SortPolicy.CPU, opening_cost=opening_cost)
        if label.upper() == "BFD-ST":
            return cls(family=Family.BFD_ST, sort_policy=SortPolicy.ST, opening_cost=opening_cost)
        head, _, tail = label.partition("-")
        family = {"EM": Family.EM, "MINDFT": Family.MINDFT}.get(head.upper())
        try:
            policy = SortPolicy(tail.upper())
        except ValueError:
            policy = None
        if family is None or policy not in _LIST_POLICIES:
            raise UnknownAlgorithm(name)
        return cls(
            family=family,
            sort_policy=policy,
            weights=(weights or WeightConfig()) if family is Family.EM else weights,
            utilization_mode=utilization_mode,
            opening_cost=opening_cost,
        )


# ── building blocks ──────────────────────────────────────────────────────────
def sort_vms(vms: Iterable[VmRequest], policy: SortPolicy) -> List[VmRequest]:
    """Stable sort; VMs with equal keys keep their input order."""
    return sorted(vms, key=_SORT_KEYS[SortPolicy(policy)])


def feasible(host: HostState, vm: VmRequest) -> bool:
    """Whether vm fits on host at every instant of its window, in every resource."""
    spec = host.spec
    if vm.per_core_mips > spec.per_core_mips:
        return False
    capacity = spec.capacity
    if not vm.demand.fits_within(capacity):
        return False
    overlapping = host.overlapping(vm.interval)
    if not overlapping:
        return True

    # all overlapping VMs at once is an upper bound on the peak load
    peak = vm.demand
    for other in overlapping:
        peak = peak.plus(other.demand)
    if peak.fits_within(capacity):
        return True

    # sweep the candidate window; load only rises at start events
    deltas: Dict[float, List[float]] = defaultdict(lambda: [0.0] * len(RESOURCE_KINDS))
    for other in overlapping:
        at = max(other.start, vm.start)
        for k, d in enumerate(other.demand):
            deltas[at][k] += d
        if other.end < vm.end:
            for k, d in enumerate(other.demand):
                deltas[other.end][k] -= d
    level = list(vm.demand)
    for t in sorted(deltas):
        for k, d in enumerate(deltas[t]):
            level[k] += d
        if not ResourceVector(*level).fits_within(capacity):
            return False
    return True


def power_increase(host: HostState, vm: VmRequest, opening_cost: bool = True) -> float:
    """Dynamic power added by vm, plus p_idle when the host is still idle and opening_cost is set."""
    spec = host.spec
    delta = spec.power.dynamic * vm.mips / spec.capacity.mips
    if opening_cost and not host.is_used:
        delta += spec.power.idle
    return delta


def _new_host_rank(spec: HostSpec) -> Tuple[float, str]:
    return -perf_per_watt(spec), spec.id


def _fits_empty(spec: HostSpec, vm: VmRequest) -> bool:
    return vm.per_core_mips <= spec.per_core_mips and vm.demand.fits_within(spec.capacity)


def open_new_host(idle_hosts: Sequence[HostSpec], vm: VmRequest) -> Optional[HostSpec]:
    """The idle host with the best MIPS per watt that can take vm alone, or None."""
    candidates = [spec for spec in idle_hosts if _fits_empty(spec, vm)]
    if not candidates:
        return None
    return min(candidates, key=_new_host_rank)


def audit_schedule(schedule: Schedule, hosts: Sequence[HostSpec]) -> List[str]:
    """Ids of hosts whose assigned VMs oversubscribe them at some instant."""
    return [host_id for host_id, state in host_states(schedule, hosts).items() if not check_host(state)]


# ── allocation loop ──────────────────────────────────────────────────────────
class _Fleet:
    """Mutable per-run host states plus the idle pool in opening order."""

    def __init__(self, hosts: Sequence[HostSpec]):
        ordered = sorted(hosts, key=lambda spec: spec.id)
        self.states: List[HostState] = [HostState(spec) for spec in ordered]
        self.by_id: Dict[str, HostState] = {st.spec.id: st for st in self.states}
        self._idle: Optional[List[HostSpec]] = None
        self.stats = SchedulingStats()

    def open_for(self, vm: VmRequest) -> Optional[HostState]:
        if self._idle is None:
            self._idle = sorted((st.spec for st in self.states if not st.is_used), key=_new_host_rank)
        for pos, spec in enumerate(self._idle):
            if _fits_empty(spec, vm):
                del self._idle[pos]
                return self.by_id[spec.id]
        return None

    def assign(self, state: HostState, vm: VmRequest) -> None:
        if not state.is_used:
            self.stats.hosts_opened += 1
        state.add(vm)


def _finish(
    vms: Sequence[VmRequest],
    assignments: Dict[str, str],
    rejected: List[str],
    name: str,
    config: SchedulerConfig,
    stats: SchedulingStats,
) -> Schedule:
    if rejected:
        log.warning("%s rejected %d of %d VMs (no feasible host)", name, len(rejected), len(vms))
    log.debug("%s: %d placed, %d hosts opened, %d pair visits", name, len(assignments), stats.hosts_opened, stats.pair_visits)
    return Schedule(
        vms=tuple(vms),
        assignments=assignments,
        rejected=frozenset(rejected),
        algorithm=name,
        config=config.model_dump(mode="json"),
        stats=stats,
    )


def _schedule_busy_time(vms: Sequence[VmRequest], hosts: Sequence[HostSpec], config: SchedulerConfig) -> Schedule:
    """Shared loop of EM and MinDFT: rank used hosts, else open a new one."""
    fleet = _Fleet(hosts)
    stats = fleet.stats
    use_ret = config.family is Family.EM
    assignments: Dict[str, str] = {}
    rejected: List[str] = []

    for vm in sort_vms(vms, config.sort_policy):
        best: Optional[HostState] = None
        best_score = math.inf
        for state in fleet.states:
            stats.pair_visits += 1
            if not state.is_used:
                continue
            stats.feasibility_checks += 1
            if not feasible(state, vm):
                continue
            t_diff = state.uncovered(vm.interval)
            if use_ret:
                score = ret_metric(t_diff, state, config.weights, vm, config.utilization_mode)
            else:
                score = t_diff
            if score < best_score:
                best, best_score = state, score
        if best is None:
            best = fleet.open_for(vm)
        if best is None:
            rejected.append(vm.id)
            log.debug("%s: vm %s rejected", config.name, vm.id)
            continue
        fleet.assign(best, vm)
        assignments[vm.id] = best.spec.id
        log.debug("%s: vm %s -> %s", config.name, vm.id, best.spec.id)

    return _finish(vms, assignments, rejected, config.name, config, stats)


def _schedule_power(vms: Sequence[VmRequest], hosts: Sequence[HostSpec], config: SchedulerConfig) -> Schedule:
    """Shared loop of PABFD and BFD-ST: minimum power increase over every host."""
    fleet = _Fleet(hosts)
    stats = fleet.stats
    assignments: Dict[str, str] = {}
    rejected: List[str] = []

    for vm in sort_vms(vms, config.sort_policy):
        best: Optional[HostState] = None
        best_delta = math.inf
        for state in fleet.states:
            stats.pair_visits += 1
            stats.feasibility_checks += 1
            if not feasible(state, vm):
                continue
            delta = power_increase(state, vm, config.opening_cost)
            if delta < best_delta:
                best, best_delta = state, delta
        if best is None:
            rejected.append(vm.id)
            log.debug("%s: vm %s rejected", config.name, vm.id)
            continue
        fleet.assign(best, vm)
        assignments[vm.id] = best.spec.id
        log.debug("%s: vm %s -> %s (+%.3f W)", config.name, vm.id, best.spec.id, best_delta)

    return _finish(vms, assignments, rejected, config.name, config, stats)


def schedule_em(vms: Sequence[VmRequest], hosts: Sequence[HostSpec], config: SchedulerConfig) -> Schedule:
    if config.family is not Family.EM:
        raise ValueError(f"schedule_em got a {config.family.value} configuration")
    return _schedule_busy_time(vms, hosts, config)


def schedule_mindft(
    vms: Sequence[VmRequest], hosts: Sequence[HostSpec], policy: SortPolicy = SortPolicy.ST
) -> Schedule:
    return _schedule_busy_time(vms, hosts, SchedulerConfig(family=Family.MINDFT, sort_policy=policy))


def schedule_pabfd(vms: Sequence[VmRequest], hosts: Sequence[HostSpec], opening_cost: bool = True) -> Schedule:
    config = SchedulerConfig(family=Family.PABFD, sort_policy=SortPolicy.CPU, opening_cost=opening_cost)
    return _schedule_power(vms, hosts, config)


def schedule_bfd_st(vms: Sequence[VmRequest], hosts: Sequence[HostSpec], opening_cost: bool = True) -> Schedule:
    config = SchedulerConfig(family=Family.BFD_ST, sort_policy=SortPolicy.ST, opening_cost=opening_cost)
    return _schedule_power(vms, hosts, config)


def run_scheduler(vms: Sequence[VmRequest], hosts: Sequence[HostSpec], config: SchedulerConfig) -> Schedule:
    """Dispatch on the configured algorithm family."""
    if config.family in (Family.EM, Family.MINDFT):
        return _schedule_busy_time(vms, hosts, config)
    return _schedule_power(vms, hosts, config)
