"""
Interval-set arithmetic and energy accounting.

Busy time is the measure of the union of a host's VM windows; utilization is a
step function with breakpoints at VM starts and ends, so energy is integrated
exactly by sweeping those breakpoints. Hosts draw no power outside their busy
union.
"""
from __future__ import annotations

import logging
import math
from bisect import bisect_left, bisect_right
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from busytime.errors import HeterogeneousFleet, InconsistentSchedule, InfeasibleState, ZeroCapacity
from busytime.model import (
    REL_TOL,
    RESOURCE_KINDS,
    ZERO,
    HostSpec,
    Interval,
    ResourceKind,
    ResourceVector,
    Schedule,
    VmRequest,
    power,
)

log = logging.getLogger(__name__)

IntervalLike = Union[Interval, Tuple[float, float]]


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function: values[k] holds on [breakpoints[k], breakpoints[k+1]).

    Zero outside [breakpoints[0], breakpoints[-1]).
    """

    breakpoints: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if len(self.values) != max(len(self.breakpoints) - 1, 0):
            raise ValueError("a step function needs exactly one value per segment")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @classmethod
    def from_pulses(cls, pulses: Iterable[Tuple[float, float, float]]) -> "StepFunction":
        """Sum of rectangular pulses (start, end, height) via an event sweep."""
        deltas: Dict[float, List[float]] = defaultdict(lambda: [0.0, 0])
        for start, end, height in pulses:
            deltas[start][0] += height
            deltas[start][1] += 1
            deltas[end][0] -= height
            deltas[end][1] -= 1
        if not deltas:
            return cls()
        times = sorted(deltas)
        level, active = 0.0, 0
        values: List[float] = []
        for t in times[:-1]:
            dv, dc = deltas[t]
            level += dv
            active += dc
            if active == 0:
                level = 0.0
            values.append(level)
        return cls(tuple(times), tuple(values))

    def __call__(self, t: float) -> float:
        k = bisect_right(self.breakpoints, t) - 1
        if 0 <= k < len(self.values):
            return self.values[k]
        return 0.0

    def segments(self) -> Iterator[Tuple[float, float, float]]:
        for k, value in enumerate(self.values):
            yield self.breakpoints[k], self.breakpoints[k + 1], value

    def joint_segments(self, other: "StepFunction") -> Iterator[Tuple[float, float, float, float]]:
        """Refine both functions onto their common breakpoints: (start, end, self, other)."""
        points = sorted(set(self.breakpoints) | set(other.breakpoints))
        for a, b in zip(points, points[1:]):
            yield a, b, self(a), other(a)

    def merged(self) -> "StepFunction":
        """Drop breakpoints between adjacent segments with equal values."""
        if not self.values:
            return self
        points = [self.breakpoints[0]]
        values = [self.values[0]]
        for k in range(1, len(self.values)):
            if self.values[k] != values[-1]:
                points.append(self.breakpoints[k])
                values.append(self.values[k])
        points.append(self.breakpoints[-1])
        return StepFunction(tuple(points), tuple(values))

    def split(self, extra: Iterable[float]) -> "StepFunction":
        """Same function with additional interior breakpoints."""
        if not self.values:
            return self
        lo, hi = self.breakpoints[0], self.breakpoints[-1]
        points = sorted(set(self.breakpoints) | {t for t in extra if lo < t < hi})
        return StepFunction(tuple(points), tuple(self(t) for t in points[:-1]))

    def integral(self) -> float:
        return math.fsum(v * (b - a) for a, b, v in self.segments())

    def maximum(self) -> float:
        return max(self.values, default=0.0)


def union_length(intervals: Iterable[IntervalLike]) -> float:
    """Measure of the union of half-open intervals; 0 for none."""
    spans = sorted(
        (iv.start, iv.end) if isinstance(iv, Interval) else (float(iv[0]), float(iv[1]))
        for iv in intervals
    )
    pieces: List[float] = []
    cur_start: Optional[float] = None
    cur_end = 0.0
    for start, end in spans:
        if cur_start is None:
            cur_start, cur_end = start, end
        elif start <= cur_end:
            cur_end = max(cur_end, end)
        else:
            pieces.append(cur_end - cur_start)
            cur_start, cur_end = start, end
    if cur_start is not None:
        pieces.append(cur_end - cur_start)
    return math.fsum(pieces)


class HostState:
    """A host plus the VMs assigned to it.

    VMs are kept ordered by (start, end) with insertion order breaking ties,
    and the busy union is maintained incrementally as disjoint sorted
    segments, so busy-time increases cost O(log q + k).
    """

    __slots__ = ("spec", "_vms", "_keys", "_seg_starts", "_seg_ends", "_totals")

    def __init__(self, spec: HostSpec, vms: Iterable[VmRequest] = ()):
        self.spec = spec
        self._vms: List[VmRequest] = []
        self._keys: List[Tuple[float, float, int]] = []
        self._seg_starts: List[float] = []
        self._seg_ends: List[float] = []
        self._totals: ResourceVector = ZERO
        for vm in vms:
            self.add(vm)

    def __repr__(self) -> str:
        return f"HostState({self.spec.id}, vms={len(self._vms)})"

    @property
    def vms(self) -> Tuple[VmRequest, ...]:
        return tuple(self._vms)

    @property
    def is_used(self) -> bool:
        return bool(self._vms)

    @property
    def totals(self) -> ResourceVector:
        """Demand summed over every assigned VM regardless of time."""
        return self._totals

    @property
    def union_segments(self) -> List[Tuple[float, float]]:
        return list(zip(self._seg_starts, self._seg_ends))

    @property
    def busy_time(self) -> float:
        return math.fsum(e - s for s, e in zip(self._seg_starts, self._seg_ends))

    def add(self, vm: VmRequest) -> None:
        key = (vm.start, vm.end, len(self._keys))
        pos = bisect_right(self._keys, key)
        self._keys.insert(pos, key)
        self._vms.insert(pos, vm)
        self._totals = self._totals.plus(vm.demand)

        a, b = vm.start, vm.end
        i = bisect_left(self._seg_ends, a)
        j = bisect_right(self._seg_starts, b)
        if i < j:
            a = min(a, self._seg_starts[i])
            b = max(b, self._seg_ends[j - 1])
        self._seg_starts[i:j] = [a]
        self._seg_ends[i:j] = [b]

    def overlapping(self, interval: Interval) -> List[VmRequest]:
        """Assigned VMs whose window intersects the half-open interval."""
        hi = bisect_left(self._keys, (interval.end,))
        start = interval.start
        return [vm for vm in self._vms[:hi] if vm.end > start]

    def uncovered(self, interval: Interval) -> float:
        """Length of the interval not yet covered by the busy union.

        This is the busy-time increase of adding a VM with that window. Only
        gap lengths are summed, so a fully covered window yields exactly 0.
        """
        a, b = interval.start, interval.end
        starts, ends = self._seg_starts, self._seg_ends
        cursor = a
        i = bisect_right(starts, a) - 1
        if i >= 0 and ends[i] > cursor:
            cursor = ends[i]
        i += 1
        gaps: List[float] = []
        n = len(starts)
        while cursor < b and i < n and starts[i] < b:
            if starts[i] > cursor:
                gaps.append(starts[i] - cursor)
            if ends[i] > cursor:
                cursor = ends[i]
            i += 1
        if cursor < b:
            gaps.append(b - cursor)
        return math.fsum(gaps)


# ── per-host operations ──────────────────────────────────────────────────────
def busy_time(host: HostState) -> float:
    return union_length(vm.interval for vm in host.vms)


def resource_load_profile(host: HostState, r: ResourceKind) -> StepFunction:
    return StepFunction.from_pulses((vm.start, vm.end, vm.demand[r]) for vm in host.vms)


def occupancy_profile(host: HostState) -> StepFunction:
    """Number of running VMs over time; positive exactly on the busy union."""
    return StepFunction.from_pulses((vm.start, vm.end, 1.0) for vm in host.vms)


def utilization_profile(host: HostState) -> StepFunction:
    capacity = host.spec.capacity.mips
    if capacity <= 0:
        raise ZeroCapacity(f"host {host.spec.id} has no MIPS capacity")
    return StepFunction.from_pulses((vm.start, vm.end, vm.mips / capacity) for vm in host.vms)


def energy_from_profiles(spec: HostSpec, utilization: StepFunction, occupancy: StepFunction) -> float:
    """Integrate P(U(t)) over the segments where at least one VM runs."""
    pieces: List[float] = []
    for a, b, u, running in utilization.joint_segments(occupancy):
        if running <= 0:
            continue
        if u > 1.0 + REL_TOL:
            raise InfeasibleState(f"host {spec.id} utilization {u:.6f} > 1 on [{a}, {b})")
        pieces.append(power(spec.power, min(max(u, 0.0), 1.0)) * (b - a))
    return math.fsum(pieces)


def host_energy(host: HostState) -> float:
    """Energy in joules consumed by one host over its busy union."""
    if not host.is_used:
        return 0.0
    return energy_from_profiles(host.spec, utilization_profile(host), occupancy_profile(host))


def check_host(host: HostState) -> bool:
    """True when no resource is ever oversubscribed and every VM's core speed fits."""
    if any(vm.per_core_mips > host.spec.per_core_mips for vm in host.vms):
        return False
    for kind in RESOURCE_KINDS:
        peak = resource_load_profile(host, kind).maximum()
        if peak > host.spec.capacity[kind] * (1.0 + REL_TOL):
            return False
    return True


# ── schedule-level operations ────────────────────────────────────────────────
def host_states(schedule: Schedule, hosts: Sequence[HostSpec]) -> Dict[str, HostState]:
    """Rebuild per-host state for a schedule; every host appears, used or not."""
    states = {spec.id: HostState(spec) for spec in hosts}
    for vm in schedule.vms:
        host_id = schedule.assignments.get(vm.id)
        if host_id is None:
            continue
        state = states.get(host_id)
        if state is None:
            raise InconsistentSchedule(f"vm {vm.id} assigned to unknown host {host_id}")
        state.add(vm)
    return states


def total_busy_time(schedule: Schedule, hosts: Sequence[HostSpec]) -> float:
    return math.fsum(busy_time(state) for state in host_states(schedule, hosts).values())


def total_energy(schedule: Schedule, hosts: Sequence[HostSpec]) -> float:
    return math.fsum(host_energy(state) for state in host_states(schedule, hosts).values())


def energy_decomposition(schedule: Schedule, hosts: Sequence[HostSpec]) -> Tuple[float, float]:
    """Split total energy into p_idle x sum(T_j) and the mapping-independent VM term.

    Requires one shared power model across the fleet.
    """
    models = {spec.power for spec in hosts}
    if len(models) > 1:
        raise HeterogeneousFleet(f"fleet mixes {len(models)} power models")
    if not models:
        return 0.0, 0.0
    model = next(iter(models))
    states = host_states(schedule, hosts)
    idle_term = model.idle * math.fsum(busy_time(state) for state in states.values())
    vm_terms: List[float] = []
    for vm in schedule.placed:
        capacity = states[schedule.assignments[vm.id]].spec.capacity.mips
        if capacity <= 0:
            raise ZeroCapacity(f"host {schedule.assignments[vm.id]} has no MIPS capacity")
        vm_terms.append(model.dynamic * (vm.mips / capacity) * vm.duration)
    return idle_term, math.fsum(vm_terms)
