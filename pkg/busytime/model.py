"""
Core domain types: resource vectors, time intervals, VM requests, hosts with
their affine power model, and the Schedule produced by every allocator.

Every type here is an immutable value object; construction validates, so no
partially valid VM or host ever leaves this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from busytime.errors import (
    CoreMipsMismatch,
    InconsistentSchedule,
    InvalidCoreCount,
    InvalidPowerModel,
    NegativeDemand,
    NonPositiveDuration,
    UtilizationOutOfRange,
    ValidationError,
    ZeroPowerModel,
)

REL_TOL = 1e-9


class ResourceKind(IntEnum):
    """The closed set of resource dimensions; values index a ResourceVector."""

    CORES = 0
    MIPS = 1
    RAM = 2
    NET_BW = 3
    STORAGE = 4

    @property
    def key(self) -> str:
        return self.name.lower()

    @classmethod
    def from_key(cls, key: str) -> "ResourceKind":
        try:
            return cls[key.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown resource kind '{key}'") from None


RESOURCE_KINDS: Tuple[ResourceKind, ...] = tuple(ResourceKind)


class ResourceVector(NamedTuple):
    """cores (count), mips (aggregate MIPS), ram (MB), net_bw (Mbit/s), storage (GB)."""

    cores: float
    mips: float
    ram: float
    net_bw: float
    storage: float

    def plus(self, other: "ResourceVector") -> "ResourceVector":
        return ResourceVector(*(a + b for a, b in zip(self, other)))

    def fits_within(self, capacity: "ResourceVector", rel_tol: float = REL_TOL) -> bool:
        return all(d <= c * (1.0 + rel_tol) for d, c in zip(self, capacity))

    @classmethod
    def zero(cls) -> "ResourceVector":
        return cls(0, 0.0, 0.0, 0.0, 0.0)


ZERO = ResourceVector.zero()


def _check_vector(vec: ResourceVector, what: str) -> None:
    for kind, value in zip(RESOURCE_KINDS, vec):
        if not math.isfinite(value):
            raise NegativeDemand(f"{what}: {kind.key} is not finite ({value})")
        if value < 0:
            raise NegativeDemand(f"{what}: {kind.key} is negative ({value})")


def _check_cores(cores: float, mips: float, per_core_mips: float, what: str) -> None:
    if cores < 1 or not float(cores).is_integer():
        raise InvalidCoreCount(f"{what}: cores must be an integer >= 1, got {cores}")
    if not math.isfinite(per_core_mips) or per_core_mips < 0:
        raise NegativeDemand(f"{what}: per_core_mips must be >= 0, got {per_core_mips}")
    expected = cores * per_core_mips
    if not math.isclose(mips, expected, rel_tol=REL_TOL, abs_tol=0.0):
        raise CoreMipsMismatch(
            f"{what}: mips {mips} != cores {cores} x per_core_mips {per_core_mips} = {expected}"
        )


@dataclass(frozen=True, slots=True)
class Interval:
    """Half-open time window [start, end) in seconds."""

    start: float
    end: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise ValidationError(f"interval bounds must be finite: [{self.start}, {self.end})")
        if self.start < 0:
            raise ValidationError(f"interval start must be >= 0, got {self.start}")
        if self.end <= self.start:
            raise NonPositiveDuration(f"interval [{self.start}, {self.end}) has no positive length")

    @property
    def duration(self) -> float:
        return self.end - self.start

    def overlaps(self, other: "Interval") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True, slots=True)
class VmRequest:
    id: str
    demand: ResourceVector
    interval: Interval
    per_core_mips: float
    submit_time: Optional[float] = None

    def __post_init__(self) -> None:
        what = f"vm {self.id}"
        _check_vector(self.demand, what)
        _check_cores(self.demand.cores, self.demand.mips, self.per_core_mips, what)

    @property
    def start(self) -> float:
        return self.interval.start

    @property
    def end(self) -> float:
        return self.interval.end

    @property
    def duration(self) -> float:
        return self.interval.end - self.interval.start

    @property
    def mips(self) -> float:
        return self.demand.mips


@dataclass(frozen=True, slots=True)
class PowerModel:
    """Affine power model P(u) = b + a*u with b = p_idle and a = p_max - p_idle."""

    p_idle: float
    p_max: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p_idle) and math.isfinite(self.p_max)):
            raise InvalidPowerModel(f"power model must be finite: ({self.p_idle}, {self.p_max})")
        if not 0 <= self.p_idle <= self.p_max:
            raise InvalidPowerModel(
                f"power model needs 0 <= p_idle <= p_max, got ({self.p_idle}, {self.p_max})"
            )

    @property
    def idle(self) -> float:
        return self.p_idle

    @property
    def dynamic(self) -> float:
        return self.p_max - self.p_idle


@dataclass(frozen=True, slots=True)
class HostSpec:
    id: str
    capacity: ResourceVector
    per_core_mips: float
    power: PowerModel
    kind: str = ""

    def __post_init__(self) -> None:
        what = f"host {self.id}"
        _check_vector(self.capacity, what)
        _check_cores(self.capacity.cores, self.capacity.mips, self.per_core_mips, what)


@dataclass
class SchedulingStats:
    """Operation counters used to check the O(n x m x q) scan structure."""

    pair_visits: int = 0
    feasibility_checks: int = 0
    hosts_opened: int = 0


@dataclass(frozen=True)
class Schedule:
    """VM -> host mapping plus the rejected set; the unit of evaluation."""

    vms: Tuple[VmRequest, ...]
    assignments: Mapping[str, str]
    rejected: FrozenSet[str] = frozenset()
    algorithm: str = ""
    config: Mapping[str, Any] = field(default_factory=dict)
    stats: SchedulingStats = field(default_factory=SchedulingStats)

    def __post_init__(self) -> None:
        ids = [vm.id for vm in self.vms]
        id_set = set(ids)
        if len(id_set) != len(ids):
            raise InconsistentSchedule("duplicate VM ids in schedule input")
        assigned = set(self.assignments)
        if assigned & self.rejected:
            raise InconsistentSchedule(f"VMs both assigned and rejected: {sorted(assigned & self.rejected)}")
        if assigned | self.rejected != id_set:
            missing = id_set - assigned - self.rejected
            extra = (assigned | self.rejected) - id_set
            raise InconsistentSchedule(f"assignments/rejected do not partition the VM set (missing={sorted(missing)}, unknown={sorted(extra)})")

    @property
    def placed(self) -> List[VmRequest]:
        return [vm for vm in self.vms if vm.id in self.assignments]

    @property
    def hosts_used(self) -> int:
        return len(set(self.assignments.values()))

    def by_host(self) -> Dict[str, List[VmRequest]]:
        groups: Dict[str, List[VmRequest]] = {}
        for vm in self.vms:
            host_id = self.assignments.get(vm.id)
            if host_id is not None:
                groups.setdefault(host_id, []).append(vm)
        return groups


# ── operations ───────────────────────────────────────────────────────────────
def _number(raw: Mapping[str, Any], key: str, default: Optional[float] = None) -> float:
    value = raw.get(key)
    if value is None:
        value = default
    if value is None:
        raise ValidationError(f"missing field '{key}'")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"field '{key}' is not numeric: {value!r}") from None


def validate_vm_request(raw: Mapping[str, Any]) -> VmRequest:
    """Turn a VmRequest-shaped record into a validated VmRequest.

    Accepts either `duration` or `end` for the window; `mips` defaults to
    cores x per_core_mips and is checked against it when present.
    """
    vm_id = str(raw.get("id", "")).strip()
    if not vm_id:
        raise ValidationError("missing field 'id'")
    start = _number(raw, "start")
    if "duration" in raw:
        end = start + _number(raw, "duration")
    else:
        end = _number(raw, "end")
    if not end > start:
        raise NonPositiveDuration(f"vm {vm_id}: duration {end - start} is not positive")
    interval = Interval(start, end)

    cores = _number(raw, "cores")
    per_core = _number(raw, "per_core_mips")
    mips = _number(raw, "mips", cores * per_core)
    demand = ResourceVector(
        cores,
        mips,
        _number(raw, "ram", 0.0),
        _number(raw, "net_bw", 0.0),
        _number(raw, "storage", 0.0),
    )
    _check_vector(demand, f"vm {vm_id}")
    demand = demand._replace(cores=int(cores)) if float(cores).is_integer() else demand
    submit = raw.get("submit_time")
    return VmRequest(
        id=vm_id,
        demand=demand,
        interval=interval,
        per_core_mips=per_core,
        submit_time=None if submit is None else float(submit),
    )


def power(power_model: PowerModel, u: float) -> float:
    """Instantaneous power in watts at utilization u (affine model)."""
    if not 0.0 <= u <= 1.0:
        raise UtilizationOutOfRange(f"utilization must be within [0, 1], got {u}")
    if u == 1.0:
        return power_model.p_max
    return min(power_model.p_idle + power_model.dynamic * u, power_model.p_max)


def perf_per_watt(host: HostSpec) -> float:
    """Total MIPS over maximum power, the new-host ranking key."""
    if host.power.p_max == 0:
        raise ZeroPowerModel(f"host {host.id} has p_max = 0")
    return host.capacity.mips / host.power.p_max


def vms_by_id(vms: Iterable[VmRequest]) -> Dict[str, VmRequest]:
    return {vm.id: vm for vm in vms}
