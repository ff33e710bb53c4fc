"""
Host-ranking metrics for the busy-time heuristic: per-resource utilization,
the weighted resource-efficiency distance, and the combined RET score.
"""
from __future__ import annotations

import math
from enum import Enum
from typing import Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from busytime.errors import ZeroCapacity
from busytime.model import RESOURCE_KINDS, ResourceKind, VmRequest
from busytime.timeline import HostState


class WeightConfig(BaseModel):
    """Per-resource weights w_r and the time weight applied to busy-time increases."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    cores: float = Field(0.0, ge=0, allow_inf_nan=False)
    mips: float = Field(940.0, ge=0, allow_inf_nan=False)
    ram: float = Field(24414.0, ge=0, allow_inf_nan=False)
    net_bw: float = Field(1.0, ge=0, allow_inf_nan=False)
    storage: float = Field(0.0001, ge=0, allow_inf_nan=False)
    time: float = Field(1.0, ge=0, allow_inf_nan=False)

    def resource_weights(self) -> Tuple[float, ...]:
        """Weights in ResourceKind order."""
        return tuple(getattr(self, kind.key) for kind in RESOURCE_KINDS)

    def scaled(self, factor: float) -> "WeightConfig":
        """Every resource weight multiplied by factor; the time weight is kept."""
        return WeightConfig(
            **{kind.key: getattr(self, kind.key) * factor for kind in RESOURCE_KINDS},
            time=self.time,
        )

    def with_time(self, w_time: float) -> "WeightConfig":
        return WeightConfig(**{**self.model_dump(), "time": w_time})


class UtilizationMode(str, Enum):
    LITERAL = "literal"   # whole assigned VM list, may exceed 1
    OVERLAP = "overlap"   # only VMs overlapping the candidate window


def resource_utilization(
    host: HostState,
    r: ResourceKind,
    candidate: Optional[VmRequest] = None,
    mode: UtilizationMode = UtilizationMode.LITERAL,
) -> float:
    """Sum of demand_r over the host's VMs (plus candidate, if given) divided by capacity_r."""
    capacity = host.spec.capacity[r]
    if capacity <= 0:
        raise ZeroCapacity(f"host {host.spec.id} has zero {r.key} capacity")
    if mode is UtilizationMode.OVERLAP and candidate is not None:
        demand = math.fsum(vm.demand[r] for vm in host.overlapping(candidate.interval))
    else:
        demand = host.totals[r]
    if candidate is not None:
        demand += candidate.demand[r]
    return demand / capacity


def resource_efficiency(
    host: HostState,
    weights: WeightConfig,
    candidate: Optional[VmRequest] = None,
    mode: UtilizationMode = UtilizationMode.LITERAL,
) -> float:
    """Weighted distance from the all-ones utilization vector; 0 is a perfectly packed host."""
    if mode is UtilizationMode.OVERLAP and candidate is not None:
        utilization = [
            resource_utilization(host, kind, candidate, mode) if w else 0.0
            for kind, w in zip(RESOURCE_KINDS, weights.resource_weights())
        ]
        return efficiency_from_utilization(utilization, weights)
    capacity = host.spec.capacity
    load = host.totals if candidate is None else host.totals.plus(candidate.demand)
    acc = 0.0
    for kind, w in zip(RESOURCE_KINDS, weights.resource_weights()):
        if w == 0:
            continue
        if capacity[kind] <= 0:
            raise ZeroCapacity(f"host {host.spec.id} has zero {kind.key} capacity")
        acc += ((1.0 - load[kind] / capacity[kind]) * w) ** 2
    return math.sqrt(acc)


def efficiency_from_utilization(utilization: Sequence[float], weights: WeightConfig) -> float:
    acc = 0.0
    for u, w in zip(utilization, weights.resource_weights()):
        if w:
            acc += ((1.0 - u) * w) ** 2
    return math.sqrt(acc)


def ret_from_efficiency(t_diff: float, efficiency: float, w_time: float) -> float:
    if t_diff != 0:
        return t_diff * w_time * efficiency
    return efficiency


def ret_metric(
    t_diff: float,
    host: HostState,
    weights: WeightConfig,
    candidate: Optional[VmRequest] = None,
    mode: UtilizationMode = UtilizationMode.LITERAL,
) -> float:
    """RET score of a host: t_diff x w_time x RE when busy time grows, plain RE otherwise.

    With a candidate, RE is evaluated on the host as if the candidate were
    already placed; without one, on the host as given.
    """
    return ret_from_efficiency(t_diff, resource_efficiency(host, weights, candidate, mode), weights.time)
