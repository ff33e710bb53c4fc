"""
Workload acquisition: SWF trace parsing, job -> VM conversion, the VM and
host catalogs, and seeded synthetic workloads.

The Standard Workload Format is whitespace-separated columns, one job per
line, with ';' comment lines (field list at
http://www.cs.huji.ac.il/labs/parallel/workload/swf.html).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import IO, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from busytime.errors import DuplicateJobId, InputDataError, MalformedLine
from busytime.model import HostSpec, Interval, PowerModel, ResourceVector, VmRequest, validate_vm_request

logger = logging.getLogger(__name__)


class SwfField(IntEnum):
    JOB_ID = 0
    SUBMITTED = 1
    WAIT_TIME = 2
    RUN_TIME = 3
    NUM_PROCS = 4
    AVG_CPU_USAGE = 5
    USED_MEM = 6
    REQ_PROCS = 7
    REQ_TIME = 8
    REQ_MEM = 9
    STATUS = 10
    USER_ID = 11
    GROUP_ID = 12
    EXECUTABLE = 13
    QUEUE_NUM = 14
    PART_NUM = 15
    PRECEDING_JOB = 16
    THINK_TIME = 17


REQUIRED_FIELDS = 5


@dataclass(frozen=True)
class SwfJob:
    """One SWF data line; absent values are -1."""

    job_id: int
    submit_time: int
    wait_time: int
    run_time: int
    allocated_processors: int
    avg_cpu_time: float = -1.0
    used_memory: int = -1
    requested_processors: int = -1
    requested_time: int = -1
    requested_memory: int = -1
    status: int = -1
    user_id: int = -1
    group_id: int = -1
    executable: int = -1
    queue: int = -1
    partition: int = -1
    preceding_job: int = -1
    think_time: int = -1

    def fields(self) -> Tuple[float, ...]:
        return (
            self.job_id, self.submit_time, self.wait_time, self.run_time,
            self.allocated_processors, self.avg_cpu_time, self.used_memory,
            self.requested_processors, self.requested_time, self.requested_memory,
            self.status, self.user_id, self.group_id, self.executable,
            self.queue, self.partition, self.preceding_job, self.think_time,
        )


def _to_int(token: str) -> int:
    try:
        return int(token)
    except ValueError:
        value = float(token)
        if not value.is_integer():
            raise
        return int(value)


def parse_swf(stream: Iterable[str]) -> List[SwfJob]:
    """Parse SWF lines in file order, skipping comments and blank lines."""
    jobs: List[SwfJob] = []
    for line_no, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text.startswith(";"):
            continue
        tokens = text.split()
        if len(tokens) < REQUIRED_FIELDS:
            raise MalformedLine(line_no, text, f"expected at least {REQUIRED_FIELDS} fields, got {len(tokens)}")
        values: List[float] = []
        try:
            for pos, token in enumerate(tokens[: len(SwfField)]):
                values.append(float(token) if pos == SwfField.AVG_CPU_USAGE else _to_int(token))
        except ValueError:
            raise MalformedLine(line_no, text) from None
        jobs.append(SwfJob(*values))
    return jobs


def _format_field(value: float) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def write_swf(jobs: Iterable[SwfJob], stream: IO[str], header: Sequence[str] = ()) -> None:
    """Write jobs back in SWF column order (all 18 fields)."""
    for line in header:
        stream.write(f"; {line}\n")
    for job in jobs:
        stream.write(" ".join(_format_field(v) for v in job.fields()) + "\n")


# ── catalogs ─────────────────────────────────────────────────────────────────
@dataclass(frozen=True)
class VmType:
    name: str
    per_core_mips: float
    cores: int
    ram: float
    net_bw: float
    storage: float

    def demand(self) -> ResourceVector:
        return ResourceVector(self.cores, self.cores * self.per_core_mips, self.ram, self.net_bw, self.storage)


VmCatalog = Tuple[VmType, ...]


@dataclass(frozen=True)
class HostType:
    name: str
    per_core_mips: float
    cores: int
    ram: float
    net_bw: float
    storage: float
    p_idle: float
    p_max: float

    def spec(self, host_id: str) -> HostSpec:
        return HostSpec(
            id=host_id,
            capacity=ResourceVector(self.cores, self.cores * self.per_core_mips, self.ram, self.net_bw, self.storage),
            per_core_mips=self.per_core_mips,
            power=PowerModel(self.p_idle, self.p_max),
            kind=self.name,
        )


_VM_TYPES: VmCatalog = (
    VmType("Type 1", 2500, 8, 6800, 100, 1000),
    VmType("Type 2", 2500, 2, 1700, 100, 422.5),
    VmType("Type 3", 3250, 8, 68400, 100, 1000),
    VmType("Type 4", 3250, 4, 34200, 100, 845),
    VmType("Type 5", 3250, 2, 17100, 100, 422.5),
    VmType("Type 6", 2000, 4, 15000, 100, 1690),
    VmType("Type 7", 2000, 2, 7500, 100, 845),
    VmType("Type 8", 1000, 1, 1875, 100, 211.25),
)

HOST_TYPES: Dict[str, HostType] = {
    "M1": HostType("M1", 3250, 4, 30720, 10000, 10000, 210, 300),
    "M2": HostType("M2", 3250, 16, 140084, 10000, 10000, 420, 600),
    "M3": HostType("M3", 2500, 16, 14336, 10000, 10000, 350, 500),
}


def default_vm_catalog() -> VmCatalog:
    return _VM_TYPES


def select_catalog(catalog: VmCatalog, types: Sequence[int]) -> VmCatalog:
    """Subset of the catalog by 1-based type numbers, in the given order."""
    try:
        return tuple(catalog[t - 1] for t in types if t >= 1)
    except IndexError:
        raise InputDataError(f"VM type out of range 1..{len(catalog)}: {list(types)}") from None


def host_catalog(overrides: Optional[Mapping[str, Mapping[str, float]]] = None) -> Dict[str, HostType]:
    """The three host types, with per-field overrides applied."""
    catalog = dict(HOST_TYPES)
    for name, fields in (overrides or {}).items():
        base = catalog.get(name)
        if base is None:
            raise InputDataError(f"unknown host type '{name}'")
        catalog[name] = replace(base, **fields)
    return catalog


def default_fleet(
    counts: Optional[Mapping[str, int]] = None,
    total: Optional[int] = None,
    host_types: Optional[Mapping[str, HostType]] = None,
) -> List[HostSpec]:
    """Build a fleet with sequential ids host-00000, host-00001, ...

    With explicit counts, hosts are grouped by type in catalog order; with a
    total, types are dealt round-robin.
    """
    types = dict(host_types or HOST_TYPES)
    order = list(types)
    if total is not None:
        if total < 0:
            raise InputDataError(f"fleet size must be >= 0, got {total}")
        kinds = [order[k % len(order)] for k in range(total)]
    else:
        kinds = []
        for name, count in (counts or {}).items():
            if name not in types:
                raise InputDataError(f"unknown host type '{name}'")
            if count < 0:
                raise InputDataError(f"host count for {name} must be >= 0, got {count}")
        for name in order:
            kinds.extend([name] * int((counts or {}).get(name, 0)))
    return [types[kind].spec(f"host-{k:05d}") for k, kind in enumerate(kinds)]


# ── conversion ───────────────────────────────────────────────────────────────
@dataclass
class Conversion:
    vms: List[VmRequest] = field(default_factory=list)
    dropped: int = 0


def _vm_from_type(vm_id: str, vm_type: VmType, start: float, duration: float, submit: Optional[float] = None) -> VmRequest:
    return VmRequest(
        id=vm_id,
        demand=vm_type.demand(),
        interval=Interval(float(start), float(start + duration)),
        per_core_mips=vm_type.per_core_mips,
        submit_time=submit,
    )


def jobs_to_vms(jobs: Iterable[SwfJob], catalog: Optional[VmCatalog] = None) -> Conversion:
    """One VM per requested processor, typed round-robin over the global VM sequence."""
    catalog = default_vm_catalog() if catalog is None else catalog
    if not catalog:
        raise InputDataError("VM catalog is empty")
    result = Conversion()
    seen: Set[int] = set()
    k = 0
    for job in jobs:
        if job.job_id in seen:
            raise DuplicateJobId(job.job_id)
        seen.add(job.job_id)
        start = job.submit_time + max(job.wait_time, 0)
        duration = job.requested_time if job.requested_time > 0 else job.run_time
        procs = job.requested_processors if job.requested_processors > 0 else job.allocated_processors
        if duration <= 0 or procs <= 0 or job.submit_time < 0:
            logger.debug("dropping job %s (duration=%s, procs=%s)", job.job_id, duration, procs)
            result.dropped += 1
            continue
        for i in range(procs):
            vm_type = catalog[k % len(catalog)]
            k += 1
            result.vms.append(_vm_from_type(f"{job.job_id}-{i}", vm_type, start, duration, float(job.submit_time)))
    if result.dropped:
        logger.warning("dropped %d job(s) with non-positive duration or processor count", result.dropped)
    return result


def _decoded_lines(fp: IO[bytes]) -> Iterable[str]:
    for line_no, raw in enumerate(fp, start=1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedLine(line_no, raw.decode("utf-8", "replace").strip(), "not valid UTF-8") from None


def load_trace(path: str, first_jobs: Optional[int] = None) -> List[SwfJob]:
    with open(path, "rb") as fp:
        jobs = parse_swf(_decoded_lines(fp))
    if first_jobs is not None:
        jobs = jobs[: max(first_jobs, 0)]
    logger.info("loaded %d job(s) from %s", len(jobs), path)
    return jobs


# ── VM request files ─────────────────────────────────────────────────────────
VM_CSV_COLUMNS = ["id", "start_s", "duration_s", "cores", "mips", "ram_mb", "net_mbits", "storage_gb"]


def vms_to_frame(vms: Sequence[VmRequest]) -> pd.DataFrame:
    rows = [
        (vm.id, vm.start, vm.duration, vm.demand.cores, vm.mips, vm.demand.ram, vm.demand.net_bw, vm.demand.storage)
        for vm in vms
    ]
    return pd.DataFrame(rows, columns=VM_CSV_COLUMNS)


def write_vm_csv(vms: Sequence[VmRequest], stream: IO[str]) -> None:
    vms_to_frame(vms).to_csv(stream, index=False, lineterminator="\n")


def read_vm_csv(path: str) -> List[VmRequest]:
    """Read a VM request file written by write_vm_csv back into validated requests."""
    frame = pd.read_csv(path, dtype={"id": str})
    missing = [c for c in VM_CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise InputDataError(f"{path}: missing columns {missing}")
    vms = []
    for row in frame.itertuples(index=False):
        cores = float(row.cores)
        vms.append(
            validate_vm_request(
                {
                    "id": row.id,
                    "start": row.start_s,
                    "duration": row.duration_s,
                    "cores": cores,
                    "per_core_mips": float(row.mips) / cores if cores else 0.0,
                    "mips": row.mips,
                    "ram": row.ram_mb,
                    "net_bw": row.net_mbits,
                    "storage": row.storage_gb,
                }
            )
        )
    return vms


# ── synthetic workloads ──────────────────────────────────────────────────────
MIN_SYNTHETIC_DURATION = 600.0


def synthetic_workload(
    n: int,
    horizon: float,
    seed: int,
    catalog: Optional[VmCatalog] = None,
) -> List[VmRequest]:
    """Seeded random VMs: uniform types, whole-second starts uniform over [0, horizon),
    whole-second durations log-uniform over [600, horizon/2]."""
    if n < 0:
        raise InputDataError(f"workload size must be >= 0, got {n}")
    catalog = default_vm_catalog() if catalog is None else catalog
    if n == 0:
        return []
    if not catalog:
        raise InputDataError("VM catalog is empty")
    rng = np.random.default_rng(seed)
    type_idx = rng.integers(0, len(catalog), size=n)
    starts = np.floor(rng.uniform(0.0, horizon, size=n))
    hi = max(horizon / 2.0, MIN_SYNTHETIC_DURATION)
    durations = np.rint(np.exp(rng.uniform(math.log(MIN_SYNTHETIC_DURATION), math.log(hi), size=n)))
    return [
        _vm_from_type(f"vm-{k:05d}", catalog[int(t)], float(s), float(d))
        for k, (t, s, d) in enumerate(zip(type_idx, starts, durations))
    ]
