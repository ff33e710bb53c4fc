"""
busytime - energy-aware allocation of fixed-interval virtual machines.

Hosts draw power only while at least one VM runs on them, so total energy is
driven by total busy time; the allocators here trade busy-time growth against
how tightly each host is packed.
"""
from busytime.errors import BusyTimeError
from busytime.metrics import WeightConfig
from busytime.model import HostSpec, Interval, PowerModel, ResourceKind, ResourceVector, Schedule, VmRequest
from busytime.schedulers import DEFAULT_ALGORITHMS, SchedulerConfig, SortPolicy, run_scheduler
from busytime.timeline import total_busy_time, total_energy

__version__ = "0.1.0"
