"""
Experiment configuration.

Config files are flat `dotted.key=value` files read with python-dotenv; any
key `a.b.c` can be overridden by the environment variable BUSYTIME_A_B_C.
The flattened mapping is validated into an ExperimentConfig (pydantic).
See docs/CONFIG_FORMAT.md for the key reference.
"""
from __future__ import annotations

import logging
import os
from typing import Any, Dict, List, Literal, Mapping, MutableMapping, Optional, Tuple

import pydantic
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt

from busytime.errors import ConfigParseError, InputDataError
from busytime.ingest import HOST_TYPES, HostType, VmCatalog, default_fleet, default_vm_catalog, host_catalog, select_catalog
from busytime.metrics import UtilizationMode, WeightConfig
from busytime.model import HostSpec
from busytime.schedulers import DEFAULT_ALGORITHMS, SchedulerConfig

log = logging.getLogger(__name__)

ENV_PREFIX = "BUSYTIME_"
DEFAULT_SWEEP: Tuple[float, ...] = (0.001, 0.01, 1.0, 100.0, 3600.0)
DEFAULT_FLEET: Dict[str, int] = {"M1": 34, "M2": 33, "M3": 33}
HOST_FIELDS = ("per_core_mips", "cores", "ram", "net_bw", "storage", "p_idle", "p_max")
WEIGHT_FIELDS = ("cores", "mips", "ram", "net_bw", "storage", "time")

# dotted key -> ExperimentConfig field
_SCALAR_KEYS: Dict[str, str] = {
    "trace.path": "trace_path",
    "trace.first_jobs": "first_jobs",
    "workload.count": "workload_count",
    "workload.horizon": "workload_horizon",
    "seed": "seed",
    "fleet.total": "fleet_total",
    "baseline": "baseline",
    "scheduler.utilization_mode": "utilization_mode",
    "scheduler.opening_cost": "opening_cost",
    "output.format": "output_format",
    "report.sweep_detail": "sweep_detail",
    "run.workers": "workers",
    "verify.instances": "verify_instances",
    "verify.max_vms": "verify_max_vms",
    "verify.horizon": "verify_horizon",
}
_LIST_KEYS: Dict[str, str] = {
    "algorithms": "algorithms",
    "sweep.time": "sweep",
    "catalog.types": "catalog_types",
}


def known_keys() -> List[str]:
    keys = list(_SCALAR_KEYS) + list(_LIST_KEYS)
    keys += [f"fleet.{name}" for name in HOST_TYPES]
    keys += [f"host.{name}.{f}" for name in HOST_TYPES for f in HOST_FIELDS]
    keys += [f"weights.{f}" for f in WEIGHT_FIELDS]
    return keys


def env_name(key: str) -> str:
    return ENV_PREFIX + key.replace(".", "_").upper()


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    trace_path: Optional[str] = None
    first_jobs: Optional[NonNegativeInt] = None
    workload_count: NonNegativeInt = 500
    workload_horizon: float = Field(86400.0, gt=0, allow_inf_nan=False)
    seed: NonNegativeInt = 42
    fleet_counts: Dict[str, NonNegativeInt] = Field(default_factory=dict)
    fleet_total: Optional[NonNegativeInt] = None
    host_overrides: Dict[str, Dict[str, float]] = Field(default_factory=dict)
    catalog_types: Optional[List[int]] = None
    algorithms: List[str] = Field(default_factory=lambda: list(DEFAULT_ALGORITHMS), min_length=1)
    baseline: Optional[str] = "PABFD"
    weights: WeightConfig = Field(default_factory=WeightConfig)
    sweep: List[float] = Field(default_factory=lambda: list(DEFAULT_SWEEP), min_length=1)
    utilization_mode: UtilizationMode = UtilizationMode.LITERAL
    opening_cost: bool = True
    output_format: Literal["csv", "json", "table"] = "csv"
    sweep_detail: bool = False
    workers: int = Field(1, ge=1)
    verify_instances: NonNegativeInt = 100
    verify_max_vms: int = Field(50, ge=1)
    verify_horizon: float = Field(86400.0, gt=0, allow_inf_nan=False)

    # ── derived views ──
    def scheduler_configs(self) -> List[SchedulerConfig]:
        return [
            SchedulerConfig.from_name(name, self.weights, self.utilization_mode, self.opening_cost)
            for name in self.algorithms
        ]

    def baseline_name(self) -> str:
        """Configured baseline if it is in the roster, else PABFD if present, else the first algorithm."""
        names = [cfg.name for cfg in self.scheduler_configs()]
        if self.baseline:
            wanted = SchedulerConfig.from_name(self.baseline).name
            if wanted in names:
                return wanted
            if "baseline" in self.model_fields_set:
                log.warning("baseline %s is not in the algorithm list; falling back", self.baseline)
        return "PABFD" if "PABFD" in names else names[0]

    def host_types(self) -> Dict[str, HostType]:
        return host_catalog(self.host_overrides)

    def fleet(self) -> List[HostSpec]:
        types = self.host_types()
        if self.fleet_total is not None:
            return default_fleet(total=self.fleet_total, host_types=types)
        return default_fleet(self.fleet_counts or DEFAULT_FLEET, host_types=types)

    def vm_catalog(self) -> VmCatalog:
        catalog = default_vm_catalog()
        if self.catalog_types:
            return select_catalog(catalog, self.catalog_types)
        return catalog

    def with_updates(self, **changes: Any) -> "ExperimentConfig":
        return ExperimentConfig(**{**self.model_dump(), **changes})


# ── loading ──────────────────────────────────────────────────────────────────
def _split_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _to_model_fields(flat: Mapping[str, str]) -> Dict[str, Any]:
    fields: Dict[str, Any] = {}
    for key, raw in flat.items():
        value = raw.strip()
        if key in _SCALAR_KEYS:
            fields[_SCALAR_KEYS[key]] = value if value != "" else None
        elif key in _LIST_KEYS:
            fields[_LIST_KEYS[key]] = _split_list(value)
        elif key.startswith("fleet."):
            fields.setdefault("fleet_counts", {})[key.split(".", 1)[1]] = value
        elif key.startswith("host."):
            _, name, attr = key.split(".", 2)
            fields.setdefault("host_overrides", {}).setdefault(name, {})[attr] = value
        elif key.startswith("weights."):
            fields.setdefault("weights", {})[key.split(".", 1)[1]] = value
    return fields


_FIELD_TO_KEY = {field: key for key, field in {**_SCALAR_KEYS, **_LIST_KEYS}.items()}


def _dotted(loc: Tuple[Any, ...]) -> str:
    """Map a pydantic error location back to the dotted config key."""
    if not loc:
        return "config"
    head = str(loc[0])
    if head == "weights" and len(loc) > 1:
        return f"weights.{loc[1]}"
    if head == "fleet_counts" and len(loc) > 1:
        return f"fleet.{loc[1]}"
    if head == "host_overrides" and len(loc) > 2:
        return f"host.{loc[1]}.{loc[2]}"
    return _FIELD_TO_KEY.get(head, head)


def build_config(flat: Mapping[str, str]) -> ExperimentConfig:
    """Validate a flat dotted-key mapping into an ExperimentConfig."""
    valid = set(known_keys())
    for key in flat:
        if key not in valid:
            raise ConfigParseError(key, "unknown key")
    try:
        config = ExperimentConfig(**_to_model_fields(flat))
    except pydantic.ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigParseError(_dotted(tuple(first["loc"])), first["msg"]) from None

    # surfaces UnknownAlgorithm for bad names
    config.scheduler_configs()
    if config.baseline:
        SchedulerConfig.from_name(config.baseline)
    try:
        config.vm_catalog()
    except InputDataError as exc:
        raise ConfigParseError("catalog.types", str(exc)) from None
    return config


def read_flat(path: str) -> Dict[str, str]:
    if not os.path.isfile(path):
        raise ConfigParseError("config", f"file not found: {path}")
    values = dotenv_values(path)
    return {k.strip(): ("" if v is None else v) for k, v in values.items()}


def load_config(
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, Optional[str]]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> ExperimentConfig:
    """Read the config file (if any), apply BUSYTIME_* env overrides, then explicit overrides.

    Explicit overrides (CLI flags) win over the environment, which wins over the file.
    """
    environ = os.environ if environ is None else environ
    flat: MutableMapping[str, str] = dict(read_flat(path)) if path else {}
    for key in known_keys():
        value = environ.get(env_name(key))
        if value is not None:
            flat[key] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            flat[key] = str(value)
    config = build_config(flat)
    log.debug("config loaded from %s: %s", path or "<defaults>", config.model_dump())
    return config

