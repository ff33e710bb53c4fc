#!/usr/bin/env python3
"""End-to-end checks on synthetic workloads: energy savings and scale."""
import time

import numpy as np
import pytest

from busytime.ingest import default_fleet, synthetic_workload
from busytime.schedulers import SchedulerConfig, audit_schedule, run_scheduler
from busytime.timeline import total_energy

SEEDS = range(10)
ROSTER = ("PABFD", "BFD-ST", "EM-ST", "EM-LFT", "EM-LDTF")


def test_em_saves_energy_against_power_aware_best_fit():
    hosts = default_fleet({"M1": 50, "M2": 50, "M3": 50})
    configs = {name: SchedulerConfig.from_name(name) for name in ROSTER}
    energy = {name: [] for name in ROSTER}
    for seed in SEEDS:
        vms = synthetic_workload(500, 86400, seed)
        for name, config in configs.items():
            schedule = run_scheduler(vms, hosts, config)
            assert not schedule.rejected, f"{name} rejected VMs on seed {seed}"
            energy[name].append(total_energy(schedule, hosts))
    mean = {name: float(np.mean(values)) for name, values in energy.items()}

    assert mean["EM-LDTF"] <= mean["PABFD"]
    for name in ("EM-ST", "EM-LFT", "EM-LDTF"):
        assert mean[name] <= mean["BFD-ST"], name
    saving = 1.0 - mean["EM-LDTF"] / mean["PABFD"]
    assert saving >= 0.20, f"EM-LDTF saves only {saving:.1%} against PABFD"


@pytest.mark.slow
def test_em_scales_to_ten_thousand_vms():
    hosts = default_fleet(total=1000)
    vms = synthetic_workload(10_000, 86400, 2024)
    started = time.perf_counter()
    schedule = run_scheduler(vms, hosts, SchedulerConfig.from_name("EM-LDTF"))
    elapsed = time.perf_counter() - started
    assert elapsed < 300
    assert schedule.stats.pair_visits == len(vms) * len(hosts)
    assert audit_schedule(schedule, hosts) == []
