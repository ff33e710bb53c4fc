#!/usr/bin/env python3
"""Shared fixtures: the six-VM counter-example workload, host factories, sample paths."""
import os

import pytest

from busytime.ingest import HOST_TYPES
from busytime.model import HostSpec, PowerModel, ResourceVector, validate_vm_request

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
HOUR = 3600.0

# id, cores (CPU* x 10), ram, net, start h, duration h
COUNTER_EXAMPLE = [
    ("VM1", 5, 100, 200, 1, 20),
    ("VM2", 5, 300, 200, 1, 2),
    ("VM3", 2, 400, 200, 1, 1),
    ("VM4", 2, 400, 200, 1, 1),
    ("VM5", 1, 100, 300, 1, 1),
    ("VM6", 5, 300, 200, 2, 17),
]


def make_vm(vm_id, start, duration, cores=1, per_core_mips=1000, ram=0, net_bw=0, storage=0):
    return validate_vm_request(
        {
            "id": vm_id,
            "start": start,
            "duration": duration,
            "cores": cores,
            "per_core_mips": per_core_mips,
            "ram": ram,
            "net_bw": net_bw,
            "storage": storage,
        }
    )


def make_host(host_id, cores=10, per_core_mips=1000, ram=1000, net_bw=1000, storage=1000, p_idle=210, p_max=300):
    return HostSpec(
        id=host_id,
        capacity=ResourceVector(cores, cores * per_core_mips, ram, net_bw, storage),
        per_core_mips=per_core_mips,
        power=PowerModel(p_idle, p_max),
    )


def counter_example_workload():
    return [
        make_vm(vm_id, start * HOUR, dur * HOUR, cores=cores, ram=ram, net_bw=net, storage=10)
        for vm_id, cores, ram, net, start, dur in COUNTER_EXAMPLE
    ]


def counter_example_fleet(count=6):
    return [make_host(f"H{k:02d}") for k in range(1, count + 1)]


def m1_fleet(count):
    return [HOST_TYPES["M1"].spec(f"m1-{k:02d}") for k in range(count)]


@pytest.fixture
def counter_example_vms():
    return counter_example_workload()


@pytest.fixture
def counter_example_hosts():
    return counter_example_fleet()


@pytest.fixture
def repo_root():
    return REPO_ROOT


@pytest.fixture
def fixture_swf():
    return os.path.join(REPO_ROOT, "samples", "traces", "fixture_50.swf")


@pytest.fixture
def sample_config():
    def _path(name):
        return os.path.join(REPO_ROOT, "samples", "configs", name)
    return _path
