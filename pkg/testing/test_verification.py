#!/usr/bin/env python3
import pytest

from busytime.config import build_config, load_config
from busytime.errors import HeterogeneousFleet, InputDataError
from busytime.verification import ordering_agrees, relative_error, verify_theorems


def test_homogeneous_fleet_passes(sample_config):
    config = load_config(sample_config("homogeneous_m1.env"), environ={}).with_updates(
        verify_instances=100, verify_max_vms=50
    )
    report = verify_theorems(config)
    assert report.passed, report.failures
    assert report.instances == 100
    assert report.schedules == 100 * 8
    assert report.compared_pairs > 0
    assert report.max_relative_error <= 1e-9


def test_every_host_type_passes_on_its_own():
    for name in ("M1", "M2", "M3"):
        counts = {f"fleet.{k}": "0" for k in ("M1", "M2", "M3")}
        counts[f"fleet.{name}"] = "8"
        config = build_config({**counts, "verify.instances": "10", "verify.max_vms": "20"})
        assert verify_theorems(config).passed


def test_mixed_fleet_is_refused():
    with pytest.raises(HeterogeneousFleet):
        verify_theorems(build_config({"verify.instances": "3"}))


def test_zero_instances_pass_vacuously():
    report = verify_theorems(build_config({"fleet.M1": "2", "verify.instances": "0"}))
    assert report.passed and report.instances == 0


def test_empty_fleet_is_an_input_error():
    with pytest.raises(InputDataError):
        verify_theorems(build_config({"fleet.total": "0", "verify.instances": "2"}))


def test_summary_lists_the_counters(sample_config):
    config = load_config(sample_config("homogeneous_m1.env"), environ={}).with_updates(verify_instances=2)
    summary = verify_theorems(config).summary()
    assert "instances: 2" in summary
    assert "ordering violations: 0" in summary


def test_relative_error():
    assert relative_error(0.0, 0.0) == 0.0
    assert relative_error(100.0, 99.0) == pytest.approx(0.01)


def test_ordering_needs_equal_energy_for_equal_busy_time():
    assert ordering_agrees(3600.0, 3600.0, 50.0, 50.0)
    assert not ordering_agrees(3600.0, 3600.0, 50.0, 51.0)
    assert not ordering_agrees(3600.0, 7200.0, 50.0, 50.0)
    assert ordering_agrees(3600.0, 7200.0, 50.0, 90.0)
    assert not ordering_agrees(3600.0, 7200.0, 90.0, 50.0)
