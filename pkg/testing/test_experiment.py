#!/usr/bin/env python3
import io
import json
import math

import pandas as pd
import pytest

from busytime.config import build_config, load_config
from busytime.experiment import (
    CSV_COLUMNS,
    compare_algorithms,
    format_report,
    normalize,
    prepare_workload,
    run_experiment,
)

from conftest import counter_example_fleet, counter_example_workload


def _small(**extra):
    flat = {"workload.count": "60", "fleet.total": "30", "seed": "3"}
    flat.update(extra)
    return build_config(flat)


def test_baseline_only_report():
    report = run_experiment(_small(algorithms="PABFD"))
    assert len(report.rows) == 1
    row = report.rows[0]
    assert row.algorithm == "PABFD" and report.baseline == "PABFD"
    assert row.normalized_energy == 1.0 and row.saving_percent == 0.0
    assert row.vms_placed + row.vms_rejected == 60
    assert row.hosts == 30


def test_empty_workload_normalises_to_one():
    report = run_experiment(_small(**{"workload.count": "0"}))
    for row in report.rows:
        assert row.energy_kwh == 0 and row.busy_time_hours == 0
        assert row.normalized_energy == 1.0


def test_normalize():
    assert normalize(2.0, 4.0) == 0.5
    assert normalize(0.0, 0.0) == 1.0
    assert math.isinf(normalize(1.0, 0.0))


def test_counter_example_report(sample_config):
    config = load_config(sample_config("counter_example.env"), environ={})
    report = run_experiment(config, counter_example_workload(), counter_example_fleet())
    assert report.row("PABFD").busy_time_hours == pytest.approx(38.0)
    for name in ("EM-ST", "EM-LFT", "EM-LDTF", "BFD-ST", "MinDFT-LDTF"):
        assert report.row(name).busy_time_hours == pytest.approx(22.0)
        assert report.row(name).saving_percent > 0
    assert report.row("MinDFT-ST").busy_time_hours == pytest.approx(38.0)


def test_counter_example_from_bundled_csv(sample_config, repo_root, monkeypatch):
    monkeypatch.chdir(repo_root)
    config = load_config(sample_config("counter_example.env"), environ={})
    vms, hosts = prepare_workload(config)
    assert [vm.id for vm in vms] == ["VM1", "VM2", "VM3", "VM4", "VM5", "VM6"]
    report = run_experiment(config, vms, hosts)
    assert report.row("EM-LDTF").busy_time_hours == pytest.approx(22.0)
    assert report.row("EM-LDTF").hosts_used == 2


def test_first_jobs_on_a_vm_file_is_reported(sample_config, repo_root, monkeypatch, caplog):
    monkeypatch.chdir(repo_root)
    config = load_config(sample_config("counter_example.env"), overrides={"trace.first_jobs": "2"}, environ={})
    with caplog.at_level("WARNING"):
        vms, _ = prepare_workload(config)
    assert len(vms) == 6
    assert "trace.first_jobs=2 ignored" in caplog.text


def test_csv_output_columns_and_saving_arithmetic():
    report = run_experiment(_small())
    text = format_report(report, "csv")
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    frame = pd.read_csv(io.StringIO(text))
    assert list(frame["algorithm"]) == [r.algorithm for r in report.rows]
    base = frame.loc[frame["algorithm"] == "PABFD", "energy_kwh"].iloc[0]
    for _, row in frame.iterrows():
        assert row["normalized_energy"] == pytest.approx(row["energy_kwh"] / base)
        assert row["saving_percent"] == pytest.approx((1 - row["normalized_energy"]) * 100)


def test_json_output():
    rows = json.loads(format_report(run_experiment(_small()), "json"))
    assert len(rows) == 8
    assert all(list(row) == CSV_COLUMNS for row in rows)


def test_table_output():
    text = format_report(run_experiment(_small(algorithms="PABFD,EM-LDTF")), "table")
    assert "hosts_used" in text.splitlines()[0]
    assert "PABFD" in text and "0%" in text
    with pytest.raises(ValueError):
        format_report(run_experiment(_small(algorithms="PABFD")), "xml")


def test_sweep_detail_rows_average_to_the_summary_row():
    config = _small(algorithms="PABFD,EM-ST", **{"report.sweep_detail": "true", "sweep.time": "0.001,1,3600"})
    report = run_experiment(config)
    names = [row.algorithm for row in report.rows]
    assert names == ["PABFD", "EM-ST", "EM-ST@w=0.001", "EM-ST@w=1", "EM-ST@w=3600"]
    detail = [report.row(n).energy_kwh for n in names[2:]]
    assert report.row("EM-ST").energy_kwh == pytest.approx(sum(detail) / 3)


def test_compare_algorithms_uses_the_configured_format():
    config = _small(algorithms="PABFD,EM-ST")
    lines = compare_algorithms(config).splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert [line.split(",")[0] for line in lines[1:]] == ["PABFD", "EM-ST"]
    assert json.loads(compare_algorithms(config, "json"))[0]["algorithm"] == "PABFD"


def test_runs_are_deterministic():
    a = format_report(run_experiment(_small()), "csv")
    b = format_report(run_experiment(_small()), "csv")
    assert a == b


def test_parallel_workers_match_sequential():
    sequential = format_report(run_experiment(_small(algorithms="PABFD,MinDFT-ST,EM-LDTF")), "csv")
    parallel = format_report(run_experiment(_small(algorithms="PABFD,MinDFT-ST,EM-LDTF", **{"run.workers": "2"})), "csv")
    assert sequential == parallel
