#!/usr/bin/env python3
import io

import pytest

from busytime.errors import DuplicateJobId, InputDataError, MalformedLine
from busytime.ingest import (
    HOST_TYPES,
    SwfJob,
    default_fleet,
    default_vm_catalog,
    host_catalog,
    jobs_to_vms,
    load_trace,
    parse_swf,
    read_vm_csv,
    select_catalog,
    synthetic_workload,
    write_swf,
    write_vm_csv,
)


def _job(job_id, submit, wait, run, procs, req_time=-1, req_procs=-1):
    return SwfJob(job_id, submit, wait, run, procs, requested_processors=req_procs, requested_time=req_time)


# ── SWF parsing ──
def test_parse_swf_skips_comments_and_blank_lines():
    text = "; Version: 2.2\n;\n\n1 0 10 3600 4 -1 -1 4 7200 -1 1 1 1 -1 1 1 -1 -1\n2 60 -1 100 1\n"
    jobs = parse_swf(io.StringIO(text))
    assert [job.job_id for job in jobs] == [1, 2]
    assert jobs[0].requested_time == 7200 and jobs[0].requested_processors == 4
    assert jobs[1].wait_time == -1
    assert jobs[1].requested_time == -1 and jobs[1].think_time == -1


def test_parse_swf_accepts_integral_floats():
    jobs = parse_swf(["7 100.0 0 50 2 12.5"])
    assert jobs[0].submit_time == 100 and jobs[0].avg_cpu_time == 12.5


@pytest.mark.parametrize("line", ["1 2 3", "1 0 10 abc 4", "1 0 10.5 100 4"])
def test_parse_swf_reports_malformed_lines(line):
    with pytest.raises(MalformedLine) as info:
        parse_swf(["; header", line])
    assert info.value.line_no == 2


def test_write_swf_round_trips():
    jobs = [_job(1, 0, 5, 100, 2, req_time=200, req_procs=2), _job(2, 30, -1, 60, 1)]
    out = io.StringIO()
    write_swf(jobs, out, header=["Version: 2.2"])
    assert out.getvalue().startswith("; Version: 2.2\n")
    assert parse_swf(io.StringIO(out.getvalue())) == jobs


# ── job -> VM conversion ──
def test_one_vm_per_requested_processor():
    result = jobs_to_vms([_job(1, 0, 0, 3600, 4, req_time=7200, req_procs=4)])
    assert len(result.vms) == 4
    assert [vm.id for vm in result.vms] == ["1-0", "1-1", "1-2", "1-3"]
    assert all(vm.start == 0 and vm.duration == 7200 for vm in result.vms)
    assert [vm.mips for vm in result.vms] == [20000, 5000, 26000, 13000]


def test_start_is_submit_plus_wait():
    vm = jobs_to_vms([_job(1, 100, 50, 10, 1, req_time=60, req_procs=1)]).vms[0]
    assert (vm.start, vm.end, vm.submit_time) == (150, 210, 100)


def test_unknown_wait_counts_as_zero():
    vm = jobs_to_vms([_job(1, 100, -1, 10, 1, req_time=60, req_procs=1)]).vms[0]
    assert vm.start == 100


def test_run_time_used_when_requested_time_missing():
    vm = jobs_to_vms([_job(1, 0, 0, 1234, 1, req_time=-1, req_procs=1)]).vms[0]
    assert vm.duration == 1234


def test_allocated_processors_used_when_request_missing():
    assert len(jobs_to_vms([_job(1, 0, 0, 100, 3)]).vms) == 3


def test_jobs_without_duration_or_processors_are_dropped(caplog):
    jobs = [_job(1, 0, 0, 0, 2), _job(2, 0, 0, 100, 0), _job(3, 0, 0, 100, 1)]
    with caplog.at_level("WARNING"):
        result = jobs_to_vms(jobs)
    assert result.dropped == 2
    assert [vm.id for vm in result.vms] == ["3-0"]
    assert "dropped 2 job" in caplog.text


def test_types_round_robin_across_jobs():
    catalog = default_vm_catalog()
    jobs = [_job(k, 0, 0, 100, 3, req_procs=3) for k in range(1, 5)]
    vms = jobs_to_vms(jobs).vms
    assert len(vms) == 12
    for k, vm in enumerate(vms):
        assert vm.demand == catalog[k % len(catalog)].demand()


def test_restricted_catalog():
    catalog = select_catalog(default_vm_catalog(), [8])
    vms = jobs_to_vms([_job(1, 0, 0, 100, 3)], catalog).vms
    assert {vm.mips for vm in vms} == {1000}


def test_empty_catalog_is_an_input_error():
    with pytest.raises(InputDataError):
        select_catalog(default_vm_catalog(), [9])
    with pytest.raises(InputDataError):
        jobs_to_vms([_job(1, 0, 0, 100, 1)], ())


def test_repeated_job_id_is_rejected_before_scheduling():
    with pytest.raises(DuplicateJobId) as info:
        jobs_to_vms([_job(1, 0, 0, 100, 1), _job(2, 0, 0, 100, 1), _job(1, 60, 0, 100, 2)])
    assert info.value.job_id == 1


def test_trace_that_is_not_utf8_is_a_malformed_line(tmp_path):
    path = tmp_path / "bad.swf"
    path.write_bytes(b"1 0 10 3600 4\n; header \xff\xfe\n2 0 10 3600 4\n")
    with pytest.raises(MalformedLine) as info:
        load_trace(str(path))
    assert info.value.line_no == 2


def test_bundled_fixture(fixture_swf):
    jobs = load_trace(fixture_swf)
    assert len(jobs) == 50
    vms = jobs_to_vms(jobs).vms
    assert len(vms) == 125
    assert len({vm.id for vm in vms}) == 125

    first_ten = jobs_to_vms(load_trace(fixture_swf, first_jobs=10)).vms
    assert len(first_ten) == 25
    job10 = [vm for vm in first_ten if vm.id.startswith("10-")]
    assert len(job10) == 3
    assert all(vm.start == 5470 and vm.duration == 7930 for vm in job10)
    assert load_trace(fixture_swf, first_jobs=0) == []


# ── catalogs and fleets ──
def test_catalog_values():
    catalog = default_vm_catalog()
    assert len(catalog) == 8
    assert catalog[1].demand() == (2, 5000, 1700, 100, 422.5)
    m2 = HOST_TYPES["M2"].spec("x")
    assert m2.capacity.mips == 52000 and m2.power.p_idle == 420


def test_host_overrides():
    types = host_catalog({"M1": {"cores": 10, "per_core_mips": 1000}})
    spec = types["M1"].spec("h")
    assert spec.capacity.cores == 10 and spec.capacity.mips == 10000
    assert spec.power.p_max == 300
    with pytest.raises(InputDataError):
        host_catalog({"M9": {"cores": 1}})


def test_fleet_by_counts_and_by_total():
    fleet = default_fleet({"M1": 2, "M3": 1})
    assert [h.id for h in fleet] == ["host-00000", "host-00001", "host-00002"]
    assert [h.kind for h in fleet] == ["M1", "M1", "M3"]
    assert [h.kind for h in default_fleet(total=5)] == ["M1", "M2", "M3", "M1", "M2"]
    assert default_fleet(total=0) == []
    with pytest.raises(InputDataError):
        default_fleet({"M1": -1})


# ── synthetic workloads ──
def test_synthetic_workload_is_seeded():
    a = synthetic_workload(200, 86400, 7)
    b = synthetic_workload(200, 86400, 7)
    c = synthetic_workload(200, 86400, 8)
    assert a == b
    assert a != c


def test_synthetic_workload_shape():
    catalog = default_vm_catalog()
    demands = {t.demand() for t in catalog}
    vms = synthetic_workload(500, 86400, 3)
    assert len(vms) == 500 and len({vm.id for vm in vms}) == 500
    for vm in vms:
        assert 0 <= vm.start < 86400 and vm.start == int(vm.start)
        assert 600 <= vm.duration <= 43200
        assert vm.demand in demands
    assert synthetic_workload(0, 86400, 3) == []


def test_vm_csv_round_trip(tmp_path):
    vms = synthetic_workload(40, 86400, 11)
    path = tmp_path / "vms.csv"
    with open(path, "w", encoding="utf-8") as fp:
        write_vm_csv(vms, fp)
    back = read_vm_csv(str(path))
    assert [vm.id for vm in back] == [vm.id for vm in vms]
    for before, after in zip(vms, back):
        assert after.interval == before.interval
        assert after.demand == before.demand
        assert after.per_core_mips == before.per_core_mips


def test_vm_csv_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,start_s\nv,0\n")
    with pytest.raises(InputDataError):
        read_vm_csv(str(path))
