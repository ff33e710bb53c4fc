#!/usr/bin/env python3
import os
import subprocess
import sys

import pexpect

from conftest import REPO_ROOT


def _env(**extra):
    env = {k: v for k, v in os.environ.items() if not k.startswith("BUSYTIME_")}
    env["BUSYTIME_LOG_LEVEL"] = "WARNING"
    env.update(extra)
    return env


def _simulate(*args, **env):
    return subprocess.run(
        [sys.executable, "simulate.py", *args],
        cwd=REPO_ROOT,
        env=_env(**env),
        capture_output=True,
        text=True,
        timeout=300,
    )


def test_compare_is_byte_identical_across_runs():
    first = _simulate("compare", "--config", "samples/configs/fixture.env")
    second = _simulate("compare", "--config", "samples/configs/fixture.env")
    assert first.returncode == 0, first.stderr
    assert first.stdout == second.stdout
    lines = first.stdout.splitlines()
    assert lines[0].startswith("algorithm,hosts,vms_placed")
    assert len(lines) == 9


def test_compare_writes_json_to_file(tmp_path):
    out = tmp_path / "report.json"
    result = _simulate("compare", "--config", "samples/configs/fixture.env", "--format", "json", "--out", str(out))
    assert result.returncode == 0, result.stderr
    assert result.stdout == ""
    assert out.read_text(encoding="utf-8").lstrip().startswith("[")


def test_convert_fixture():
    result = _simulate("convert", "--trace", "samples/traces/fixture_50.swf")
    assert result.returncode == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "id,start_s,duration_s,cores,mips,ram_mb,net_mbits,storage_gb"
    assert len(lines) == 126

    empty = _simulate("convert", "--trace", "samples/traces/fixture_50.swf", "--first-jobs", "0")
    assert empty.returncode == 0
    assert empty.stdout.splitlines() == [lines[0]]


def test_missing_trace_is_an_input_error():
    result = _simulate("convert", "--trace", "samples/traces/nope.swf")
    assert result.returncode == 2
    assert "✖" in result.stderr
    assert _simulate("convert").returncode == 2


def test_undecodable_trace_is_an_input_error(tmp_path):
    bad = tmp_path / "bad.swf"
    bad.write_bytes(b"; header \xff\xfe\n1 0 10 3600 4\n")
    result = _simulate("convert", "--trace", str(bad))
    assert result.returncode == 2
    assert "not valid UTF-8" in result.stderr
    assert "Traceback" not in result.stderr


def test_repeated_job_id_is_an_input_error(tmp_path):
    trace = tmp_path / "dup.swf"
    trace.write_text("1 0 10 3600 4\n1 60 10 3600 2\n", encoding="utf-8")
    result = _simulate("convert", "--trace", str(trace))
    assert result.returncode == 2
    assert "job id 1" in result.stderr


def test_unknown_algorithm_from_environment():
    result = _simulate("compare", "--config", "samples/configs/fixture.env", BUSYTIME_ALGORITHMS="EM-XYZ")
    assert result.returncode == 1
    assert "EM-XYZ" in result.stderr


def test_usage_errors():
    assert _simulate("explode").returncode == 1
    assert _simulate("--help").returncode == 0
    assert _simulate("compare", "--config", "samples/configs/missing.env").returncode == 1


def test_verify_refuses_mixed_fleet():
    assert _simulate("verify").returncode == 1


def test_verify_homogeneous_fleet():
    result = _simulate(
        "verify", "--config", "samples/configs/homogeneous_m1.env",
        BUSYTIME_VERIFY_INSTANCES="5", BUSYTIME_VERIFY_MAX_VMS="20",
    )
    assert result.returncode == 0, result.stderr
    assert "PASS" in result.stdout
    assert "instances: 5" in result.stdout


def test_run_counter_example_summaries():
    child = pexpect.spawn(
        sys.executable, ["-u", "simulate.py", "run", "--config", "samples/configs/counter_example.env"],
        cwd=REPO_ROOT, env=_env(), timeout=120, encoding="utf-8",
    )
    child.expect("baseline PABFD")
    child.expect("PABFD")
    child.expect("Busy time: 38.00 h")
    child.expect("EM-LDTF")
    child.expect("Busy time: 22.00 h")
    child.expect("run complete")
    child.expect(pexpect.EOF)
    child.close()
    assert child.exitstatus == 0
