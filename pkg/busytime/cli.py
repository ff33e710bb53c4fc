"""
Command-line driver: convert / run / compare / verify.

Exit codes: 0 success, 1 usage or config error, 2 input data error,
3 verification failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
import textwrap
from typing import Dict, List, Optional

from busytime.config import ExperimentConfig, load_config
from busytime.errors import BusyTimeError, InputDataError
from busytime.experiment import RunReport, compare_algorithms, format_report, run_experiment
from busytime.ingest import jobs_to_vms, load_trace, write_vm_csv
from busytime.verification import verify_theorems

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INPUT = 2
EXIT_VERIFY = 3


def print_box(title: str, text: str, stream=None) -> None:
    stream = stream or sys.stdout
    lines = [piece for raw in text.splitlines() for piece in (textwrap.wrap(raw, 78) or [""])]
    width = max(len(title), *(len(l) for l in lines)) + 4
    print("┌" + "─" * width + "┐", file=stream)
    print("│ " + title.center(width - 2) + " │", file=stream)
    print("├" + "─" * width + "┤", file=stream)
    for l in lines:
        print("│ " + l.ljust(width - 2) + " │", file=stream)
    print("└" + "─" * width + "┘", file=stream)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fp:
            fp.write(text)
        log.info("wrote %s", out)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _config(args: argparse.Namespace) -> ExperimentConfig:
    overrides: Dict[str, Optional[str]] = {
        "trace.path": args.trace,
        "trace.first_jobs": None if args.first_jobs is None else str(args.first_jobs),
        "seed": None if args.seed is None else str(args.seed),
        "output.format": args.format,
        "run.workers": None if args.workers is None else str(args.workers),
    }
    return load_config(args.config, overrides)


# ── subcommands ──────────────────────────────────────────────────────────────
def convert_trace(swf_path: str, out_path: Optional[str], first_jobs: Optional[int], config: ExperimentConfig) -> int:
    """Convert an SWF trace into a VM request CSV; returns the number of VMs written."""
    jobs = load_trace(swf_path, first_jobs)
    conversion = jobs_to_vms(jobs, config.vm_catalog())
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fp:
            write_vm_csv(conversion.vms, fp)
    else:
        write_vm_csv(conversion.vms, sys.stdout)
    log.info("converted %d job(s) into %d VM(s), %d dropped", len(jobs), len(conversion.vms), conversion.dropped)
    return len(conversion.vms)


def cmd_convert(args: argparse.Namespace) -> int:
    config = _config(args)
    if not config.trace_path:
        raise InputDataError("convert needs --trace or trace.path")
    convert_trace(config.trace_path, args.out, config.first_jobs, config)
    return EXIT_OK


def _summaries(report: RunReport) -> None:
    for row in report.rows:
        marker = "📊" if row.algorithm != report.baseline else "📊 (baseline)"
        print_box(
            f"{row.algorithm} {marker}",
            f"VMs placed: {row.vms_placed} / rejected: {row.vms_rejected}\n"
            f"Hosts used: {row.hosts_used} of {row.hosts}\n"
            f"Busy time: {row.busy_time_hours:.2f} h\n"
            f"Energy: {row.energy_kwh:.2f} kWh (normalized {row.normalized_energy:.2f}, saving {row.saving_percent:.0f}%)",
        )


def cmd_run(args: argparse.Namespace) -> int:
    config = _config(args)
    report = run_experiment(config)
    print("\n" + "=" * 60)
    print(f"🔬 {len(report.rows)} algorithm row(s), {report.vms_total} VMs, {report.hosts} hosts, baseline {report.baseline}")
    print("=" * 60)
    _summaries(report)
    if args.out:
        _emit(format_report(report, config.output_format), args.out)
    print("✓  run complete")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    _emit(compare_algorithms(_config(args)), args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = _config(args)
    report = verify_theorems(config)
    verdict = "✓  PASS" if report.passed else "✖  FAIL"
    text = report.summary()
    if report.failures:
        text += "\n" + "\n".join(report.failures[:10])
    print_box(f"VERIFY {verdict}", text)
    return EXIT_OK if report.passed else EXIT_VERIFY


# ── entry point ──────────────────────────────────────────────────────────────
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat dotted-key config file")
    common.add_argument("--trace", help="SWF trace (or converted VM CSV for run/compare)")
    common.add_argument("--first-jobs", type=int, dest="first_jobs", help="use only the first N trace jobs")
    common.add_argument("--format", choices=["csv", "json", "table"], help="report format")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, help="seed for synthetic workloads")
    common.add_argument("--workers", type=int, help="parallel algorithm runs")
    common.add_argument(
        "--log-level", dest="log_level", type=str.upper, choices=["DEBUG", "INFO", "WARNING", "ERROR"]
    )

    parser = argparse.ArgumentParser(
        prog="simulate.py",
        description="Energy-aware allocation of fixed-interval VMs: busy-time heuristics vs power-aware best fit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("convert", parents=[common], help="convert an SWF trace into a VM request CSV").set_defaults(func=cmd_convert)
    sub.add_parser("run", parents=[common], help="run the configured algorithms and print summaries").set_defaults(func=cmd_run)
    sub.add_parser("compare", parents=[common], help="emit the comparison report").set_defaults(func=cmd_compare)
    sub.add_parser("verify", parents=[common], help="check the energy/busy-time equivalence").set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.log_level:
        logging.getLogger().setLevel(args.log_level)
    try:
        return args.func(args)
    except BusyTimeError as exc:
        logging.error("%s: %s", type(exc).__name__, exc)
        print(f"✖  {exc}", file=sys.stderr)
        return exc.exit_code
    except (FileNotFoundError, IsADirectoryError) as exc:
        logging.error("input not readable: %s", exc)
        print(f"✖  {exc}", file=sys.stderr)
        return EXIT_INPUT
