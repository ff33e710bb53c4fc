#!/usr/bin/env python3
"""
EVALUATION: Scaling
Times EM-LDTF and PABFD for growing workload and fleet sizes and checks
that every run visits each (VM, host) pair exactly once.
"""
import os
import sys
import time
import argparse

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from busytime.ingest import default_fleet, synthetic_workload
from busytime.schedulers import SchedulerConfig, run_scheduler

SIZES = [(500, 100), (1000, 200), (2500, 400), (5000, 700), (10000, 1000)]


def evaluate_scaling(sizes, algorithms):
    print("⏱️  EVALUATION: SCALING")
    print("=" * 60)
    print(f"{'algorithm':<10} {'VMs':>7} {'hosts':>6} {'seconds':>9} {'pairs':>12}  check")
    print("-" * 60)
    for n, m in sizes:
        vms = synthetic_workload(n, 86400, n)
        hosts = default_fleet(total=m)
        for name in algorithms:
            started = time.perf_counter()
            schedule = run_scheduler(vms, hosts, SchedulerConfig.from_name(name))
            elapsed = time.perf_counter() - started
            ok = schedule.stats.pair_visits == n * m
            print(f"{name:<10} {n:>7} {m:>6} {elapsed:>9.2f} {schedule.stats.pair_visits:>12}  {'✓' if ok else '✖'}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--max-vms", type=int, default=10000, dest="max_vms")
    parser.add_argument("--algorithms", default="EM-LDTF,PABFD")
    args = parser.parse_args()
    sizes = [(n, m) for n, m in SIZES if n <= args.max_vms]
    evaluate_scaling(sizes, [a.strip() for a in args.algorithms.split(",")])


if __name__ == "__main__":
    main()
