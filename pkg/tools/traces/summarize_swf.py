#!/usr/bin/env python3
"""
SWF Trace Summary
Job count, dropped jobs, and how many VMs the first N jobs turn into.
"""
import os
import sys
import argparse
from collections import Counter

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from busytime.errors import InputDataError
from busytime.ingest import jobs_to_vms, load_trace

PREFIXES = [10, 50, 100, 400, 1000]


def summarize_swf(path, prefixes):
    jobs = load_trace(path)
    conversion = jobs_to_vms(jobs)

    print(f"📄 {os.path.basename(path)}")
    print("=" * 60)
    print(f"Jobs:            {len(jobs)}")
    print(f"Dropped jobs:    {conversion.dropped}")
    print(f"VMs (all jobs):  {len(conversion.vms)}")
    if conversion.vms:
        start = min(vm.start for vm in conversion.vms)
        end = max(vm.end for vm in conversion.vms)
        print(f"Time span:       {start:.0f} s .. {end:.0f} s ({(end - start) / 86400:.2f} days)")
        mean_h = sum(vm.duration for vm in conversion.vms) / len(conversion.vms) / 3600
        print(f"Mean duration:   {mean_h:.2f} h")

    procs = Counter(max(job.requested_processors, job.allocated_processors) for job in jobs)
    print("\n📊 Processor counts (top 5):")
    for count, jobs_with in procs.most_common(5):
        print(f"   • {count:>4} procs: {jobs_with} job(s)")

    print("\n📊 VMs produced by the first N jobs:")
    for n in prefixes:
        if n > len(jobs):
            break
        print(f"   • first {n:>5} jobs -> {len(jobs_to_vms(jobs[:n]).vms)} VMs")


def main():
    parser = argparse.ArgumentParser(description="Summarize an SWF trace")
    parser.add_argument("trace", help="path to an .swf file")
    parser.add_argument("--first", type=int, action="append", help="extra job prefix sizes to report")
    args = parser.parse_args()
    prefixes = sorted(set(PREFIXES + (args.first or [])))
    try:
        summarize_swf(args.trace, prefixes)
    except (InputDataError, OSError) as exc:
        sys.exit(f"✖  {exc}")


if __name__ == "__main__":
    main()
