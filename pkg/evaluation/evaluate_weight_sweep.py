#!/usr/bin/env python3
"""
EVALUATION: Time-Weight Sweep
Shows how the EM variants react to the time weight w_time on one workload,
next to MinDFT (pure busy-time ranking) and PABFD.
"""
import os
import sys
import argparse

import pandas as pd

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from busytime.config import DEFAULT_SWEEP, load_config
from busytime.experiment import JOULES_PER_KWH, SECONDS_PER_HOUR, prepare_workload
from busytime.metrics import WeightConfig
from busytime.schedulers import SchedulerConfig, run_scheduler
from busytime.timeline import total_busy_time, total_energy


def evaluate_weight_sweep(config_path, sweep):
    config = load_config(config_path)
    vms, hosts = prepare_workload(config)

    print("⚖️  EVALUATION: TIME-WEIGHT SWEEP")
    print("=" * 60)
    print(f"{len(vms)} VMs on {len(hosts)} hosts, w_time in {list(sweep)}")
    print()

    rows = []
    for name in ("PABFD", "MinDFT-ST", "MinDFT-LDTF"):
        schedule = run_scheduler(vms, hosts, SchedulerConfig.from_name(name))
        rows.append((name, None, total_busy_time(schedule, hosts), total_energy(schedule, hosts)))
    for name in ("EM-ST", "EM-LFT", "EM-LDTF"):
        for w_time in sweep:
            weights = config.weights.with_time(w_time)
            scheduler = SchedulerConfig.from_name(name, weights, config.utilization_mode)
            schedule = run_scheduler(vms, hosts, scheduler)
            rows.append((name, w_time, total_busy_time(schedule, hosts), total_energy(schedule, hosts)))

    frame = pd.DataFrame(rows, columns=["algorithm", "w_time", "busy_s", "energy_j"])
    frame["busy_h"] = frame["busy_s"] / SECONDS_PER_HOUR
    frame["energy_kwh"] = frame["energy_j"] / JOULES_PER_KWH
    base = frame.loc[frame["algorithm"] == "PABFD", "energy_kwh"].iloc[0]
    frame["saving_%"] = (1.0 - frame["energy_kwh"] / base) * 100.0

    print(frame[["algorithm", "w_time", "busy_h", "energy_kwh", "saving_%"]].round(3).to_string(index=False))

    em = frame[frame["w_time"].notna()]
    spread = em.groupby("algorithm")["energy_kwh"].agg(lambda s: s.max() - s.min())
    print("\n📊 Energy spread across the sweep (kWh):")
    for name, value in spread.items():
        print(f"   • {name}: {value:.3f}")
    return frame


def main():
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--config", help="experiment config file (defaults: synthetic workload)")
    parser.add_argument("--sweep", help="comma-separated w_time values")
    args = parser.parse_args()
    sweep = [float(v) for v in args.sweep.split(",")] if args.sweep else list(DEFAULT_SWEEP)
    evaluate_weight_sweep(args.config, sweep)


if __name__ == "__main__":
    main()
