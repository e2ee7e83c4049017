#!/usr/bin/env python3
"""
Example script running the uniform-bound sweep for every supported k2.

This script shows how to:
1. Generate a seeded point grid
2. Run a proposition sweep for each k2 in {0, 1/2, 1, 2}
3. Compare sequential and multi-process runs of the same sweep

Usage:
    python example_sweep.py [workers]
"""

import sys
import time

from main import configure_logging
from models import PROPOSITION12_K2, SweepConfig
from verify import generate_points, run_sweep

MU_GRID = [10.0, 100.0, 1000.0]
POINTS = 12
SEED = 2024


def run_with_timing(config: SweepConfig, workers: int):
    """Run one sweep and measure wall time."""
    start = time.time()
    report = run_sweep(config, workers=workers)
    return report, time.time() - start


def main():
    workers = int(sys.argv[1]) if len(sys.argv) > 1 else 2
    configure_logging()

    print("Uniform bound sweep, N=2")
    print("=" * 60)
    points = generate_points(2, POINTS, SEED)

    total_sequential = 0.0
    total_parallel = 0.0
    for k2 in PROPOSITION12_K2:
        config = SweepConfig(
            subject="prop12",
            N=2,
            k2=k2,
            mu_grid=[mu + 2 * k2 for mu in MU_GRID],
            point_grid=points,
            seed=SEED,
        )
        sequential, t_seq = run_with_timing(config, 1)
        parallel, t_par = run_with_timing(config, workers)
        total_sequential += t_seq
        total_parallel += t_par

        order = sequential.convergence_order.median if sequential.convergence_order else None
        print(f"\nk2 = {k2:g}")
        print("-" * 40)
        print(f"Empirical constant: {sequential.empirical_constant:.6g}")
        print(f"Median convergence order: {order:.3f}" if order is not None else "Median convergence order: n/a")
        print(f"Pass: {sequential.passed}")
        print(f"Sequential {t_seq:.2f}s, {workers} workers {t_par:.2f}s")
        if sequential.model_dump() != parallel.model_dump():
            print("Reports differ between worker counts")
            sys.exit(1)

    print("\nSUMMARY")
    print("=" * 60)
    print(f"Total sequential time: {total_sequential:.2f} seconds")
    print(f"Total time with {workers} workers: {total_parallel:.2f} seconds")


if __name__ == "__main__":
    main()
