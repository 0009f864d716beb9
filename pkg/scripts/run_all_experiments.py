#!/usr/bin/env python3
"""Run every verification experiment at default scale and summarize.

Reports and raw samples land in out/<experiment>/; exit code is nonzero
if any experiment fails its pass predicate.

    python scripts/run_all_experiments.py [--out out] [--seed 1] [--workers 1]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from liouville_lab.experiments import EXPERIMENTS, run_experiment  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    failures = 0
    for name in EXPERIMENTS:
        report = run_experiment(
            name,
            overrides=[f"seed={args.seed}", f"workers={args.workers}"],
            out_dir=Path(args.out) / name,
        )
        status = "PASS" if report.passed else "FAIL"
        failures += 0 if report.passed else 1
        print(f"{name:>16}: {status}  ({report.runtime_seconds:.1f}s)")
        for key, value in report.metrics.items():
            print(f"{'':>18}{key} = {value:.6g}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
