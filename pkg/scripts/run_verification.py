#!/usr/bin/env python3
"""Run every verification suite and write the JSON report.

Usage:
    python scripts/run_verification.py [--seed 7] [--cases N] [--out report.json]
"""
import argparse
import json
import sys
import time
from pathlib import Path

from qfrac.verify import run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--cases", type=int, default=None)
    ap.add_argument("--out", type=Path, default=Path("verification_report.json"))
    args = ap.parse_args()

    t0 = time.perf_counter()
    report = run_suite("all", seed=args.seed, cases=args.cases)
    elapsed = time.perf_counter() - t0

    args.out.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"suites: all  cases: {report['cases']}  failures: {len(report['failures'])}  "
          f"elapsed: {elapsed:.1f}s  -> {args.out}")
    for failure in report["failures"]:
        print(f"  FAIL {failure}")
    worst = max(report["max_errors_by_property"].items(), key=lambda kv: kv[1])
    print(f"largest recorded error: {worst[0]} = {worst[1]:.3e}")
    return 1 if report["failures"] else 0


if __name__ == "__main__":
    sys.exit(main())
