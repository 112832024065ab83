#!/usr/bin/env python3
"""Measure how fast the series term ratio approaches its asymptote.

For the series sum_k t^{k alpha} / Gamma_q(k alpha + 1) at t = 1 the
consecutive-term ratio tends to (1-q)^alpha.  This script tabulates the
measured ratio and its gap to the limit for a grid of (q, alpha) pairs and
term indices, writing one CSV row per measurement.

Usage:
    python scripts/ratio_study.py [--k-max 60] [--out ratio_study.csv]
"""
import argparse
import sys
from pathlib import Path

from qfrac.qcore import gamma_q
from qfrac.special import convergence_ratio_estimate


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-max", type=int, default=60)
    ap.add_argument("--out", type=Path, default=Path("ratio_study.csv"))
    args = ap.parse_args()

    rows = ["q,alpha,k,measured_ratio,limit,gap"]
    for q in (0.3, 0.5, 0.7, 0.9):
        for alpha in (0.25, 0.5, 0.9):
            limit = convergence_ratio_estimate(alpha, q, 1.0, 0.0, 1.0)
            prev = 1.0 / gamma_q(alpha + 1.0, q)
            for k in range(2, args.k_max + 1):
                term = 1.0 / gamma_q(k * alpha + 1.0, q)
                ratio = term / prev
                prev = term
                if k % 5 == 0:
                    rows.append(
                        f"{q},{alpha},{k},{ratio:.17g},{limit:.17g},{abs(ratio - limit):.3e}"
                    )
    args.out.write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"wrote {len(rows) - 1} measurements -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
