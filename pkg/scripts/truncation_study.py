#!/usr/bin/env python3
"""Truncation-height study for the contour-integral partial-sum recovery.

Sweeps the truncation height over a dyadic range for a fixed polynomial
family and records the absolute error against the exact partial sum.
The error oscillates inside a ~1/height envelope, so individual heights
can beat or trail the trend; the CSV makes the envelope visible.
"""

import argparse

from bvlab.arith import build_tables
from bvlab.characters import character_group
from bvlab.dpoly import DirichletPolynomial
from bvlab.perron import height_trend, write_perron_csv


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--y", type=float, default=10.5)
    ap.add_argument("--min-exp", type=int, default=10)
    ap.add_argument("--max-exp", type=int, default=20)
    ap.add_argument("--out", default="truncation_study.csv")
    args = ap.parse_args()

    tables = build_tables(100)
    chi = character_group(1)[0]
    P = DirichletPolynomial(N=4, N_prime=8, kind="unit", chi=chi)
    P.attach_tables(tables)
    heights = tuple(float(2**k) for k in range(args.min_exp, args.max_exp + 1))
    results = height_trend([P], args.y, heights)
    for r in results:
        print(f"height={r.height:>12.0f} error={r.abs_error:.3e}")
    write_perron_csv(results, args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
