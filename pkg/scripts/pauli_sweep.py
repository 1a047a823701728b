#!/usr/bin/env python3
"""Sweep the spin angle and tabulate the weak Pauli suite.

Writes a plot-ready CSV (angle, computed quantities, targets, residuals)
and prints a short table.  Example:

    python scripts/pauli_sweep.py --points 25 --out pauli_sweep.csv
"""

import argparse
import csv
import math

from weaklab.experiments import pauli_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=21, help="sweep points")
    ap.add_argument("--span", type=float, default=5 * math.pi / 6,
                    help="sweep alpha in [-span, span]")
    ap.add_argument("--out", default="pauli_sweep.csv")
    args = ap.parse_args()

    rows = []
    for j in range(args.points):
        alpha = -args.span + 2 * args.span * j / (args.points - 1)
        r = pauli_suite(alpha)
        rows.append([alpha, r.tan_half, r.sxsy.imag, r.sysx.imag,
                     r.sz_w.real, r.commutator.imag, r.max_residual])

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "tan_half", "sxsy_im", "sysx_im", "sz_w",
                    "commutator_im", "max_residual"])
        for row in rows:
            w.writerow([repr(float(v)) for v in row])

    print(f"{'alpha':>9} {'tan(a/2)':>10} {'Im<sxsy>':>10} {'2 Im<sz>':>10} {'resid':>9}")
    for alpha, t, sxsy_im, _, sz, comm_im, resid in rows:
        print(f"{alpha:9.4f} {t:10.6f} {sxsy_im:10.6f} {comm_im:10.6f} {resid:9.2e}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
