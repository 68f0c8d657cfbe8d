"""Asymptotic power of the known-parameter test versus pixel count.

Prints one CSV row per (sigma, N, alpha0, rate) for a constant scene at
theta=128; the defaults sweep the noise levels and rates used in the tests.
"""
import argparse
import csv
import sys

import numpy as np

from lsbm.lrt import ParamField, moments_r2, power_general


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, default=128.0)
    ap.add_argument("--sigmas", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--rates", type=float, nargs="+", default=[0.1, 0.5, 1.0])
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.1, 0.01])
    ap.add_argument("--max-log10-n", type=int, default=6)
    args = ap.parse_args()

    sizes = np.unique(np.logspace(1, args.max_log10_n, 6 * (args.max_log10_n - 1) + 1).astype(int))
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["sigma", "n_pixels", "alpha0", "rate", "power"])
    for sigma in args.sigmas:
        m = moments_r2(ParamField.constant(args.theta, sigma, 1))
        for n in sizes:
            for alpha0 in args.alphas:
                for rate in args.rates:
                    out.writerow([sigma, n, alpha0, rate, f"{power_general(alpha0, m, int(n), rate):.6f}"])


if __name__ == "__main__":
    main()
