#!/usr/bin/env python3
"""Stress the closed-form Laplacian against the numeric oracle.

Draws seeded random graph charts over the 3- and 5-dimensional
Heisenberg groups, evaluates both routes at interior points, and prints
the worst coefficient gap per group (absolute, and relative to the
acceptance allowance max(5e-4, 5e-4 |closed|)).
"""

import argparse
import time

import numpy as np

from nilgauss import closed_form_report, exp_model, heisenberg, laplacian_numeric, random_graph_chart


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--charts", type=int, default=10)
    parser.add_argument("--points", type=int, default=5)
    args = parser.parse_args()

    for m in (1, 2):
        alg = heisenberg(m)
        model = exp_model(alg)
        rng = np.random.default_rng(args.seed + m)
        worst_abs = 0.0
        worst_rel = 0.0
        t0 = time.perf_counter()
        for _ in range(args.charts):
            chart = random_graph_chart(model, rng)
            for u in rng.uniform(-0.45, 0.45, size=(args.points, alg.n)):
                rep, frame, _ = closed_form_report(chart, u)
                num = laplacian_numeric(chart, u, frame=frame)
                gap = np.abs(rep.coeffs - num.coeffs)
                allowed = np.maximum(5e-4, 5e-4 * np.abs(rep.coeffs))
                worst_abs = max(worst_abs, gap.max())
                worst_rel = max(worst_rel, (gap / allowed).max())
        dt = time.perf_counter() - t0
        print(f"heisenberg({m}): {args.charts} charts x {args.points} points  "
              f"worst gap {worst_abs:.3e}  worst gap/allowance {worst_rel:.4f}  ({dt:.1f}s)")


if __name__ == "__main__":
    main()
