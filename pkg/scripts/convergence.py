"""Error of plain Monte Carlo and the midpoint rule for the integral of sin over [0, 1]."""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

import numpy as np

from simlab import montecarlo
from simlab.rng import RandomStream


@dataclass
class ConvergenceConfig:
    seed: int = 0
    replications: int = 10
    exponents: tuple = (2, 3, 4, 5, 6)


def run(cfg: ConvergenceConfig):
    exact = 1.0 - math.cos(1.0)
    grid = [10**k for k in cfg.exponents]
    mc = montecarlo.convergence_study(
        lambda n, s: montecarlo.integrate_interval(np.sin, 0.0, 1.0, n, s).mean,
        exact, grid, cfg.replications, RandomStream(cfg.seed),
    )
    mid = montecarlo.midpoint_study(np.sin, 0.0, 1.0, exact, grid)
    return mc, mid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--replications", type=int, default=10)
    args = ap.parse_args(argv)
    mc, mid = run(ConvergenceConfig(args.seed, args.replications))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "mc_error", "midpoint_error"])
    for (n, e1), (_, e2) in zip(mc.rows(), mid.rows()):
        w.writerow([n, f"{e1:.6e}", f"{e2:.6e}"])
    print(f"# slopes: mc={mc.slope:.3f} midpoint={mid.slope:.3f}", file=sys.stderr)


if __name__ == "__main__":
    main()
