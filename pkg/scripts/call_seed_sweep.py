"""European call price across root seeds: how often each acceptance condition holds."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from simlab import processes
from simlab.rng import RandomStream
from simlab.scenarios import black_scholes_call


@dataclass
class SweepConfig:
    seeds: int = 50
    n: int = 10_000
    dt: float = 1e-3
    reference: float = 10.0314
    tolerance: float = 0.6


def run(cfg: SweepConfig):
    args = (102.0, 100.0, 0.04, 0.3, 0.5)
    bs = black_scholes_call(*args)
    reps = [processes.price_european_call(*args, cfg.dt, cfg.n, RandomStream(s).spawn(0)) for s in range(cfg.seeds)]
    near = np.array([abs(r.mean - cfg.reference) < cfg.tolerance for r in reps])
    covers = np.array([r.covers(bs) for r in reps])
    return bs, reps, near, covers


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=50)
    args = ap.parse_args(argv)
    bs, reps, near, covers = run(SweepConfig(seeds=args.seeds))
    prices = np.array([r.mean for r in reps])
    print(f"Black-Scholes={bs:.4f} mean price={prices.mean():.4f} sd across seeds={prices.std(ddof=1):.4f}")
    print(f"within tolerance of reference: {near.mean():.2f}; CI covers BS: {covers.mean():.2f}; both: {(near & covers).mean():.2f}")


if __name__ == "__main__":
    main()
