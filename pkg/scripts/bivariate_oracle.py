"""Normalizer, mean and variance of exp(-(x^2 y^2 + x^2 + y^2 - 8x - 8y)/2) by 2-d quadrature."""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np
from scipy import integrate


@dataclass
class BoxConfig:
    lo: float = -8.0
    hi: float = 16.0


def moments(cfg: BoxConfig):
    def f(y, x):
        return np.exp(-0.5 * (x * x * y * y + x * x + y * y - 8 * x - 8 * y))

    opts = dict(epsabs=1e-12, epsrel=1e-12)
    z = integrate.dblquad(f, cfg.lo, cfg.hi, cfg.lo, cfg.hi, **opts)[0]
    m1 = integrate.dblquad(lambda y, x: x * f(y, x), cfg.lo, cfg.hi, cfg.lo, cfg.hi, **opts)[0] / z
    m2 = integrate.dblquad(lambda y, x: x * x * f(y, x), cfg.lo, cfg.hi, cfg.lo, cfg.hi, **opts)[0] / z
    return z, m1, m2 - m1 * m1


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=-8.0)
    ap.add_argument("--hi", type=float, default=16.0)
    args = ap.parse_args(argv)
    z, mean, var = moments(BoxConfig(args.lo, args.hi))
    print(f"box=[{args.lo}, {args.hi}]^2 Z={z:.6f} E[X1]={mean:.7f} Var[X1]={var:.15g}")


if __name__ == "__main__":
    main()
