"""Monte Carlo estimators with normal-theory confidence intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, ModelError
from .samplers import standard_normals

__all__ = [
    "EstimateReport",
    "ImportanceSpec",
    "ConvergenceTable",
    "z_quantile",
    "estimate_mean",
    "estimate_mean_sharded",
    "integrate_interval",
    "importance_estimate",
    "estimate_tail_naive",
    "pool_reports",
    "convergence_study",
    "midpoint_rule",
    "midpoint_study",
    "loglog_slope",
    "normal_cauchy_delta",
]

# two-sided levels quoted to the usual table precision
_Z_TABLE = {0.90: 1.645, 0.95: 1.96, 0.99: 2.576, 0.999: 3.29}


def z_quantile(level: float) -> float:
    """Two-sided normal quantile ``z_{1-alpha/2}`` for ``level = 1 - alpha``."""
    if not 0.0 < level < 1.0:
        raise ConfigError(f"confidence level must lie in (0, 1), got {level}")
    for key, z in _Z_TABLE.items():
        if abs(level - key) < 1e-12:
            return z
    return NormalDist().inv_cdf(0.5 + level / 2.0)


@dataclass(frozen=True)
class EstimateReport:
    mean: float
    std: float
    n: int
    level: float = 0.95
    half_width: float = 0.0

    @classmethod
    def from_values(cls, values, level: float = 0.95, scale: float = 1.0) -> "EstimateReport":
        """Report for the sample mean of ``values`` times ``scale``."""
        values = np.asarray(values, dtype=float).ravel()
        n = values.size
        if n < 2:
            raise ConfigError(f"need at least 2 samples for a variance, got {n}")
        mean = float(values.mean())
        std = float(values.std(ddof=1))
        return cls.from_moments(scale * mean, abs(scale) * std, n, level)

    @classmethod
    def from_moments(cls, mean: float, std: float, n: int, level: float = 0.95) -> "EstimateReport":
        z = z_quantile(level)
        return cls(float(mean), float(std), int(n), float(level), z * float(std) / math.sqrt(n))

    @property
    def std_error(self) -> float:
        return self.std / math.sqrt(self.n)

    @property
    def ci(self) -> tuple[float, float]:
        return self.mean - self.half_width, self.mean + self.half_width

    def covers(self, value: float) -> bool:
        lo, hi = self.ci
        return lo <= value <= hi

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "n": self.n,
            "level": self.level,
            "half_width": self.half_width,
        }


def pool_reports(reports: Sequence[EstimateReport]) -> EstimateReport:
    """Merge shard reports as if all samples had gone into one estimate."""
    if not reports:
        raise ConfigError("nothing to pool")
    level = reports[0].level
    n = sum(r.n for r in reports)
    mean = sum(r.n * r.mean for r in reports) / n
    # within-shard plus between-shard sums of squares
    ss = sum((r.n - 1) * r.std**2 + r.n * (r.mean - mean) ** 2 for r in reports)
    return EstimateReport.from_moments(mean, math.sqrt(ss / (n - 1)), n, level)


def estimate_mean(g: Callable, sampler: Callable, n: int, stream, level: float = 0.95) -> EstimateReport:
    """Sample-mean estimate of ``E[g(X)]``.

    Parameters
    ----------
    g : callable
        Vectorized performance function.
    sampler : callable
        ``sampler(stream, n)`` returning ``n`` variates of ``X``.
    n : int
        Sample size, at least 2.
    """
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    x = sampler(stream, n)
    return EstimateReport.from_values(np.broadcast_to(g(x), (n,)), level)


def estimate_mean_sharded(
    g: Callable, sampler: Callable, n: int, stream, shards: int, level: float = 0.95
) -> EstimateReport:
    """Split ``n`` over substreams ``0..shards-1`` and pool the results."""
    if shards < 1 or n < 2 * shards:
        raise ConfigError(f"need shards >= 1 and n >= 2*shards, got {shards}, {n}")
    sizes = [n // shards + (1 if i < n % shards else 0) for i in range(shards)]
    reports = [estimate_mean(g, sampler, m, stream.spawn(i), level) for i, m in enumerate(sizes)]
    return pool_reports(reports)


def integrate_interval(g: Callable, a: float, b: float, n: int, stream, level: float = 0.95) -> EstimateReport:
    """``(b - a)`` times the mean of ``g`` over uniform points in ``[a, b)``."""
    if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
        raise ConfigError(f"need finite a < b, got a={a}, b={b}")
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    x = a + (b - a) * stream.uniforms(n)
    return EstimateReport.from_values(np.broadcast_to(g(x), (n,)), level, scale=b - a)


@dataclass(frozen=True)
class ImportanceSpec:
    """Target density, envelope density, performance and envelope sampler.

    With ``self_normalized`` the densities may be known only up to
    constants, since both cancel in the weighted quotient.
    """

    target_pdf: Callable
    envelope_pdf: Callable
    performance: Callable
    envelope_sampler: Callable
    self_normalized: bool = False


def importance_estimate(spec: ImportanceSpec, n: int, stream, level: float = 0.95) -> EstimateReport:
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    x = spec.envelope_sampler(stream, n)
    f = np.broadcast_to(np.asarray(spec.target_pdf(x), dtype=float), (n,))
    ell = np.broadcast_to(np.asarray(spec.envelope_pdf(x), dtype=float), (n,))
    gv = np.broadcast_to(np.asarray(spec.performance(x), dtype=float), (n,))
    bad = (ell <= 0) & (gv * f != 0)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ModelError(f"envelope support violated at x={np.asarray(x)[i]!r}: l=0 but g*f != 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(ell > 0, f / ell, 0.0)
    if not spec.self_normalized:
        return EstimateReport.from_values(gv * w, level)
    wsum = w.sum()
    if wsum <= 0:
        raise ModelError("all importance weights are zero")
    est = float(np.dot(w, gv) / wsum)
    # delta-method spread of the ratio estimator
    wbar = wsum / n
    resid = w * (gv - est) / wbar
    std = float(np.sqrt(np.sum(resid**2) / (n - 1)))
    return EstimateReport.from_moments(est, std, n, level)


def estimate_tail_naive(t: float, n: int, stream, level: float = 0.95) -> EstimateReport:
    """Indicator-mean estimate of the standard normal cdf at ``t``."""
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    x = standard_normals(n, stream)
    return EstimateReport.from_values((x <= t).astype(float), level)


# ---------------------------------------------------------------------------
# convergence measurement


@dataclass(frozen=True)
class ConvergenceTable:
    n: np.ndarray
    error: np.ndarray
    slope: float | None

    def rows(self):
        return list(zip(self.n.tolist(), self.error.tolist()))


def loglog_slope(n, error) -> float | None:
    """Least-squares slope of ``log error`` against ``log n``; None for one point."""
    n = np.asarray(n, dtype=float)
    error = np.asarray(error, dtype=float)
    if n.size < 2:
        return None
    if np.any(error <= 0):
        raise ModelError("errors must be positive to fit a log-log slope")
    return float(np.polyfit(np.log(n), np.log(error), 1)[0])


def convergence_study(
    estimator: Callable, exact: float, n_grid: Sequence[int], replications: int, stream
) -> ConvergenceTable:
    """Mean absolute error of ``estimator(n, stream)`` for each ``n``.

    Grid point ``i`` and replication ``r`` use substream ``i * replications + r``.
    """
    if replications < 1 or len(n_grid) == 0:
        raise ConfigError("need a non-empty grid and at least one replication")
    errs = []
    for i, n in enumerate(n_grid):
        e = [abs(estimator(int(n), stream.spawn(i * replications + r)) - exact) for r in range(replications)]
        errs.append(float(np.mean(e)))
    grid = np.asarray(n_grid, dtype=np.int64)
    err = np.asarray(errs)
    return ConvergenceTable(grid, err, loglog_slope(grid, err))


def midpoint_rule(g: Callable, a: float, b: float, n: int) -> float:
    h = (b - a) / n
    x = a + h * (np.arange(n) + 0.5)
    return h * math.fsum(np.asarray(g(x), dtype=float))


def midpoint_study(g: Callable, a: float, b: float, exact: float, n_grid: Sequence[int]) -> ConvergenceTable:
    grid = np.asarray(n_grid, dtype=np.int64)
    err = np.array([abs(midpoint_rule(g, a, b, int(n)) - exact) for n in grid])
    return ConvergenceTable(grid, err, loglog_slope(grid, err))


# ---------------------------------------------------------------------------


def normal_cauchy_delta(t: float, n: int, stream, level: float = 0.95) -> EstimateReport:
    """Posterior mean of a Cauchy location given one N(theta, 1) observation ``t``.

    Both the numerator ``E[X/(1+X^2)]`` and denominator ``E[1/(1+X^2)]`` are
    estimated from the same draws ``X ~ N(t, 1)``. The spread is the
    delta-method standard deviation of the ratio.
    """
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    x = t + standard_normals(n, stream)
    den = 1.0 / (1.0 + x * x)
    num = x * den
    ratio = float(num.mean() / den.mean())
    resid = (num - ratio * den) / den.mean()
    return EstimateReport.from_moments(ratio, float(resid.std(ddof=1)), n, level)
