"""Random variate generators driven by :mod:`simlab.rng` streams.

Every sampler takes the stream explicitly. Scalar calls return Python
numbers; passing ``size`` returns a numpy array drawn in one batch.

Uniforms live in ``[0, 1)``, so logarithms are always taken of ``1 - U``,
which lies in ``(0, 1]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, ModelError, NumericalError

__all__ = [
    "DiscreteDistribution",
    "cumulative",
    "search_cdf",
    "EnvelopeSpec",
    "MultiNormalSpec",
    "sample_exponential",
    "sample_discrete",
    "sample_bernoulli",
    "sample_binomial",
    "sample_binomial_normal_approx",
    "sample_poisson",
    "sample_inverse_transform",
    "sample_ordered_statistic",
    "sample_accept_reject",
    "sample_standard_normal",
    "standard_normals",
    "sample_normal_ar",
    "sample_multivariate_normal",
    "exponential_inverse",
    "weibull_inverse",
    "sine_inverse",
    "linear_density_inverse",
    "beta_a1_inverse",
    "beta_1b_inverse",
    "linear_density_envelope",
    "semicircle_envelope",
]

_TINY = np.nextafter(0.0, 1.0)


def cumulative(probs) -> np.ndarray:
    """Cumulative sums along the last axis, pinned to exactly 1 from the last
    positive entry onward so that trailing zero-mass states are unreachable."""
    probs = np.asarray(probs, dtype=float)
    cdf = np.cumsum(probs, axis=-1)
    pos = probs > 0
    last = probs.shape[-1] - 1 - np.argmax(pos[..., ::-1], axis=-1)
    cols = np.arange(probs.shape[-1])
    cdf[cols >= last[..., None]] = 1.0
    return cdf


def search_cdf(cdf: np.ndarray, u):
    """Smallest ``k`` with ``u <= cdf[k]``; ``u == 0`` is nudged up so
    leading zero-mass states are skipped."""
    return np.searchsorted(cdf, np.maximum(u, _TINY), side="left")


def _check_size(size):
    if size is None:
        return None
    size = int(size)
    if size < 0:
        raise ConfigError(f"size must be non-negative, got {size}")
    return size


def _draw(stream, size):
    return stream.next_uniform() if size is None else stream.uniforms(size)


# ---------------------------------------------------------------------------
# discrete laws


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite distribution over strictly increasing numeric states."""

    states: np.ndarray
    probs: np.ndarray
    cdf: np.ndarray = field(init=False, repr=False)

    def __init__(self, states: Sequence[float], probs: Sequence[float]):
        states = np.asarray(states)
        probs = np.asarray(probs, dtype=float)
        if states.ndim != 1 or probs.ndim != 1 or states.size != probs.size:
            raise ConfigError("states and probs must be 1-d and of equal length")
        if states.size == 0:
            raise ConfigError("distribution needs at least one state")
        if np.any(np.diff(states) <= 0):
            raise ConfigError("states must be strictly increasing")
        if np.any(~np.isfinite(probs)) or np.any(probs < 0):
            raise ConfigError("probabilities must be finite and non-negative")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ConfigError(f"probabilities sum to {probs.sum()!r}, not 1")
        cdf = cumulative(probs)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "cdf", cdf)

    @classmethod
    def uniform_over(cls, states: Sequence[float]) -> "DiscreteDistribution":
        m = len(states)
        return cls(states, np.full(m, 1.0 / m))

    def index_of(self, u):
        """Smallest index ``k`` with ``u <= F(x_k)``.

        ``u == 0`` is nudged up so zero-probability leading states are never
        returned.
        """
        return search_cdf(self.cdf, u)


def sample_discrete(dist: DiscreteDistribution, stream, size=None):
    size = _check_size(size)
    k = dist.index_of(_draw(stream, size))
    if size is None:
        return dist.states[int(k)].item()
    return dist.states[k]


def sample_bernoulli(p: float, stream, size=None):
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"p must lie in [0, 1], got {p}")
    size = _check_size(size)
    u = _draw(stream, size)
    if size is None:
        # u < 1 always, so p=1 gives 1; u=0 with p=0 is the one edge to close
        return int(u <= p and p > 0.0)
    return ((u <= p) & (p > 0.0)).astype(np.int64)


def sample_binomial(n: int, p: float, stream, size=None):
    """Sum of ``n`` Bernoulli(p) draws."""
    if n < 0:
        raise ConfigError(f"n must be non-negative, got {n}")
    size = _check_size(size)
    reps = 1 if size is None else size
    draws = sample_bernoulli(p, stream, size=reps * n).reshape(reps, n)
    out = draws.sum(axis=1)
    return int(out[0]) if size is None else out


def sample_binomial_normal_approx(n: int, p: float, stream, size=None):
    """Binomial approximated by N(np, np(1-p)), rounded and clipped to [0, n]."""
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ConfigError(f"need n >= 0 and p in [0, 1], got n={n}, p={p}")
    size = _check_size(size)
    z = standard_normals(1 if size is None else size, stream)
    x = np.clip(np.rint(n * p + math.sqrt(n * p * (1 - p)) * z), 0, n).astype(np.int64)
    return int(x[0]) if size is None else x


def _poisson_inversion(lam: float, u: np.ndarray) -> np.ndarray:
    k = np.zeros(u.shape, dtype=np.int64)
    pmf = math.exp(-lam)
    cdf = np.full(u.shape, pmf)
    active = u > cdf
    j = 0
    while np.any(active):
        j += 1
        pmf *= lam / j
        k[active] = j
        cdf = cdf + pmf
        active &= u > cdf
        if pmf == 0.0:
            # tail mass below double precision; stop at the current count
            break
    return k


def _poisson_ptrs(lam: float, stream) -> int:
    # transformed rejection with squeeze, valid for lam >= 10
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2)
    while True:
        u = stream.next_uniform() - 0.5
        v = stream.next_uniform()
        us = 0.5 - abs(u)
        k = math.floor((2 * a / us + b) * u + lam + 0.43) if us > 0 else -1
        if us >= 0.07 and v <= v_r:
            return k
        if k < 0 or (us < 0.013 and v > us):
            continue
        lhs = math.log(v) + math.log(inv_alpha) - math.log(a / (us * us) + b) if v > 0 else -math.inf
        if lhs <= -lam + k * loglam - math.lgamma(k + 1):
            return k


def sample_poisson(lam: float, stream, size=None):
    """Poisson variates: inversion below rate 10, transformed rejection above."""
    if not (lam >= 0 and math.isfinite(lam)):
        raise ConfigError(f"Poisson rate must be finite and >= 0, got {lam}")
    size = _check_size(size)
    if lam == 0:
        return 0 if size is None else np.zeros(size, dtype=np.int64)
    if lam < 10:
        k = _poisson_inversion(lam, np.atleast_1d(_draw(stream, size)))
        return int(k[0]) if size is None else k
    if size is None:
        return _poisson_ptrs(lam, stream)
    return np.array([_poisson_ptrs(lam, stream) for _ in range(size)], dtype=np.int64)


# ---------------------------------------------------------------------------
# inverse transform


def sample_exponential(lam: float, stream, size=None):
    if not lam > 0:
        raise ConfigError(f"rate must be positive, got {lam}")
    size = _check_size(size)
    u = _draw(stream, size)
    if size is None:
        return -math.log1p(-u) / lam
    return -np.log1p(-u) / lam


def sample_inverse_transform(cdf_inverse: Callable, stream, size=None):
    """Return ``cdf_inverse(U)``; with ``size`` the inverse must accept arrays."""
    size = _check_size(size)
    return cdf_inverse(_draw(stream, size))


def sample_ordered_statistic(cdf_inverse: Callable, n: int, which: str, stream, size=None):
    """Max or min of ``n`` iid draws from a single uniform.

    The max of ``n`` uniforms has cdf ``u**n``, so ``U**(1/n)`` is the max
    of the uniforms and ``1 - U**(1/n)`` is the min (by symmetry).
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if which not in ("min", "max"):
        raise ConfigError(f"which must be 'min' or 'max', got {which!r}")
    size = _check_size(size)
    u = _draw(stream, size)
    v = u ** (1.0 / n)
    return cdf_inverse(v if which == "max" else 1.0 - v)


def exponential_inverse(lam: float) -> Callable:
    if not lam > 0:
        raise ConfigError(f"rate must be positive, got {lam}")
    return lambda u: -np.log1p(-np.asarray(u)) / lam


def weibull_inverse(alpha: float, lam: float) -> Callable:
    """Weibull with shape ``alpha`` and scale ``lam``."""
    if not (alpha > 0 and lam > 0):
        raise ConfigError(f"Weibull needs alpha > 0 and lam > 0, got {alpha}, {lam}")
    return lambda u: lam * (-np.log1p(-np.asarray(u))) ** (1.0 / alpha)


def sine_inverse() -> Callable:
    """Density sin(x)/2 on [0, pi]; cdf (1 - cos x)/2."""
    return lambda u: np.arccos(1.0 - 2.0 * np.asarray(u))


def linear_density_inverse() -> Callable:
    """Density 2x on [0, 1]."""
    return lambda u: np.sqrt(u)


def beta_a1_inverse(alpha: float) -> Callable:
    if not alpha > 0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    return lambda u: np.asarray(u) ** (1.0 / alpha)


def beta_1b_inverse(beta: float) -> Callable:
    if not beta > 0:
        raise ConfigError(f"beta must be positive, got {beta}")
    return lambda u: 1.0 - (1.0 - np.asarray(u)) ** (1.0 / beta)


# ---------------------------------------------------------------------------
# acceptance-rejection


@dataclass(frozen=True)
class EnvelopeSpec:
    """Target density, proposal density, bound constant and proposal sampler.

    ``proposal_sampler(stream, size)`` must return an array of ``size``
    proposals. Densities must accept arrays.
    """

    target_pdf: Callable
    proposal_pdf: Callable
    C: float
    proposal_sampler: Callable

    def __post_init__(self):
        if not (math.isfinite(self.C) and self.C >= 1):
            raise ConfigError(f"envelope constant must be finite and >= 1, got {self.C}")


def _ar_round(env: EnvelopeSpec, m: int, stream):
    x = np.asarray(env.proposal_sampler(stream, m), dtype=float)
    u = stream.uniforms(m)
    f = np.asarray(env.target_pdf(x), dtype=float)
    cg = env.C * np.asarray(env.proposal_pdf(x), dtype=float)
    bad = f > cg * (1 + 1e-12) + 1e-300
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ModelError(
            f"envelope violated at x={x[i]!r}: f={f[i]!r} > C*g={cg[i]!r}"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(cg > 0, f / cg, 0.0)
    return x, u < ratio


def sample_accept_reject(env: EnvelopeSpec, stream, size=None, return_trials=False):
    """Draw from ``env.target_pdf`` by rejection from the proposal.

    With ``return_trials=True`` also returns the number of proposals used,
    counted up to and including the last accepted one.
    """
    size = _check_size(size)
    want = 1 if size is None else size
    out = np.empty(want)
    filled = 0
    trials = 0
    while filled < want:
        need = want - filled
        m = need if size is None else max(16, int(math.ceil(need * env.C * 1.1)))
        x, acc = _ar_round(env, m, stream)
        idx = np.flatnonzero(acc)
        if idx.size >= need:
            idx = idx[:need]
            trials += int(idx[-1]) + 1
        else:
            trials += m
        out[filled:filled + idx.size] = x[idx]
        filled += idx.size
    value = float(out[0]) if size is None else out
    return (value, trials) if return_trials else value


def linear_density_envelope() -> EnvelopeSpec:
    """f(x) = 2x on [0, 1] under a uniform proposal, C = 2."""
    return EnvelopeSpec(
        target_pdf=lambda x: np.where((x >= 0) & (x <= 1), 2.0 * x, 0.0),
        proposal_pdf=lambda x: np.where((x >= 0) & (x <= 1), 1.0, 0.0),
        C=2.0,
        proposal_sampler=lambda s, m: s.uniforms(m),
    )


def semicircle_envelope(radius: float = 1.0) -> EnvelopeSpec:
    """Semicircle density on [-R, R] under a uniform proposal, C = 4/pi."""
    if not radius > 0:
        raise ConfigError(f"radius must be positive, got {radius}")
    r = float(radius)

    def f(x):
        x = np.asarray(x)
        return 2.0 / (math.pi * r * r) * np.sqrt(np.clip(r * r - x * x, 0.0, None))

    return EnvelopeSpec(
        target_pdf=f,
        proposal_pdf=lambda x: np.where(np.abs(x) <= r, 1.0 / (2 * r), 0.0),
        C=4.0 / math.pi,
        proposal_sampler=lambda s, m: -r + 2 * r * s.uniforms(m),
    )


# ---------------------------------------------------------------------------
# normal variates


def standard_normals(n: int, stream, pair=False) -> np.ndarray:
    """Box-Muller, cosine branch; uniforms are consumed as (U1, U2) pairs.

    With ``pair=True`` returns an ``(n, 2)`` array holding both branches.
    """
    u = stream.uniforms(2 * int(n)).reshape(-1, 2)
    r = np.sqrt(-2.0 * np.log1p(-u[:, 1]))
    theta = 2.0 * math.pi * u[:, 0]
    if pair:
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    return r * np.cos(theta)


def sample_standard_normal(stream, size=None, pair=False):
    size = _check_size(size)
    if size is None:
        u1 = stream.next_uniform()
        u2 = stream.next_uniform()
        r = math.sqrt(-2.0 * math.log1p(-u2))
        if pair:
            return r * math.cos(2 * math.pi * u1), r * math.sin(2 * math.pi * u1)
        return r * math.cos(2 * math.pi * u1)
    return standard_normals(size, stream, pair=pair)


NORMAL_AR_C = math.sqrt(2 * math.e / math.pi)


def sample_normal_ar(stream, size=None, return_trials=False):
    """Standard normal by rejection from Exp(1) with a random sign.

    Each round draws two Exp(1) values ``V1, V2`` and accepts ``V2`` when
    ``V1 >= (V2 - 1)**2 / 2``; the sign is a fair Bernoulli draw.
    """
    size = _check_size(size)
    want = 1 if size is None else size
    out = np.empty(want)
    filled = 0
    rounds = 0
    while filled < want:
        need = want - filled
        m = need if size is None else max(16, int(math.ceil(need * NORMAL_AR_C * 1.1)))
        v = -np.log1p(-stream.uniforms(2 * m)).reshape(m, 2)
        acc = np.flatnonzero(v[:, 0] >= 0.5 * (v[:, 1] - 1.0) ** 2)
        if acc.size >= need:
            acc = acc[:need]
            rounds += int(acc[-1]) + 1
        else:
            rounds += m
        sign = np.where(sample_bernoulli(0.5, stream, size=acc.size) == 1, 1.0, -1.0)
        out[filled:filled + acc.size] = sign * v[acc, 1]
        filled += acc.size
    value = float(out[0]) if size is None else out
    return (value, rounds) if return_trials else value


@dataclass(frozen=True)
class MultiNormalSpec:
    """Mean vector and covariance; the lower Cholesky factor is cached."""

    mean: np.ndarray
    cov: np.ndarray
    chol: np.ndarray = field(init=False, repr=False)

    def __init__(self, mean, cov):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        d = mean.size
        if mean.ndim != 1 or cov.shape != (d, d):
            raise ConfigError(f"covariance must be {d}x{d}, got {cov.shape}")
        if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(mean)):
            raise ConfigError("mean and covariance must be finite")
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise ConfigError("covariance is not symmetric within 1e-12")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            eig = np.linalg.eigvalsh(cov)
            raise NumericalError(
                f"covariance is not positive definite (smallest eigenvalue {eig.min():.3e})"
            ) from exc
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "chol", chol)

    @property
    def dim(self) -> int:
        return self.mean.size


def sample_multivariate_normal(spec: MultiNormalSpec, n: int, stream) -> np.ndarray:
    """``n`` rows of ``mean + L z`` with ``z`` drawn row by row."""
    if n < 0:
        raise ConfigError(f"n must be non-negative, got {n}")
    z = standard_normals(n * spec.dim, stream).reshape(n, spec.dim)
    return spec.mean + z @ spec.chol.T
