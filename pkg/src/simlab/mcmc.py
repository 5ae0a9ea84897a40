"""Metropolis-Hastings sampling and the Bayesian studies built on it.

All targets are log-densities known up to an additive constant. The
acceptance test is ``U < exp(min(delta, 0))`` where ``delta`` is the
log-ratio including the proposal correction; with ``U`` in ``[0, 1)``
a proposal with ``delta = -inf`` is never accepted.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, ModelError
from .markov import TransitionMatrix, as_probability_vector
from .montecarlo import EstimateReport, z_quantile
from .processes import DiffusionSpec, euler_maruyama_terminal
from .samplers import MultiNormalSpec, cumulative, search_cdf, standard_normals

__all__ = [
    "TargetDensity",
    "RandomWalkProposal",
    "IndependenceProposal",
    "DiscreteProposal",
    "McmcRun",
    "CoordinateSummary",
    "PosteriorResult",
    "mh_chain",
    "mh_discrete_transition_matrix",
    "summarize",
    "posterior_sample",
    "normal_logpdf",
    "gamma_logpdf",
    "inv_gamma_logpdf",
    "exponential_loglik",
    "normal_loglik",
    "bivariate_example_logpdf",
    "VarConfig",
    "VarResult",
    "loss_probability",
    "var_portfolio_study",
    "Study",
    "load_study",
    "run_study",
]

_BLOCK = 1 << 16


@dataclass(frozen=True)
class TargetDensity:
    log_density: Callable
    dim: int = 1


@dataclass(frozen=True)
class RandomWalkProposal:
    """``Y = X + L Z`` with ``L`` the Cholesky factor of ``cov``; symmetric."""

    cov: np.ndarray
    spec: MultiNormalSpec = field(init=False, repr=False)

    def __post_init__(self):
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "spec", MultiNormalSpec(np.zeros(cov.shape[0]), cov))

    symmetric = True


@dataclass(frozen=True)
class IndependenceProposal:
    """``Y ~ g`` regardless of the current state.

    ``sampler(stream)`` returns one draw; ``log_pdf`` evaluates ``log g``.
    """

    log_pdf: Callable
    sampler: Callable

    symmetric = False


@dataclass(frozen=True)
class DiscreteProposal:
    """Proposal on state indices ``0..m-1`` drawn from row ``X`` of ``Q``."""

    Q: TransitionMatrix

    def __post_init__(self):
        if not isinstance(self.Q, TransitionMatrix):
            object.__setattr__(self, "Q", TransitionMatrix(self.Q))

    symmetric = False


@dataclass(frozen=True)
class McmcRun:
    """``samples`` holds ``X_1 .. X_N`` (the start ``x0`` is not included)."""

    samples: np.ndarray
    accepted: int
    burn_in: int

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def acceptance_ratio(self) -> float:
        return self.accepted / self.n

    @property
    def kept(self) -> np.ndarray:
        return self.samples[self.burn_in:]


def _log_target(target, x) -> float:
    v = float(target.log_density(x))
    if math.isnan(v):
        raise ModelError(f"log-density is NaN at {x!r}")
    return v


def mh_chain(target: TargetDensity, proposal, x0, N: int, stream, burn_in: int | None = None) -> McmcRun:
    """Metropolis-Hastings chain of ``N`` steps from ``x0``.

    Random-walk increments and acceptance uniforms are drawn in blocks:
    first the increments for a block of steps, then its uniforms.
    """
    if N < 1:
        raise ConfigError(f"N must be >= 1, got {N}")
    burn_in = N // 10 if burn_in is None else int(burn_in)
    if not 0 <= burn_in < N:
        raise ConfigError(f"burn_in must lie in [0, N), got {burn_in}")
    discrete = isinstance(proposal, DiscreteProposal)
    if discrete:
        x = int(x0)
        if not 0 <= x < proposal.Q.size:
            raise ConfigError(f"x0 must be a state index below {proposal.Q.size}")
        samples = np.empty((N, 1), dtype=np.int64)
        rows = cumulative(proposal.Q.P)
        Q = proposal.Q.P
    else:
        x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
        if x.size != target.dim:
            raise ConfigError(f"x0 has dimension {x.size}, target has {target.dim}")
        samples = np.empty((N, x.size))
    lx = _log_target(target, x)
    if lx == -math.inf:
        raise ModelError(f"target density is zero at the initial state {x0!r}")
    is_rw = isinstance(proposal, RandomWalkProposal)
    if is_rw and proposal.spec.dim != target.dim:
        raise ConfigError(f"proposal dimension {proposal.spec.dim} != target dimension {target.dim}")
    accepted = 0
    for start in range(0, N, _BLOCK):
        m = min(_BLOCK, N - start)
        if is_rw:
            inc = standard_normals(m * target.dim, stream).reshape(m, target.dim) @ proposal.spec.chol.T
            us = stream.uniforms(m)
        for i in range(m):
            if is_rw:
                y = x + inc[i]
                u = us[i]
                corr = 0.0
            elif discrete:
                y = int(search_cdf(rows[x], stream.next_uniform()))
                u = stream.next_uniform()
                corr = math.log(Q[y, x]) - math.log(Q[x, y]) if Q[y, x] > 0 else -math.inf
            else:
                y = np.atleast_1d(np.asarray(proposal.sampler(stream), dtype=float))
                u = stream.next_uniform()
                corr = float(proposal.log_pdf(x)) - float(proposal.log_pdf(y))
            ly = _log_target(target, y)
            delta = ly - lx + corr
            if delta >= 0 or u < math.exp(delta):
                x, lx = y, ly
                accepted += 1
            samples[start + i] = x
    return McmcRun(samples, accepted, burn_in)


def mh_discrete_transition_matrix(pi, Q) -> TransitionMatrix:
    """Transition matrix of the discrete sampler; it satisfies detailed balance with ``pi``."""
    Q = Q if isinstance(Q, TransitionMatrix) else TransitionMatrix(Q)
    pi = as_probability_vector(pi, Q.size)
    if np.any(pi <= 0):
        raise ConfigError("target probabilities must all be positive")
    q = Q.P
    flow = np.minimum(pi[:, None] * q, (pi[:, None] * q).T)
    P = flow / pi[:, None]
    np.fill_diagonal(P, 0.0)
    np.fill_diagonal(P, 1.0 - P.sum(axis=1))
    return TransitionMatrix(np.clip(P, 0.0, 1.0), Q.labels)


# ---------------------------------------------------------------------------
# posterior summaries


@dataclass(frozen=True)
class CoordinateSummary:
    """Posterior mean, std, naive CI half-width and central quantile interval."""

    mean: float
    std: float
    half_width: float
    lower: float
    upper: float


@dataclass(frozen=True)
class PosteriorResult:
    run: McmcRun
    summary: tuple
    chains: tuple = ()

    def as_dict(self, names: Sequence[str] | None = None) -> dict:
        names = names or [f"theta{i}" for i in range(len(self.summary))]
        return {
            "acceptance_ratio": self.run.acceptance_ratio,
            "n": self.run.n,
            "burn_in": self.run.burn_in,
            "params": {n: vars(s) for n, s in zip(names, self.summary)},
        }


def summarize(draws: np.ndarray, level: float = 0.95) -> tuple:
    """Per-column summaries; the half-width ignores autocorrelation."""
    draws = np.atleast_2d(np.asarray(draws, dtype=float).T).T
    z = z_quantile(level)
    lo_q, hi_q = 50 * (1 - level), 50 * (1 + level)
    out = []
    for col in draws.T:
        s = float(col.std(ddof=1))
        lo, hi = np.percentile(col, [lo_q, hi_q])
        out.append(CoordinateSummary(float(col.mean()), s, z * s / math.sqrt(col.size), float(lo), float(hi)))
    return tuple(out)


def posterior_sample(
    log_likelihood: Callable,
    log_prior: Callable,
    data,
    proposal,
    theta0,
    N: int,
    stream,
    burn_in: int | None = None,
    level: float = 0.95,
    chains: int = 1,
) -> PosteriorResult:
    """Sample ``log_likelihood(theta, data) + log_prior(theta)``.

    With ``chains > 1`` each chain runs on its own substream and the
    summaries pool every chain's post-burn-in draws.
    """
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))

    def logpost(theta):
        lp = float(log_prior(theta))
        if lp == -math.inf:
            return lp
        return lp + float(log_likelihood(theta, data))

    target = TargetDensity(logpost, theta0.size)
    if chains == 1:
        run = mh_chain(target, proposal, theta0, N, stream, burn_in)
        return PosteriorResult(run, summarize(run.kept, level))
    runs = tuple(mh_chain(target, proposal, theta0, N, stream.spawn(c), burn_in) for c in range(chains))
    pooled = np.vstack([r.kept for r in runs])
    return PosteriorResult(runs[0], summarize(pooled, level), runs)


# ---------------------------------------------------------------------------
# log densities


def normal_logpdf(x: float, mean: float, std: float) -> float:
    z = (x - mean) / std
    return -0.5 * z * z - math.log(std) - 0.5 * math.log(2 * math.pi)


def gamma_logpdf(x: float, shape: float, rate: float) -> float:
    if x <= 0:
        return -math.inf
    return shape * math.log(rate) - math.lgamma(shape) + (shape - 1) * math.log(x) - rate * x


def inv_gamma_logpdf(x: float, shape: float, scale: float) -> float:
    if x <= 0:
        return -math.inf
    return shape * math.log(scale) - math.lgamma(shape) - (shape + 1) * math.log(x) - scale / x


def exponential_loglik(rate: float, data) -> float:
    if rate <= 0:
        return -math.inf
    data = np.asarray(data, dtype=float)
    return data.size * math.log(rate) - rate * float(data.sum())


def normal_loglik(mu: float, sigma: float, data) -> float:
    if sigma <= 0:
        return -math.inf
    data = np.asarray(data, dtype=float)
    r = data - mu
    return float(-0.5 * np.dot(r, r) / sigma**2 - data.size * (math.log(sigma) + 0.5 * math.log(2 * math.pi)))


def bivariate_example_logpdf(x) -> float:
    """Unnormalized log of exp(-(x^2 y^2 + x^2 + y^2 - 8x - 8y) / 2)."""
    a, b = x[0], x[1]
    return -0.5 * (a * a * b * b + a * a + b * b - 8 * a - 8 * b)


# ---------------------------------------------------------------------------
# portfolio value-at-risk


@dataclass(frozen=True)
class VarConfig:
    S0: float = 1e6
    threshold: float = 9e5
    T: float = 0.5
    dt: float = 0.01
    n_mh: int = 10_000
    burn_in: int = 2000
    thin_to: int = 100
    n_mc: int = 1000
    mu_prior: tuple = (0.05, 0.1)
    var_prior: tuple = (2.0, 4e-4)
    proposal_cov: tuple = ((0.001, 0.0), (0.0, 0.001))
    theta0: tuple = (0.05, 0.1)
    level: float = 0.95


@dataclass(frozen=True)
class VarResult:
    loss: EstimateReport
    posterior: PosteriorResult
    draws: np.ndarray
    loss_probs: np.ndarray


def loss_probability(mu: float, sigma: float, S0: float, threshold: float, T: float, dt: float, n_mc: int, stream) -> float:
    """Fraction of Euler-Maruyama GBM paths ending below ``threshold``."""
    spec = DiffusionSpec(lambda t, x: mu * x, lambda t, x: sigma * x, (0.0, T), dt, S0)
    return float(np.mean(euler_maruyama_terminal(spec, n_mc, stream) < threshold))


def var_portfolio_study(returns, config: VarConfig, stream) -> VarResult:
    """Posterior over ``(mu, sigma)`` of monthly returns, then GBM loss probabilities.

    The chain runs on substream 0. Retained draw ``i`` simulates its paths
    on substream ``i`` of substream 1.
    """
    data = np.asarray(returns, dtype=float)
    m0, s0 = config.mu_prior
    a, b = config.var_prior

    def log_prior(theta):
        mu, sigma = theta[0], theta[1]
        if sigma <= 0:
            return -math.inf
        # inverse-gamma density evaluated at sigma^2, as a prior on the variance
        return normal_logpdf(mu, m0, s0) + inv_gamma_logpdf(sigma * sigma, a, b)

    def log_lik(theta, d):
        return normal_loglik(theta[0], theta[1], d)

    post = posterior_sample(
        log_lik, log_prior, data, RandomWalkProposal(np.asarray(config.proposal_cov)),
        config.theta0, config.n_mh, stream.spawn(0), config.burn_in, config.level,
    )
    kept = post.run.kept
    idx = np.unique(np.round(np.linspace(0, kept.shape[0] - 1, config.thin_to)).astype(int))
    draws = kept[idx]
    inner = stream.spawn(1)
    probs = np.array([
        loss_probability(mu, sig, config.S0, config.threshold, config.T, config.dt, config.n_mc, inner.spawn(i))
        for i, (mu, sig) in enumerate(draws)
    ])
    return VarResult(EstimateReport.from_values(probs, config.level), post, draws, probs)


# ---------------------------------------------------------------------------
# JSON study files


_PRIORS = {
    "gamma": (gamma_logpdf, ("shape", "rate")),
    "normal": (normal_logpdf, ("mean", "std")),
    "inv_gamma": (inv_gamma_logpdf, ("shape", "scale")),
}


def _prior_fn(spec: dict) -> Callable:
    try:
        fn, keys = _PRIORS[spec["dist"]]
        args = [float(spec[k]) for k in keys]
    except KeyError as exc:
        raise ConfigError(f"bad prior {spec!r}: missing or unknown {exc}") from exc
    on = spec.get("on", "value")
    if on == "value":
        return lambda v: fn(v, *args)
    if on == "square":
        return lambda v: fn(v * v, *args) if v > 0 else -math.inf
    raise ConfigError(f"prior 'on' must be 'value' or 'square', got {on!r}")


@dataclass(frozen=True)
class Study:
    likelihood: str
    data: list
    params: tuple
    priors: tuple
    proposal_cov: np.ndarray
    theta0: np.ndarray
    N: int
    burn_in: int
    thin: int | None
    raw: dict


def load_study(source) -> Study:
    """Parse a study file.

    ``likelihood`` is ``exponential`` (one rate per data group, where
    ``data`` may be a list of groups) or ``normal`` (params mean and std).
    ``data`` may be inline or loaded from ``data_path`` (JSON list or one
    number per line).
    """
    base = Path(".")
    if isinstance(source, (str, Path)):
        base = Path(source).parent
        try:
            raw = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read study file {source}: {exc}") from exc
    else:
        raw = dict(source)
    if "data" in raw:
        data = raw["data"]
    elif "data_path" in raw:
        p = base / raw["data_path"]
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read data file {p}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            data = [float(t) for t in text.split()]
    else:
        raise ConfigError("study needs 'data' or 'data_path'")
    lik = raw.get("likelihood")
    if lik not in ("exponential", "normal"):
        raise ConfigError(f"likelihood must be 'exponential' or 'normal', got {lik!r}")
    groups = data if data and isinstance(data[0], list) else [data]
    n_params = len(groups) if lik == "exponential" else 2
    params = tuple(raw.get("params") or [f"theta{i}" for i in range(n_params)])
    priors = tuple(raw.get("priors", []))
    if len(params) != n_params or len(priors) != n_params:
        raise ConfigError(f"{lik} likelihood needs {n_params} params and priors")
    cov = np.atleast_2d(np.asarray(raw.get("proposal_cov", np.eye(n_params) * 0.25), dtype=float))
    theta0 = np.atleast_1d(np.asarray(raw.get("theta0", np.ones(n_params)), dtype=float))
    N = int(raw.get("N", 10_000))
    burn = raw.get("burn_in")
    return Study(lik, groups, params, priors, cov, theta0, N, N // 10 if burn is None else int(burn), raw.get("thin"), raw)


def run_study(study: Study, stream, level: float = 0.95) -> PosteriorResult:
    prior_fns = [_prior_fn(p) for p in study.priors]

    def log_prior(theta):
        return sum(f(t) for f, t in zip(prior_fns, theta))

    if study.likelihood == "exponential":
        def log_lik(theta, groups):
            return sum(exponential_loglik(t, g) for t, g in zip(theta, groups))
    else:
        def log_lik(theta, groups):
            return normal_loglik(theta[0], theta[1], groups[0])

    return posterior_sample(
        log_lik, log_prior, [np.asarray(g, dtype=float) for g in study.data],
        RandomWalkProposal(study.proposal_cov), study.theta0, study.N, stream, study.burn_in, level,
    )
