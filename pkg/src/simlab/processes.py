"""Random walks, Wiener paths, Euler-Maruyama diffusions and their Monte Carlo uses."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NumericalError
from .montecarlo import EstimateReport
from .samplers import DiscreteDistribution, sample_discrete, standard_normals

__all__ = [
    "Trajectory",
    "WalkSpec",
    "DiffusionSpec",
    "random_walk",
    "random_walk_endpoints",
    "random_walk_dd",
    "random_walk_dd_endpoints",
    "ruin_probability_exact",
    "absorbing_walk",
    "gamblers_ruin",
    "StartupReport",
    "startup_valuation",
    "wiener_path",
    "wiener_paths",
    "euler_maruyama",
    "euler_maruyama_terminal",
    "time_grid",
    "hitting_time_box",
    "price_european_call",
]


@dataclass(frozen=True)
class Trajectory:
    """Time stamps with one state vector per stamp; ``states`` is ``(len(times), d)``."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states)
        if states.ndim == 1:
            states = states[:, None]
        if times.ndim != 1 or states.shape[0] != times.size:
            raise ConfigError(f"{times.size} times but {states.shape[0]} states")
        if np.any(np.diff(times) <= 0):
            raise ConfigError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return self.times.size

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


# ---------------------------------------------------------------------------
# random walks


@dataclass(frozen=True)
class WalkSpec:
    p: float
    steps: int
    x0: int = 0

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ConfigError(f"step probability must lie in (0, 1), got {self.p}")
        if self.steps < 0:
            raise ConfigError(f"steps must be non-negative, got {self.steps}")


def _pm_steps(p: float, shape, stream) -> np.ndarray:
    u = stream.uniforms(int(np.prod(shape))).reshape(shape)
    return np.where(u <= p, 1, -1).astype(np.int64)


def random_walk(spec: WalkSpec, stream) -> Trajectory:
    """Simple walk on the integers: +1 with probability ``p``, else -1."""
    steps = _pm_steps(spec.p, (spec.steps,), stream)
    path = spec.x0 + np.concatenate([[0], np.cumsum(steps)])
    return Trajectory(np.arange(spec.steps + 1, dtype=float), path)


def random_walk_endpoints(spec: WalkSpec, n_paths: int, stream) -> np.ndarray:
    """``X_t`` at ``t = spec.steps`` for ``n_paths`` independent walks."""
    return spec.x0 + _pm_steps(spec.p, (n_paths, spec.steps), stream).sum(axis=1)


def _directions(directions, probs):
    vecs = np.atleast_2d(np.asarray(directions, dtype=np.int64))
    dist = DiscreteDistribution(np.arange(vecs.shape[0]), probs)
    return vecs, dist


def random_walk_dd(directions: Sequence[Sequence[int]], probs: Sequence[float], x0, steps: int, stream) -> Trajectory:
    """Lattice walk adding ``directions[k]`` with probability ``probs[k]`` per step."""
    vecs, dist = _directions(directions, probs)
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.int64))
    if x0.size != vecs.shape[1]:
        raise ConfigError(f"x0 has dimension {x0.size}, directions have {vecs.shape[1]}")
    idx = sample_discrete(dist, stream, size=steps)
    path = x0 + np.vstack([np.zeros_like(x0), np.cumsum(vecs[idx], axis=0)])
    return Trajectory(np.arange(steps + 1, dtype=float), path)


def random_walk_dd_endpoints(directions, probs, x0, steps: int, n_paths: int, stream) -> np.ndarray:
    vecs, dist = _directions(directions, probs)
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.int64))
    if x0.size != vecs.shape[1]:
        raise ConfigError(f"x0 has dimension {x0.size}, directions have {vecs.shape[1]}")
    idx = sample_discrete(dist, stream, size=n_paths * steps).reshape(n_paths, steps)
    return x0 + vecs[idx].sum(axis=1)


def ruin_probability_exact(K: int, T: int, p: float) -> float:
    """Probability that a walk from ``K`` hits 0 before ``T``."""
    if not 0 < K < T:
        raise ConfigError(f"need 0 < K < T, got K={K}, T={T}")
    q = 1.0 - p
    if abs(p - q) < 1e-15:
        return (T - K) / T
    r = q / p
    return (r**K - r**T) / (1.0 - r**T)


def absorbing_walk(K: int, T: int, p: float, n_sims: int, stream, max_steps: int = 10**7):
    """Run ``n_sims`` +/-1 walks from ``K`` until they hit 0 or ``T``.

    Returns ``(ruined, durations)``. All live walks step together; each step
    draws one uniform per live walk, in walk order.
    """
    if not 0 < K < T:
        raise ConfigError(f"need 0 < K < T, got K={K}, T={T}")
    if not 0.0 < p < 1.0:
        raise ConfigError(f"p must lie in (0, 1), got {p}")
    pos = np.full(n_sims, K, dtype=np.int64)
    dur = np.zeros(n_sims, dtype=np.int64)
    live = np.arange(n_sims)
    t = 0
    while live.size:
        t += 1
        if t > max_steps:
            raise NumericalError(f"{live.size} walks still running after {max_steps} steps")
        u = stream.uniforms(live.size)
        pos[live] += np.where(u <= p, 1, -1)
        done = (pos[live] == 0) | (pos[live] == T)
        dur[live[done]] = t
        live = live[~done]
    return pos == 0, dur


def gamblers_ruin(K: int, T: int, p: float, n_sims: int, stream, level: float = 0.95) -> EstimateReport:
    ruined, _ = absorbing_walk(K, T, p, n_sims, stream)
    return EstimateReport.from_values(ruined.astype(float), level)


@dataclass(frozen=True)
class StartupReport:
    bankruptcy: EstimateReport
    duration: EstimateReport
    profit_if_acquired: float
    loss_if_bankrupt: float
    expected_net: EstimateReport


def startup_valuation(
    stream,
    delta: float = 2e6,
    v0: float = 10e6,
    v_max: float = 100e6,
    c_operate: float = 10e3,
    c_invest: float = 200e3,
    p: float = 0.6,
    n_sims: int = 5000,
    level: float = 0.95,
) -> StartupReport:
    """Company value moves by +/- ``delta`` per period until 0 or ``v_max``.

    Each period costs ``c_operate + c_invest``. An acquisition pays
    ``v_max`` and nets ``v_max - v0 - t * cost``; bankruptcy nets
    ``-(v0 + t * cost)``. Conditional means are ``nan`` when the outcome
    never occurs.
    """
    K = v0 / delta
    T = v_max / delta
    if abs(K - round(K)) > 1e-9 or abs(T - round(T)) > 1e-9:
        raise ConfigError("v0 and v_max must be whole multiples of delta")
    ruined, dur = absorbing_walk(int(round(K)), int(round(T)), p, n_sims, stream)
    cost = c_operate + c_invest
    net = np.where(ruined, -(v0 + dur * cost), v_max - v0 - dur * cost)
    won = ~ruined
    return StartupReport(
        bankruptcy=EstimateReport.from_values(ruined.astype(float), level),
        duration=EstimateReport.from_values(dur.astype(float), level),
        profit_if_acquired=float(net[won].mean()) if won.any() else math.nan,
        loss_if_bankrupt=float(-net[ruined].mean()) if ruined.any() else math.nan,
        expected_net=EstimateReport.from_values(net, level),
    )


# ---------------------------------------------------------------------------
# Wiener paths and diffusions


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ConfigError("times must be a non-empty 1-d array")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ConfigError("times must start at or after 0 and increase strictly")
    return times


def wiener_paths(times, dim: int, n_paths: int, stream) -> np.ndarray:
    """Standard Brownian motion sampled at ``times``, shape ``(n_paths, len(times), dim)``.

    ``W_0 = 0``; when ``times[0] > 0`` the first value is ``sqrt(times[0]) Z``.
    """
    times = _check_times(times)
    if dim < 1:
        raise ConfigError(f"dim must be >= 1, got {dim}")
    dt = np.diff(np.concatenate([[0.0], times]))
    z = standard_normals(n_paths * times.size * dim, stream).reshape(n_paths, times.size, dim)
    return np.cumsum(np.sqrt(dt)[None, :, None] * z, axis=1)


def wiener_path(times, dim: int, stream) -> Trajectory:
    times = _check_times(times)
    return Trajectory(times, wiener_paths(times, dim, 1, stream)[0])


@dataclass(frozen=True)
class DiffusionSpec:
    """``dX = a(t, X) dt + b(t, X) dW`` on ``t_span`` with step ``dt``.

    ``diffusion=None`` means ``b = 0``, in which case no randomness is drawn.
    Coefficients act elementwise on the state array.
    """

    drift: Callable
    diffusion: Callable | None
    t_span: tuple
    dt: float
    x0: float | Sequence[float]

    def __post_init__(self):
        t0, t1 = self.t_span
        if not (math.isfinite(t0) and math.isfinite(t1)) or t0 >= t1:
            raise ConfigError(f"need finite t0 < t_end, got {self.t_span}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")


def time_grid(t0: float, t_end: float, dt: float) -> np.ndarray:
    """``t0, t0+dt, ...`` ending exactly at ``t_end`` with a shorter last step if needed."""
    span = t_end - t0
    n_full = int(math.floor(span / dt + 1e-9))
    grid = t0 + dt * np.arange(n_full + 1)
    if t_end - grid[-1] > 1e-9 * dt:
        grid = np.append(grid, t_end)
    else:
        grid[-1] = t_end
    return grid


def _em(spec: DiffusionSpec, x, stream, record: bool):
    grid = time_grid(spec.t_span[0], spec.t_span[1], spec.dt)
    # full steps use dt itself so a noise-free run matches a plain Euler loop
    hs = np.full(grid.size - 1, float(spec.dt))
    last = grid[-1] - grid[-2]
    if last < spec.dt * (1 - 1e-9):
        hs[-1] = last
    states = [x.copy()] if record else None
    for k in range(grid.size - 1):
        t = grid[k]
        h = hs[k]
        drift = spec.drift(t, x)
        if spec.diffusion is None:
            x = x + drift * h
        else:
            z = standard_normals(x.size, stream).reshape(x.shape)
            x = x + drift * h + spec.diffusion(t, x) * math.sqrt(h) * z
        if not np.all(np.isfinite(x)):
            raise NumericalError(f"non-finite state at step {k + 1} (t={grid[k + 1]:.6g})")
        if record:
            states.append(x.copy())
    return grid, (np.array(states) if record else x)


def euler_maruyama(spec: DiffusionSpec, stream) -> Trajectory:
    """One path on the grid from :func:`time_grid`; one normal per step per component."""
    x = np.atleast_1d(np.asarray(spec.x0, dtype=float)).copy()
    grid, states = _em(spec, x, stream, record=True)
    return Trajectory(grid, states)


def euler_maruyama_terminal(spec: DiffusionSpec, n_paths: int, stream) -> np.ndarray:
    """Terminal values of ``n_paths`` scalar paths advanced together."""
    x = np.full(n_paths, float(np.asarray(spec.x0, dtype=float).ravel()[0]))
    _, xt = _em(spec, x, stream, record=False)
    return xt


def hitting_time_box(
    dim: int, half_width: float, dt: float, n_sims: int, stream, level: float = 0.95, max_steps: int = 10**7
) -> EstimateReport:
    """Mean exit time of Brownian motion from ``[-h, h]^dim`` started at the origin.

    The state is checked after every full step, and the recorded time is
    ``dt`` times the number of steps taken up to and including the exit step.
    """
    if not (dt > 0 and half_width > 0) or dim < 1:
        raise ConfigError("need dim >= 1, dt > 0 and half_width > 0")
    pos = np.zeros((n_sims, dim))
    steps = np.zeros(n_sims, dtype=np.int64)
    live = np.arange(n_sims)
    sd = math.sqrt(dt)
    k = 0
    while live.size:
        k += 1
        if k > max_steps:
            raise NumericalError(f"{live.size} paths still inside after {max_steps} steps")
        pos[live] += sd * standard_normals(live.size * dim, stream).reshape(live.size, dim)
        out = np.any(np.abs(pos[live]) >= half_width, axis=1)
        steps[live[out]] = k
        live = live[~out]
    return EstimateReport.from_values(dt * steps, level)


def price_european_call(
    S0: float, K: float, r: float, sigma: float, T: float, dt: float, n_sims: int, stream, level: float = 0.95
) -> EstimateReport:
    """Discounted mean payoff of a call under risk-neutral GBM paths from Euler-Maruyama."""
    for name, v in (("S0", S0), ("K", K), ("sigma", sigma), ("T", T), ("dt", dt)):
        if not v > 0:
            raise ConfigError(f"{name} must be positive, got {v}")
    spec = DiffusionSpec(lambda t, x: r * x, lambda t, x: sigma * x, (0.0, T), dt, S0)
    st = euler_maruyama_terminal(spec, n_sims, stream)
    disc = math.exp(-r * T) * np.maximum(st - K, 0.0)
    return EstimateReport.from_values(disc, level)
