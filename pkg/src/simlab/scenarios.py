"""Named experiments reproduced by ``simlab run --scenario``.

Each scenario takes a parameter dict (defaults merged in), an optional
sample size and a stream, and returns a :class:`ScenarioResult`. Datasets and
matrices the experiments depend on live here as module constants.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import markov, mcmc, montecarlo, processes, samplers, ssa
from .errors import ConfigError
from .montecarlo import EstimateReport

__all__ = [
    "ScenarioResult",
    "SCENARIOS",
    "INTEGRATION_SCENARIOS",
    "CHAINS",
    "PORTFOLIO_RETURNS",
    "RECOVERY_TIMES",
    "RECOVERY_TIMES_GROUP2",
    "load_board",
    "play_snakes_ladders",
    "monty_hall",
]

# monthly portfolio returns over five years
PORTFOLIO_RETURNS = (
    0.07, 0.13, 0.10, 0.17, 0.11, 0.03, 0.15, 0.09, 0.12, 0.12,
    -0.06, 0.07, 0.09, -0.01, 0.08, 0.08, 0.07, 0.19, 0.09, 0.12,
    0.03, 0.16, -0.02, 0.2, 0.14, 0.05, 0.08, 0.06, 0.10, -0.07,
    -0.01, -0.07, -0.05, 0.21, -0.05, 0.02, -0.02, 0.15, 0.08, 0.02,
    -0.03, 0.01, 0.08, 0.13, 0.16, -0.03, -0.13, 0.14, 0.11, 0.12,
    -0.01, -0.07, 0.16, 0.27, -0.06, 0.01, 0.01, 0.01, 0.01, 0.16,
)
RECOVERY_TIMES = (5, 8, 12, 7, 9, 10, 3, 6, 8, 11)
RECOVERY_TIMES_GROUP2 = (10, 14, 7, 11, 13, 8, 15, 9, 10, 16)

CHAINS = {
    "weather": markov.ChainSpec(
        markov.TransitionMatrix(
            [[0.0, 0.5, 0.5], [0.25, 0.5, 0.25], [0.25, 0.25, 0.5]], ("sunny", "cloudy", "rainy")
        ),
        np.array([1.0, 0.0, 0.0]),
    ),
    "two_state": markov.ChainSpec(
        markov.TransitionMatrix([[0.7, 0.3], [0.6, 0.4]], ("sunny", "cloudy")), np.array([1.0, 0.0])
    ),
    "four_state": markov.ChainSpec(
        markov.TransitionMatrix(
            [[0.25, 0.25, 0.0, 0.5], [0.0, 1.0, 0.0, 0.0], [0.5, 0.0, 0.5, 0.0], [0.25, 0.25, 0.25, 0.25]],
            ("1", "2", "3", "4"),
        ),
        np.array([0.0, 0.0, 1.0, 0.0]),
    ),
    "purchase_funnel": markov.ChainSpec(
        markov.TransitionMatrix(
            [[0.6, 0.3, 0.1, 0.0], [0.2, 0.5, 0.2, 0.1], [0.0, 0.1, 0.6, 0.3], [0.0, 0.0, 0.0, 1.0]],
            ("Browsing", "Cart", "Checkout", "Purchased"),
        ),
        np.array([1.0, 0.0, 0.0, 0.0]),
    ),
}


@dataclass
class ScenarioResult:
    """Headline estimate plus optional scalar extras and a detail table."""

    estimate: float
    report: EstimateReport | None = None
    exact: float | None = None
    extras: dict = field(default_factory=dict)
    columns: tuple = ()
    table: list = field(default_factory=list)

    def summary_row(self) -> dict:
        row = {"estimate": self.estimate}
        if self.report is not None:
            row.update(std=self.report.std, half_width=self.report.half_width, n=self.report.n, level=self.report.level)
        else:
            row.update(std="", half_width="", n="", level="")
        row["exact"] = "" if self.exact is None else self.exact
        row.update(self.extras)
        return row


def _from_report(rep: EstimateReport, exact=None, **extras) -> ScenarioResult:
    return ScenarioResult(rep.mean, rep, exact, extras)


def _n(n, default):
    return default if n is None else int(n)


# ---------------------------------------------------------------------------
# Monte Carlo integration


def _mc_sin(p, n, s):
    rep = montecarlo.integrate_interval(np.sin, 0.0, 1.0, _n(n, 10**5), s, p["level"])
    return _from_report(rep, 1 - math.cos(1.0))


def _mc_pi(p, n, s):
    rep = montecarlo.integrate_interval(lambda x: 4 * np.sqrt(1 - x * x), 0.0, 1.0, _n(n, 10**6), s, p["level"])
    return _from_report(rep, math.pi)


def _mc_expquad(p, n, s):
    lam = 0.5
    rep = montecarlo.estimate_mean(
        lambda x: (x * x - x) / lam, lambda st, m: samplers.sample_exponential(lam, st, size=m), _n(n, 10**5), s, p["level"]
    )
    return _from_report(rep, 12.0)


def _normal_cdf_exact(t):
    return 0.5 * math.erfc(-t / math.sqrt(2))


def _normal_cdf_naive(p, n, s):
    t = p["t"]
    return _from_report(montecarlo.estimate_tail_naive(t, _n(n, 10**6), s, p["level"]), _normal_cdf_exact(t), t=t)


def tail_importance_spec(t: float) -> montecarlo.ImportanceSpec:
    """Lower normal tail below ``t`` with the shifted exponential envelope ``exp(x - t)`` on ``(-inf, t]``."""
    return montecarlo.ImportanceSpec(
        target_pdf=lambda x: np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi),
        envelope_pdf=lambda x: np.where(x <= t, np.exp(np.minimum(x - t, 0.0)), 0.0),
        performance=lambda x: (x <= t).astype(float),
        envelope_sampler=lambda st, m: t - samplers.sample_exponential(1.0, st, size=m),
    )


def _normal_cdf_importance(p, n, s):
    t = p["t"]
    rep = montecarlo.importance_estimate(tail_importance_spec(t), _n(n, 10**5), s, p["level"])
    exact = _normal_cdf_exact(t)
    return _from_report(rep, exact, t=t, relative_error=abs(rep.mean - exact) / exact)


def _normal_cauchy_delta(p, n, s):
    return _from_report(montecarlo.normal_cauchy_delta(p["t"], _n(n, 10**5), s, p["level"]), t=p["t"])


# ---------------------------------------------------------------------------
# Markov chains


def _chain_event(name, horizon, target_label, mode, p, n, s):
    spec = CHAINS[name]
    P = spec.matrix
    j = P.index(target_label)
    if mode == "final":
        pred = lambda path: path[-1] == j  # noqa: E731
    else:
        pred = lambda path: bool(np.any(path == j))  # noqa: E731
    # for an absorbing target "ever" and "final" have the same probability
    exact = float((spec.pi0 @ markov.n_step_matrix(P, horizon).P)[j])
    rep = markov.estimate_chain_event(spec.pi0, P, horizon, pred, _n(n, 10**4), s, p["level"])
    return _from_report(rep, exact, horizon=horizon)


def _weather_chain(p, n, s):
    res = _chain_event("weather", int(p["horizon"]), "rainy", "final", p, n, s)
    res.extras["stationary_rainy"] = float(markov.stationary_distribution(CHAINS["weather"].matrix)[2])
    return res


def _purchase_funnel(p, n, s):
    return _chain_event("purchase_funnel", int(p["horizon"]), "Purchased", "ever", p, n, s)


def _four_state_chain(p, n, s):
    res = _chain_event("four_state", 2, "2", "final", p, n, s)
    P3 = markov.n_step_matrix(CHAINS["four_state"].matrix, 3).P
    res.extras["exact_p3_1_to_3"] = float(P3[0, 2])
    return res


# ---------------------------------------------------------------------------
# processes


_DIRS = {
    1: ([[1], [-1]], [0.5, 0.5]),
    2: ([[1, 0], [-1, 0], [0, 1], [0, -1]], [0.25] * 4),
    3: ([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], [1 / 6] * 6),
}


def _random_walk(dim):
    def run(p, n, s):
        steps = int(p["steps"])
        dirs, probs = _DIRS[dim]
        ends = processes.random_walk_dd_endpoints(dirs, probs, [0] * dim, steps, _n(n, 200), s)
        sq = (ends.astype(float) ** 2).sum(axis=1)
        rep = EstimateReport.from_values(sq, p["level"])
        res = _from_report(rep, float(steps), mean_x1=float(ends[:, 0].mean()))
        res.columns = ("path",) + tuple(f"x{i + 1}" for i in range(dim))
        res.table = [[k, *e.tolist()] for k, e in enumerate(ends)]
        return res

    return run


def _gamblers_ruin(p, n, s):
    K, T, q = int(p["K"]), int(p["T"]), p["p"]
    rep = processes.gamblers_ruin(K, T, q, _n(n, 10**4), s, p["level"])
    return _from_report(rep, processes.ruin_probability_exact(K, T, q))


def _startup_valuation(p, n, s):
    r = processes.startup_valuation(
        s, p["delta"], p["v0"], p["v_max"], p["c_operate"], p["c_invest"], p["p"], _n(n, 5000), p["level"]
    )
    return _from_report(
        r.bankruptcy,
        expected_duration=r.duration.mean,
        duration_half_width=r.duration.half_width,
        profit_if_acquired=r.profit_if_acquired,
        loss_if_bankrupt=r.loss_if_bankrupt,
        expected_net=r.expected_net.mean,
    )


def _brownian_hitting(p, n, s):
    rep = processes.hitting_time_box(int(p["dim"]), p["half_width"], p["dt"], _n(n, 10**4), s, p["level"])
    return _from_report(rep)


def black_scholes_call(S0, K, r, sigma, T):
    d1 = (math.log(S0 / K) + (r + 0.5 * sigma**2) * T) / (sigma * math.sqrt(T))
    d2 = d1 - sigma * math.sqrt(T)
    return S0 * _normal_cdf_exact(d1) - K * math.exp(-r * T) * _normal_cdf_exact(d2)


def _european_call(p, n, s):
    args = (p["S0"], p["K"], p["r"], p["sigma"], p["T"])
    rep = processes.price_european_call(*args, p["dt"], _n(n, 10**4), s, p["level"])
    return _from_report(rep, black_scholes_call(*args))


# ---------------------------------------------------------------------------
# reaction kinetics


def _decay_deterministic(p, n, s):
    traj = ssa.run_deterministic(lambda t, y: -p["lam"] * y, [p["y0"]], (0.0, p["t_final"]), p["dt"])
    res = ScenarioResult(float(traj.final[0]), exact=p["y0"] * math.exp(-p["lam"] * p["t_final"]))
    res.columns = ("time", "y")
    stride = max(1, len(traj) // 400)
    res.table = [[t, y] for t, y in zip(traj.times[::stride].tolist(), traj.states[::stride, 0].tolist())]
    return res


def _decay_ssa(p, n, s):
    sys = ssa.decay(p["lam"])
    runs = _n(n, 500)
    finals = np.array([ssa.run_ssa(sys, [int(p["y0"])], p["t_final"], s.spawn(r)).final[0] for r in range(runs)], dtype=float)
    res = _from_report(EstimateReport.from_values(finals, p["level"]), p["y0"] * math.exp(-p["lam"] * p["t_final"]))
    res.columns = ("run", "y_final")
    res.table = [[r, int(v)] for r, v in enumerate(finals)]
    return res


def sir_ensemble(runs: int, stream, t_final: float = 120.0, grid_dt: float = 0.5, mu=1e-4, beta=0.25, gamma=0.05, initial=(198, 2, 0)):
    """SIR paths on a uniform grid plus each path's exact infected peak.

    Returns ``(grid, states, peaks, peak_times)`` with ``states`` of shape
    ``(runs, len(grid), 3)``; run ``r`` uses substream ``r``.
    """
    sys = ssa.sir(mu, beta, gamma)
    grid = processes.time_grid(0.0, t_final, grid_dt)
    out = np.empty((runs, grid.size, 3))
    peaks = np.empty(runs)
    when = np.empty(runs)
    for r in range(runs):
        traj = ssa.run_ssa(sys, list(initial), t_final, stream.spawn(r))
        out[r] = ssa.resample_to_grid(traj, grid)
        k = int(np.argmax(traj.states[:, 1]))
        peaks[r], when[r] = traj.states[k, 1], traj.times[k]
    return grid, out, peaks, when


def _sir_ssa(p, n, s):
    grid, ens, peaks, when = sir_ensemble(_n(n, 200), s, p["t_final"], p["grid_dt"], p["mu"], p["beta"], p["gamma"])
    rep = EstimateReport.from_values(peaks, p["level"])
    res = _from_report(rep, mean_peak_time=float(when.mean()))
    mean = ens.mean(axis=0)
    res.columns = ("time", "S_mean", "I_mean", "R_mean")
    res.table = [[t, *m.tolist()] for t, m in zip(grid.tolist(), mean)]
    return res


def _sir_ode(p, n, s):
    sys = ssa.sir(p["mu"], p["beta"], p["gamma"])
    traj = ssa.run_deterministic(ssa.mean_field(sys), [198, 2, 0], (0.0, p["t_final"]), p["dt"])
    k = int(np.argmax(traj.states[:, 1]))
    res = ScenarioResult(float(traj.states[k, 1]), extras={"peak_time": float(traj.times[k])})
    stride = max(1, len(traj) // 400)
    res.columns = ("time", "S", "I", "R")
    res.table = [[t, *y.tolist()] for t, y in zip(traj.times[::stride].tolist(), traj.states[::stride])]
    return res


def _michaelis_menten(p, n, s):
    sys = ssa.michaelis_menten(p["c1"], p["c2"], p["c3"])
    init = [int(p["S"]), int(p["E"]), int(p["C"]), int(p["P"])]
    finals = np.array([ssa.run_ssa(sys, init, p["t_final"], s.spawn(r)).final for r in range(_n(n, 20))])
    res = _from_report(EstimateReport.from_values(finals[:, 3], p["level"]), enzyme_total=int(init[1] + init[2]))
    res.columns = ("run", "S", "E", "C", "P")
    res.table = [[r, *f.tolist()] for r, f in enumerate(finals)]
    return res


def _lotka_volterra(p, n, s):
    sys = ssa.lotka_volterra(p["alpha"], p["beta"], p["gamma"])
    init = [int(p["F0"]), int(p["R0"])]
    grid = np.arange(0.0, p["t_final"] + 1e-9, p["grid_dt"])
    stoch = ssa.resample_to_grid(ssa.run_ssa(sys, init, p["t_final"], s), grid)
    det = ssa.run_deterministic(ssa.mean_field(sys), init, (0.0, p["t_final"]))
    det_grid = det.states[np.searchsorted(det.times, grid - 1e-9)]
    res = ScenarioResult(float(stoch[-1, 1]), extras={"F_final": int(stoch[-1, 0]), "ode_R_final": float(det.final[1])})
    res.columns = ("time", "F_ssa", "R_ssa", "F_ode", "R_ode")
    res.table = [[t, int(a[0]), int(a[1]), b[0], b[1]] for t, a, b in zip(grid.tolist(), stoch, det_grid)]
    return res


# ---------------------------------------------------------------------------
# MCMC


def _mh_bivariate(p, n, s):
    cov = np.eye(2) * p["proposal_var"]
    run = mcmc.mh_chain(
        mcmc.TargetDensity(mcmc.bivariate_example_logpdf, 2), mcmc.RandomWalkProposal(cov), [0.0, 0.0], _n(n, 10**5), s, int(p["burn_in"])
    )
    kept = run.kept
    rep = EstimateReport.from_values(kept[:, 0], p["level"])
    return _from_report(rep, acceptance_ratio=run.acceptance_ratio, mean_x2=float(kept[:, 1].mean()))


def _gamma_posterior(groups, p, n, s):
    prior = lambda th: sum(mcmc.gamma_logpdf(t, p["prior_shape"], p["prior_rate"]) for t in th)  # noqa: E731
    lik = lambda th, d: sum(mcmc.exponential_loglik(t, g) for t, g in zip(th, d))  # noqa: E731
    k = len(groups)
    post = mcmc.posterior_sample(
        lik, prior, [np.asarray(g, float) for g in groups], mcmc.RandomWalkProposal(np.eye(k) * p["proposal_var"]),
        [p["theta0"]] * k, _n(n, 10**4), s, int(p["burn_in"]), p["level"],
    )
    exact = [(p["prior_shape"] + len(g)) / (p["prior_rate"] + sum(g)) for g in groups]
    return post, exact


def _recovery_rate(p, n, s):
    post, exact = _gamma_posterior([RECOVERY_TIMES], p, n, s)
    c = post.summary[0]
    return ScenarioResult(c.mean, EstimateReport(c.mean, c.std, post.run.kept.shape[0], p["level"], c.half_width), exact[0],
                          {"acceptance_ratio": post.run.acceptance_ratio})


def _recovery_two_group(p, n, s):
    post, exact = _gamma_posterior([RECOVERY_TIMES, RECOVERY_TIMES_GROUP2], p, n, s)
    c1, c2 = post.summary
    return ScenarioResult(c2.mean, EstimateReport(c2.mean, c2.std, post.run.kept.shape[0], p["level"], c2.half_width), exact[1],
                          {"group1_mean": c1.mean, "group1_exact": exact[0], "acceptance_ratio": post.run.acceptance_ratio})


def _portfolio_var(p, n, s):
    cfg = mcmc.VarConfig(n_mc=_n(n, 1000), thin_to=int(p["thin_to"]), n_mh=int(p["n_mh"]), burn_in=int(p["burn_in"]), level=p["level"])
    r = mcmc.var_portfolio_study(PORTFOLIO_RETURNS, cfg, s)
    mu, sig = r.posterior.summary
    res = _from_report(r.loss, mu_mean=mu.mean, sigma_mean=sig.mean, acceptance_ratio=r.posterior.run.acceptance_ratio)
    res.columns = ("draw", "mu", "sigma", "loss_probability")
    res.table = [[i, d[0], d[1], q] for i, (d, q) in enumerate(zip(r.draws, r.loss_probs))]
    return res


# ---------------------------------------------------------------------------
# games


def monty_hall(n: int, stream, switch: bool = True) -> np.ndarray:
    """Win indicators for ``n`` games; the host opens a goat door the player did not pick."""
    doors = samplers.DiscreteDistribution.uniform_over([0, 1, 2])
    car = samplers.sample_discrete(doors, stream, size=n)
    pick = samplers.sample_discrete(doors, stream, size=n)
    coin = samplers.sample_bernoulli(0.5, stream, size=n)
    # when the pick is the car the host flips a coin between the other two doors
    others = np.array([[1, 2], [0, 2], [0, 1]])
    opened = np.where(pick == car, others[pick, coin], 3 - pick - car)
    final = 3 - pick - opened if switch else pick
    return (final == car).astype(float)


def _monty_hall(p, n, s):
    wins = monty_hall(_n(n, 10**5), s, bool(p["switch"]))
    return _from_report(EstimateReport.from_values(wins, p["level"]), 2 / 3 if p["switch"] else 1 / 3)


def load_board(path) -> tuple[int, dict]:
    """Board JSON: ``{"size": 100, "jumps": {"4": 14, "17": 7, ...}}``."""
    try:
        data = json.loads(Path(path).read_text())
        size = int(data["size"])
        jumps = {int(k): int(v) for k, v in data.get("jumps", {}).items()}
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read board {path}: {exc}") from exc
    for a, b in jumps.items():
        if not (1 <= a < size and 1 <= b <= size) or a == b:
            raise ConfigError(f"bad jump {a}->{b} on a board of size {size}")
    return size, jumps


def play_snakes_ladders(size: int, jumps: dict, n: int, stream, max_rolls: int = 100_000) -> np.ndarray:
    """Rolls needed to land exactly on ``size`` for ``n`` solo games started off the board.

    A roll that would overshoot the last square leaves the token where it is.
    """
    die = samplers.DiscreteDistribution.uniform_over([1, 2, 3, 4, 5, 6])
    dest = np.arange(size + 1)
    for a, b in jumps.items():
        dest[a] = b
    pos = np.zeros(n, dtype=np.int64)
    rolls = np.zeros(n, dtype=np.int64)
    live = np.arange(n)
    k = 0
    while live.size:
        k += 1
        if k > max_rolls:
            raise ConfigError(f"games unfinished after {max_rolls} rolls; check the board")
        step = samplers.sample_discrete(die, stream, size=live.size)
        nxt = pos[live] + step
        nxt = np.where(nxt > size, pos[live], dest[np.minimum(nxt, size)])
        pos[live] = nxt
        done = nxt == size
        rolls[live[done]] = k
        live = live[~done]
    return rolls


def _snakes_ladders(p, n, s):
    board = p.get("board") or str(Path(__file__).with_name("boards") / "default.json")
    size, jumps = load_board(board)
    rolls = play_snakes_ladders(size, jumps, _n(n, 10**4), s)
    rep = EstimateReport.from_values(rolls.astype(float), p["level"])
    return _from_report(rep, p_exactly_30=float(np.mean(rolls == 30)), p_at_most_30=float(np.mean(rolls <= 30)))


# ---------------------------------------------------------------------------
# registry: name -> (function, default parameters, description)

_LEVEL = {"level": 0.95}

SCENARIOS: dict[str, tuple[Callable, dict, str]] = {
    "decay_deterministic": (_decay_deterministic, {"lam": 0.5, "y0": 1000.0, "t_final": 4.0, "dt": 1e-3}, "RK4 radioactive decay"),
    "decay_ssa": (_decay_ssa, {"lam": 0.5, "y0": 1000, "t_final": 4.0}, "SSA decay ensemble, mean y(t_final)"),
    "mc_sin": (_mc_sin, {}, "integral of sin over [0,1]"),
    "mc_pi": (_mc_pi, {}, "pi as 4 * integral of sqrt(1-x^2)"),
    "mc_expquad": (_mc_expquad, {}, "integral of exp(-x/2)(x^2-x) over [0,inf)"),
    "normal_cdf_naive": (_normal_cdf_naive, {"t": 0.0}, "indicator estimate of the normal cdf"),
    "normal_cdf_importance": (_normal_cdf_importance, {"t": -4.5}, "normal lower tail by importance sampling"),
    "normal_cauchy_delta": (_normal_cauchy_delta, {"t": 2.0}, "normal-Cauchy posterior mean"),
    "weather_chain": (_weather_chain, {"horizon": 5}, "rain after `horizon` days from a sunny start"),
    "purchase_funnel": (_purchase_funnel, {"horizon": 6}, "purchase within `horizon` steps from browsing"),
    "four_state_chain": (_four_state_chain, {}, "state 3 to state 2 in two steps"),
    "random_walk_1d": (_random_walk(1), {"steps": 10_000}, "mean squared displacement, 1d lattice"),
    "random_walk_2d": (_random_walk(2), {"steps": 10_000}, "mean squared displacement, 2d lattice"),
    "random_walk_3d": (_random_walk(3), {"steps": 1000}, "mean squared displacement, 3d lattice"),
    "gamblers_ruin": (_gamblers_ruin, {"K": 30, "T": 100, "p": 0.5}, "ruin probability"),
    "startup_valuation": (_startup_valuation, {"delta": 2e6, "v0": 10e6, "v_max": 100e6, "c_operate": 10e3, "c_invest": 200e3, "p": 0.6}, "bankruptcy probability and profit/loss"),
    "brownian_hitting": (_brownian_hitting, {"dim": 3, "half_width": 1.0, "dt": 0.005}, "exit time from a cube"),
    "european_call": (_european_call, {"S0": 102.0, "K": 100.0, "r": 0.04, "sigma": 0.3, "T": 0.5, "dt": 1e-3}, "call price by Euler-Maruyama GBM"),
    "sir_ssa": (_sir_ssa, {"mu": 1e-4, "beta": 0.25, "gamma": 0.05, "t_final": 120.0, "grid_dt": 0.5}, "SIR SSA ensemble, mean infected peak"),
    "sir_ode": (_sir_ode, {"mu": 1e-4, "beta": 0.25, "gamma": 0.05, "t_final": 120.0, "dt": 0.01}, "SIR mean-field peak"),
    "michaelis_menten": (_michaelis_menten, {"c1": 0.002, "c2": 0.1, "c3": 0.75, "S": 200, "E": 300, "C": 100, "P": 50, "t_final": 50.0}, "enzyme kinetics, mean final product"),
    "lotka_volterra": (_lotka_volterra, {"alpha": 1.0, "beta": 0.005, "gamma": 0.6, "F0": 50, "R0": 100, "t_final": 30.0, "grid_dt": 0.1}, "predator-prey SSA vs ODE"),
    "mh_bivariate": (_mh_bivariate, {"proposal_var": 2.0, "burn_in": 1000}, "MH mean of the first coordinate"),
    "recovery_rate": (_recovery_rate, {"prior_shape": 2.0, "prior_rate": 1.0, "proposal_var": 0.25, "theta0": 0.5, "burn_in": 1000}, "exponential rate posterior"),
    "recovery_two_group": (_recovery_two_group, {"prior_shape": 2.0, "prior_rate": 1.0, "proposal_var": 0.0025, "theta0": 0.5, "burn_in": 1000}, "two-group rate posterior"),
    "portfolio_var": (_portfolio_var, {"n_mh": 10_000, "burn_in": 2000, "thin_to": 100}, "posterior loss probability of a portfolio"),
    "monty_hall": (_monty_hall, {"switch": 1}, "switching win probability"),
    "snakes_ladders": (_snakes_ladders, {"board": ""}, "rolls to finish a board"),
}
for _fn, _defaults, _ in SCENARIOS.values():
    _defaults.update(_LEVEL)

INTEGRATION_SCENARIOS = ("mc_sin", "mc_pi", "mc_expquad", "normal_cdf_naive", "normal_cdf_importance", "normal_cauchy_delta")
