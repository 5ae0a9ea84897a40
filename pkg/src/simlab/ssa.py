"""Gillespie's direct method, tau-leaping and an RK4 mean-field counterpart.

A :class:`ReactionSystem` is the stoichiometry matrix plus a propensity
function. Its mean-field ODE is ``dy/dt = V^T w(y)`` with the same
propensity formulas evaluated at real-valued states.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, ModelError, NumericalError
from .processes import Trajectory, time_grid
from .samplers import sample_poisson

__all__ = [
    "ReactionSystem",
    "SsaEvent",
    "TauLeapResult",
    "ModelFile",
    "total_propensity",
    "gillespie_step",
    "run_ssa",
    "tau_leap_step",
    "run_tau_leap",
    "run_deterministic",
    "mean_field",
    "resample_to_grid",
    "sir",
    "michaelis_menten",
    "lotka_volterra",
    "decay",
    "birth",
    "MODELS",
    "load_model",
]

_TINY = math.nextafter(0.0, 1.0)


@dataclass(frozen=True)
class ReactionSystem:
    """Species names, one state-change row per reaction, and propensities.

    ``propensity(state)`` returns the ``m`` reaction rates for a state vector.
    """

    species: tuple
    state_change: np.ndarray
    propensity: Callable
    rates: Mapping[str, float] = field(default_factory=dict)
    reaction_names: tuple = ()

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.state_change, dtype=np.int64))
        species = tuple(self.species)
        if v.shape[1] != len(species):
            raise ConfigError(f"state-change rows have {v.shape[1]} entries for {len(species)} species")
        v.setflags(write=False)
        object.__setattr__(self, "state_change", v)
        object.__setattr__(self, "species", species)
        names = tuple(self.reaction_names) or tuple(f"r{j + 1}" for j in range(v.shape[0]))
        if len(names) != v.shape[0]:
            raise ConfigError(f"{len(names)} reaction names for {v.shape[0]} reactions")
        object.__setattr__(self, "reaction_names", names)
        object.__setattr__(self, "rates", dict(self.rates))

    @property
    def n_reactions(self) -> int:
        return self.state_change.shape[0]

    @property
    def n_species(self) -> int:
        return self.state_change.shape[1]


def _propensities(sys: ReactionSystem, state) -> list:
    w = sys.propensity(state)
    w = w.tolist() if isinstance(w, np.ndarray) else [float(x) for x in w]
    if len(w) != sys.n_reactions:
        raise ModelError(f"propensity returned {len(w)} rates, expected {sys.n_reactions}")
    for j, x in enumerate(w):
        if not (x >= 0 and math.isfinite(x)):
            raise ModelError(f"propensity of {sys.reaction_names[j]} is {x!r} at state {list(state)}")
    return w


def _select(w: list, a: float, u: float) -> int:
    """Smallest ``k`` with ``u <= cumsum(w / a)[k]``, the sum pinned to 1 from
    the last positive rate on (same convention as :func:`samplers.search_cdf`)."""
    last = max(k for k, x in enumerate(w) if x > 0)
    u = max(u, _TINY)
    acc = 0.0
    for k, x in enumerate(w):
        acc += x / a
        if u <= (1.0 if k >= last else acc):
            return k
    return last


def total_propensity(sys: ReactionSystem, state) -> float:
    return float(sum(_propensities(sys, state)))


@dataclass(frozen=True)
class SsaEvent:
    tau: float
    reaction_index: int
    new_state: np.ndarray


def gillespie_step(sys: ReactionSystem, state, t: float, stream) -> SsaEvent | None:
    """One event of the direct method, or ``None`` when every propensity is zero.

    ``u1`` sets the waiting time ``-ln(1 - u1) / a``; ``u2`` then picks the
    reaction from the cumulative shares ``w / a``.
    """
    state = np.asarray(state, dtype=np.int64)
    w = _propensities(sys, state)
    a = sum(w)
    if a == 0:
        return None
    tau = -math.log1p(-stream.next_uniform()) / a
    k = _select(w, a, stream.next_uniform())
    new = state + sys.state_change[k]
    if np.any(new < 0):
        raise ModelError(
            f"reaction {sys.reaction_names[k]} drove the state negative at t={t:.6g}: {new.tolist()}"
        )
    return SsaEvent(tau, k, new)


def run_ssa(sys: ReactionSystem, initial, t_final: float, stream, max_events: int = 10**7) -> Trajectory:
    """Every event on ``[0, t_final]``; stops at extinction or when the next time exceeds ``t_final``."""
    state = np.asarray(initial, dtype=np.int64)
    if state.shape != (sys.n_species,) or np.any(state < 0):
        raise ConfigError(f"initial state must be {sys.n_species} non-negative integers")
    times = [0.0]
    states = [state]
    t = 0.0
    for _ in range(max_events):
        ev = gillespie_step(sys, state, t, stream)
        if ev is None or t + ev.tau > t_final:
            break
        t += ev.tau
        state = ev.new_state
        times.append(t)
        states.append(state)
    else:
        raise NumericalError(f"more than {max_events} events before t={t_final}")
    return Trajectory(np.array(times), np.array(states))


def resample_to_grid(traj: Trajectory, grid) -> np.ndarray:
    """State in force at each grid time (the last event at or before it)."""
    grid = np.asarray(grid, dtype=float)
    if grid.size and grid[0] < traj.times[0]:
        raise ConfigError("grid starts before the trajectory")
    idx = np.searchsorted(traj.times, grid, side="right") - 1
    return traj.states[idx]


# ---------------------------------------------------------------------------
# tau-leaping


@dataclass(frozen=True)
class TauLeapResult:
    trajectory: Trajectory
    clamp_count: int


def tau_leap_step(sys: ReactionSystem, state, tau: float, stream):
    """Fire ``Poisson(w_j tau)`` copies of each reaction.

    Returns ``(new_state, n_clamped)``: components that would go negative are
    set to zero and counted.
    """
    if not tau > 0:
        raise ConfigError(f"tau must be positive, got {tau}")
    state = np.asarray(state, dtype=np.int64)
    w = _propensities(sys, state)
    fires = np.array([sample_poisson(wj * tau, stream) for wj in w], dtype=np.int64)
    new = state + fires @ sys.state_change
    neg = new < 0
    return np.where(neg, 0, new), int(neg.sum())


def run_tau_leap(sys: ReactionSystem, initial, t_final: float, tau: float, stream) -> TauLeapResult:
    state = np.asarray(initial, dtype=np.int64)
    if state.shape != (sys.n_species,) or np.any(state < 0):
        raise ConfigError(f"initial state must be {sys.n_species} non-negative integers")
    grid = time_grid(0.0, t_final, tau)
    states = [state]
    clamps = 0
    for k in range(grid.size - 1):
        state, c = tau_leap_step(sys, state, grid[k + 1] - grid[k], stream)
        clamps += c
        states.append(state)
    return TauLeapResult(Trajectory(grid, np.array(states)), clamps)


# ---------------------------------------------------------------------------
# deterministic counterpart


def mean_field(sys: ReactionSystem) -> Callable:
    v = sys.state_change.astype(float)

    def rhs(t, y):
        return np.asarray(sys.propensity(y), dtype=float) @ v

    return rhs


def run_deterministic(rhs: Callable, initial, t_span, dt: float | None = None) -> Trajectory:
    """Classical fixed-step RK4; the default step is a thousandth of the span."""
    t0, t1 = (float(x) for x in t_span)
    if not t0 < t1:
        raise ConfigError(f"need t0 < t_end, got {t_span}")
    dt = (t1 - t0) * 1e-3 if dt is None else float(dt)
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    grid = time_grid(t0, t1, dt)
    y = np.atleast_1d(np.asarray(initial, dtype=float)).copy()
    out = np.empty((grid.size, y.size))
    out[0] = y
    for k in range(grid.size - 1):
        t = grid[k]
        h = grid[k + 1] - t
        k1 = np.asarray(rhs(t, y), dtype=float)
        k2 = np.asarray(rhs(t + h / 2, y + h / 2 * k1), dtype=float)
        k3 = np.asarray(rhs(t + h / 2, y + h / 2 * k2), dtype=float)
        k4 = np.asarray(rhs(t + h, y + h * k3), dtype=float)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NumericalError(f"non-finite state at step {k + 1} (t={grid[k + 1]:.6g})")
        out[k + 1] = y
    return Trajectory(grid, out)


# ---------------------------------------------------------------------------
# model library


def sir(mu: float = 1e-4, beta: float = 0.25, gamma: float = 0.05) -> ReactionSystem:
    """Susceptible-infected-recovered with equal birth and death rates.

    Reactions: birth into S, infection, recovery, and death from each class.
    Infection runs at ``beta * S * I / N``.
    """

    def w(y):
        S, I, R = y[0], y[1], y[2]
        N = S + I + R
        inf = beta * S * I / N if N > 0 else 0.0
        return np.array([mu * N, inf, gamma * I, mu * S, mu * I, mu * R])

    v = [[1, 0, 0], [-1, 1, 0], [0, -1, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]]
    return ReactionSystem(
        ("S", "I", "R"), v, w, {"mu": mu, "beta": beta, "gamma": gamma},
        ("birth", "infection", "recovery", "death_S", "death_I", "death_R"),
    )


def michaelis_menten(c1: float = 0.002, c2: float = 0.1, c3: float = 0.75) -> ReactionSystem:
    """Enzyme kinetics on the state ``(S, E, C, P)``."""

    def w(y):
        return np.array([c1 * y[0] * y[1], c2 * y[2], c3 * y[2]])

    v = [[-1, -1, 1, 0], [1, 1, -1, 0], [0, 1, -1, 1]]
    return ReactionSystem(("S", "E", "C", "P"), v, w, {"c1": c1, "c2": c2, "c3": c3}, ("bind", "unbind", "convert"))


def lotka_volterra(alpha: float = 1.0, beta: float = 0.005, gamma: float = 0.6) -> ReactionSystem:
    """Predator-prey on the state ``(F, R)``: prey birth, predation, predator death."""

    def w(y):
        F, R = y[0], y[1]
        return np.array([alpha * R, beta * R * F, gamma * F])

    v = [[0, 1], [1, -1], [-1, 0]]
    return ReactionSystem(("F", "R"), v, w, {"alpha": alpha, "beta": beta, "gamma": gamma}, ("prey_birth", "predation", "predator_death"))


def decay(lam: float = 0.5) -> ReactionSystem:
    return ReactionSystem(("y",), [[-1]], lambda y: np.array([lam * y[0]]), {"lam": lam}, ("decay",))


def birth(c: float = 1.0) -> ReactionSystem:
    """Constant-rate source of a single species."""
    return ReactionSystem(("y",), [[1]], lambda y: np.array([c]), {"c": c}, ("birth",))


# name -> (constructor, default initial state, default final time)
MODELS = {
    "sir": (sir, [198, 2, 0], 120.0),
    "michaelis_menten": (michaelis_menten, [200, 300, 100, 50], 50.0),
    "lotka_volterra": (lotka_volterra, [50, 100], 30.0),
    "decay": (decay, [1000], 4.0),
    "birth": (birth, [0], 2.0),
}


# ---------------------------------------------------------------------------
# JSON model files


@dataclass(frozen=True)
class ModelFile:
    system: ReactionSystem
    initial: np.ndarray
    t_final: float | None


def _template(kind: str, rate: float, reactants: list[tuple[int, int]], n_species: int) -> Callable:
    def combos(y):
        out = rate
        for i, order in reactants:
            yi = y[i]
            c = 1.0
            for r in range(order):
                c *= (yi - r) / (r + 1)
            out *= max(c, 0.0)
        return out

    if kind == "mass_action":
        return combos
    if kind == "mass_action_per_capita":
        return lambda y: combos(y) / sum(y) if sum(y) > 0 else 0.0
    if kind == "population":
        return lambda y: rate * sum(y)
    raise ConfigError(f"unknown propensity template {kind!r}")


def load_model(source) -> ModelFile:
    """Build a system from JSON.

    Each reaction has ``reactants`` (species -> order), ``change`` (species ->
    net change), a ``rate`` naming an entry of ``rates``, and a ``propensity``
    template: ``mass_action`` (rate times the number of reactant combinations,
    so ``c y(y-1)/2`` for a dimer and ``c`` for a source), ``mass_action_per_capita``
    (the same divided by the total population) or ``population`` (rate times the
    total population).
    """
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read model file {source}: {exc}") from exc
    else:
        data = source
    try:
        species = list(data["species"])
        rates = {k: float(v) for k, v in data.get("rates", {}).items()}
        reactions = data["reactions"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"model file needs 'species' and 'reactions': {exc}") from exc
    pos = {s: i for i, s in enumerate(species)}
    rows, fns, names = [], [], []
    for j, r in enumerate(reactions):
        try:
            rate = r["rate"]
            rate = rates[rate] if isinstance(rate, str) else float(rate)
            reactants = [(pos[s], int(o)) for s, o in r.get("reactants", {}).items()]
            row = [0] * len(species)
            for s, d in r["change"].items():
                row[pos[s]] = int(d)
        except KeyError as exc:
            raise ConfigError(f"reaction {j}: unknown name {exc}") from exc
        rows.append(row)
        fns.append(_template(r.get("propensity", "mass_action"), rate, reactants, len(species)))
        names.append(r.get("name", f"r{j + 1}"))

    def w(y):
        return np.array([f(y) for f in fns])

    system = ReactionSystem(tuple(species), rows, w, rates, tuple(names))
    initial = np.asarray(data.get("initial", [0] * len(species)), dtype=np.int64)
    if initial.shape != (len(species),):
        raise ConfigError("'initial' must list one count per species")
    t_final = data.get("t_final")
    return ModelFile(system, initial, None if t_final is None else float(t_final))
