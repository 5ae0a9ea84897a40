"""Finite discrete-time Markov chains."""
from __future__ import annotations

import json
import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, NumericalError
from .montecarlo import EstimateReport
from .samplers import cumulative, search_cdf

_TINY = np.nextafter(0.0, 1.0)

__all__ = [
    "TransitionMatrix",
    "ChainClassification",
    "ChainSpec",
    "as_probability_vector",
    "step_distribution",
    "n_step_matrix",
    "stationary_distribution",
    "classify",
    "generate_chain",
    "generate_chains",
    "estimate_chain_event",
    "load_chain",
]

_REPAIR_TOL = 1e-9
_EXACT_TOL = 1e-12


def _repair_rows(p: np.ndarray, what: str) -> np.ndarray:
    if np.any(~np.isfinite(p)):
        raise ConfigError(f"{what} has non-finite entries")
    if np.any(p < -_EXACT_TOL) or np.any(p > 1 + _EXACT_TOL):
        raise ConfigError(f"{what} has entries outside [0, 1]")
    p = np.clip(p, 0.0, 1.0)
    dev = np.abs(p.sum(axis=-1) - 1.0)
    worst = float(dev.max())
    if worst > _REPAIR_TOL:
        raise ConfigError(f"{what} does not sum to 1 (off by {worst:.3e})")
    if worst > _EXACT_TOL:
        warnings.warn(f"{what} renormalized (sum off by {worst:.3e})", RuntimeWarning, stacklevel=3)
        p = p / p.sum(axis=-1, keepdims=True)
    return p


def as_probability_vector(pi, m: int | None = None) -> np.ndarray:
    pi = np.asarray(pi, dtype=float)
    if pi.ndim != 1 or (m is not None and pi.size != m):
        raise ConfigError(f"probability vector must be 1-d of length {m}, got shape {pi.shape}")
    return _repair_rows(pi, "probability vector")


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix with state labels. The array is read-only."""

    P: np.ndarray
    labels: tuple = field(default=())

    def __init__(self, P, labels: Sequence[str] | None = None):
        P = np.array(P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
            raise ConfigError(f"transition matrix must be square, got shape {P.shape}")
        P = _repair_rows(P, "transition matrix")
        P.setflags(write=False)
        m = P.shape[0]
        labels = tuple(str(i) for i in range(m)) if labels is None else tuple(labels)
        if len(labels) != m or len(set(labels)) != m:
            raise ConfigError(f"need {m} distinct labels, got {labels}")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return self.P.shape[0]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ConfigError(f"unknown state {label!r}; states are {list(self.labels)}") from None


def _matrix(P) -> TransitionMatrix:
    return P if isinstance(P, TransitionMatrix) else TransitionMatrix(P)


def step_distribution(pi, P) -> np.ndarray:
    """One step of the distribution: the row vector ``pi @ P``."""
    P = _matrix(P)
    pi = as_probability_vector(pi, P.size)
    out = pi @ P.P
    return out / out.sum()


def n_step_matrix(P, t: int) -> TransitionMatrix:
    P = _matrix(P)
    if int(t) != t or t < 0:
        raise ConfigError(f"t must be a non-negative integer, got {t}")
    return TransitionMatrix(np.linalg.matrix_power(P.P, int(t)), P.labels)


@dataclass(frozen=True)
class ChainClassification:
    """Communicating classes and their periods.

    ``periods[i]`` is ``None`` for a class with no return path (a single
    transient state without a self-loop).
    """

    classes: tuple
    periods: tuple
    closed: tuple

    @property
    def irreducible(self) -> bool:
        return len(self.classes) == 1

    @property
    def aperiodic(self) -> bool:
        return all(d == 1 for d in self.periods)

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic


def _reachable(adj: list[list[int]], src: int) -> set[int]:
    seen = {src}
    todo = [src]
    while todo:
        u = todo.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def _period(adj: list[list[int]], members: list[int]) -> int | None:
    inside = set(members)
    root = members[0]
    level = {root: 0}
    q = deque([root])
    g = 0
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in inside:
                continue
            if v not in level:
                level[v] = level[u] + 1
                q.append(v)
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return g or None


def classify(P) -> ChainClassification:
    P = _matrix(P)
    m = P.size
    adj = [np.flatnonzero(P.P[i] > 0).tolist() for i in range(m)]
    reach = [_reachable(adj, i) for i in range(m)]
    seen: set[int] = set()
    classes, periods, closed = [], [], []
    for i in range(m):
        if i in seen:
            continue
        members = sorted(j for j in reach[i] if i in reach[j])
        seen.update(members)
        classes.append(tuple(members))
        periods.append(_period(adj, members))
        closed.append(all(reach[j] <= set(members) for j in members))
    return ChainClassification(tuple(classes), tuple(periods), tuple(closed))


def stationary_distribution(P, tol: float = 1e-10, max_iter: int = 10**6, check_ergodic: bool = True) -> np.ndarray:
    """Power iteration ``pi <- pi P`` from the uniform vector.

    Raises :class:`NumericalError` for non-ergodic chains unless
    ``check_ergodic`` is off, and when the L-infinity residual is still above
    ``tol`` after ``max_iter`` steps.
    """
    P = _matrix(P)
    if check_ergodic:
        c = classify(P)
        if not c.ergodic:
            why = "reducible" if not c.irreducible else f"periodic (periods {list(c.periods)})"
            raise NumericalError(f"chain is not ergodic ({why}); no unique limiting distribution")
    pi = np.full(P.size, 1.0 / P.size)
    resid = math.inf
    for _ in range(int(max_iter)):
        nxt = pi @ P.P
        nxt /= nxt.sum()
        resid = float(np.max(np.abs(nxt - pi)))
        pi = nxt
        if resid < tol:
            break
    else:
        raise NumericalError(f"power iteration did not converge: residual {resid:.3e} after {max_iter} steps")
    final = float(np.max(np.abs(pi @ P.P - pi)))
    if final >= tol:
        raise NumericalError(f"fixed-point residual {final:.3e} not below tol {tol:.1e}")
    return pi


def generate_chain(pi0, P, n: int, stream) -> np.ndarray:
    """State indices ``X_0 .. X_{n-1}`` of one realization."""
    return generate_chains(pi0, P, n, 1, stream)[0]


def generate_chains(pi0, P, n: int, n_paths: int, stream) -> np.ndarray:
    """``n_paths`` independent realizations of length ``n``, shape ``(n_paths, n)``.

    Uniforms are drawn one time step at a time across all paths.
    """
    P = _matrix(P)
    pi0 = as_probability_vector(pi0, P.size)
    if n < 1 or n_paths < 1:
        raise ConfigError(f"need n >= 1 and n_paths >= 1, got {n}, {n_paths}")
    cdf0 = cumulative(pi0)
    rows = cumulative(P.P)
    out = np.empty((n_paths, n), dtype=np.int64)
    out[:, 0] = search_cdf(cdf0, stream.uniforms(n_paths))
    for t in range(1, n):
        u = np.maximum(stream.uniforms(n_paths), _TINY)
        cur = rows[out[:, t - 1]]
        out[:, t] = (cur < u[:, None]).sum(axis=1)
    return out


def estimate_chain_event(
    pi0, P, horizon: int, predicate: Callable, n_sims: int, stream, level: float = 0.95
) -> EstimateReport:
    """Probability that ``predicate(path)`` holds for the path ``X_0 .. X_horizon``."""
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    paths = generate_chains(pi0, P, horizon + 1, n_sims, stream)
    hits = np.fromiter((bool(predicate(p)) for p in paths), dtype=float, count=n_sims)
    return EstimateReport.from_values(hits, level)


@dataclass(frozen=True)
class ChainSpec:
    matrix: TransitionMatrix
    pi0: np.ndarray

    def to_json(self) -> dict:
        return {"labels": list(self.matrix.labels), "P": self.matrix.P.tolist(), "pi0": self.pi0.tolist()}


def load_chain(source) -> ChainSpec:
    """Read ``{"labels": [...], "P": [[...]], "pi0": [...]}`` from a path or dict."""
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read chain file {source}: {exc}") from exc
    else:
        data = source
    if not isinstance(data, dict) or "P" not in data:
        raise ConfigError("chain spec needs a 'P' matrix")
    matrix = TransitionMatrix(data["P"], data.get("labels"))
    pi0 = data.get("pi0")
    pi0 = np.full(matrix.size, 1.0 / matrix.size) if pi0 is None else as_probability_vector(pi0, matrix.size)
    return ChainSpec(matrix, pi0)
