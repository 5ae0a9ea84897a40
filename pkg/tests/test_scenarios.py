import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from simlab import scenarios
from simlab.errors import ConfigError
from simlab.rng import RandomStream

BOARD = Path(__file__).resolve().parents[1] / "boards" / "default.json"


def _absorbing_oracle(size, jumps, horizon=30):
    """Expected rolls and P(X = horizon), P(X <= horizon) from the exact-roll chain."""
    m = size + 1
    P = np.zeros((m, m))
    for s in range(size):
        for d in range(1, 7):
            nxt = s + d
            P[s, s if nxt > size else jumps.get(nxt, nxt)] += 1 / 6
    P[size, size] = 1.0
    Q = P[:size, :size]
    t = np.linalg.solve(np.eye(size) - Q, np.ones(size))
    start = np.zeros(m)
    start[0] = 1.0
    cdf = []
    v = start
    for _ in range(horizon):
        v = v @ P
        cdf.append(v[size])
    return t[0], cdf[-1] - cdf[-2], cdf[-1]


def test_monty_hall_switch_and_stay():
    s = RandomStream(0)
    sw = scenarios.monty_hall(100_000, s, switch=True)
    stay = scenarios.monty_hall(100_000, s, switch=False)
    assert abs(sw.mean() - 2 / 3) < 4 * np.sqrt(2 / 9 / 1e5)
    assert abs(stay.mean() - 1 / 3) < 4 * np.sqrt(2 / 9 / 1e5)


def test_monty_hall_switch_loses_exactly_when_first_pick_was_right():
    # same stream state for both strategies: the outcomes are complementary
    a = scenarios.monty_hall(1000, RandomStream(1), switch=True)
    b = scenarios.monty_hall(1000, RandomStream(1), switch=False)
    assert np.all(a + b == 1)


def test_default_board_matches_bundled_copy():
    bundled = Path(scenarios.__file__).with_name("boards") / "default.json"
    assert json.loads(BOARD.read_text()) == json.loads(bundled.read_text())


def test_snakes_ladders_against_absorbing_chain():
    size, jumps = scenarios.load_board(BOARD)
    mean, p30, p_le30 = _absorbing_oracle(size, jumps)
    rolls = scenarios.play_snakes_ladders(size, jumps, 20_000, RandomStream(2))
    se = rolls.std(ddof=1) / np.sqrt(rolls.size)
    assert abs(rolls.mean() - mean) < 4 * se
    assert abs(np.mean(rolls == 30) - p30) < 4 * np.sqrt(p30 * (1 - p30) / rolls.size)
    assert abs(np.mean(rolls <= 30) - p_le30) < 4 * np.sqrt(p_le30 * (1 - p_le30) / rolls.size)


def test_exact_roll_finish_on_tiny_board():
    # size 1 finishes only on a roll of 1: a geometric count with mean 6
    rolls = scenarios.play_snakes_ladders(1, {}, 30_000, RandomStream(3))
    assert rolls.min() == 1
    assert abs(rolls.mean() - 6.0) < 4 * np.sqrt(30 / 30_000)


@pytest.mark.parametrize(
    "board",
    [
        {"jumps": {}},
        {"size": 10, "jumps": {"12": 3}},
        {"size": 10, "jumps": {"4": 4}},
        {"size": 10, "jumps": {"a": 4}},
    ],
)
def test_bad_boards(board, tmp_path):
    path = tmp_path / "b.json"
    path.write_text(json.dumps(board))
    with pytest.raises(ConfigError):
        scenarios.load_board(path)


def test_trapped_board_gives_up():
    # a snake on every square 2..7 sends every token back to 1 forever
    jumps = {k: 1 for k in range(2, 8)}
    with pytest.raises(ConfigError):
        scenarios.play_snakes_ladders(8, jumps, 10, RandomStream(4), max_rolls=200)


def test_chain_registry_exact_values():
    w = scenarios.CHAINS["weather"]
    five = w.pi0 @ np.linalg.matrix_power(w.matrix.P, 5)
    assert five[2] == pytest.approx(float(Fraction(205, 512)), abs=1e-14)
    f = scenarios.CHAINS["purchase_funnel"]
    six = f.pi0 @ np.linalg.matrix_power(f.matrix.P, 6)
    assert six[3] == pytest.approx(float(Fraction(21417, 50000)), abs=1e-14)


def test_tail_importance_weights():
    spec = scenarios.tail_importance_spec(-4.5)
    x = np.array([-6.0, -4.5, -4.4])
    assert spec.envelope_pdf(x).tolist() == [np.exp(-1.5), 1.0, 0.0]
    assert spec.performance(x).tolist() == [1.0, 1.0, 0.0]


def test_black_scholes_reference():
    from scipy.stats import norm

    S0, K, r, sig, T = 102.0, 100.0, 0.04, 0.3, 0.5
    d1 = (np.log(S0 / K) + (r + sig**2 / 2) * T) / (sig * np.sqrt(T))
    ref = S0 * norm.cdf(d1) - K * np.exp(-r * T) * norm.cdf(d1 - sig * np.sqrt(T))
    assert scenarios.black_scholes_call(S0, K, r, sig, T) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("name", ["mc_sin", "weather_chain", "gamblers_ruin", "monty_hall", "recovery_rate"])
def test_scenario_results_are_reproducible(name):
    fn, defaults, _ = scenarios.SCENARIOS[name]
    a = fn(dict(defaults), 2000, RandomStream(5))
    b = fn(dict(defaults), 2000, RandomStream(5))
    assert a.summary_row() == b.summary_row()
