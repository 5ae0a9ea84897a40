import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from simlab import samplers
from simlab.errors import ConfigError, ModelError, NumericalError
from simlab.rng import FixedStream, RandomStream

from conftest import assert_close_clt

N = 10**5


# -- discrete ---------------------------------------------------------------


def test_fair_die_boundary():
    die = samplers.DiscreteDistribution.uniform_over([1, 2, 3, 4, 5, 6])
    assert samplers.sample_discrete(die, FixedStream([0.5])) == 3


def test_degenerate_distribution():
    d = samplers.DiscreteDistribution([7.0], [1.0])
    assert samplers.sample_discrete(d, FixedStream([0.0])) == 7.0
    assert samplers.sample_discrete(d, FixedStream([0.999])) == 7.0


def test_zero_mass_states_unreachable():
    d = samplers.DiscreteDistribution([0, 1, 2, 3], [0.0, 0.3, 0.7, 0.0])
    got = samplers.sample_discrete(d, FixedStream([0.0, 1 - 2**-53, 0.3]), size=3)
    assert got.tolist() == [1, 2, 1]


@settings(max_examples=100, deadline=None)
@given(w=st.lists(st.floats(min_value=0.01, max_value=10.0), min_size=1, max_size=12))
def test_interior_points_hit_each_state(w):
    probs = np.array(w) / np.sum(w)
    d = samplers.DiscreteDistribution(np.arange(len(w)), probs)
    lower = np.concatenate([[0.0], d.cdf[:-1]])
    mids = (lower + d.cdf) / 2
    assert samplers.sample_discrete(d, FixedStream(mids), size=len(w)).tolist() == list(range(len(w)))


def test_die_frequencies(stream):
    die = samplers.DiscreteDistribution.uniform_over([1, 2, 3, 4, 5, 6])
    x = samplers.sample_discrete(die, stream, size=N)
    freq = np.bincount(x, minlength=7)[1:] / N
    assert np.all(np.abs(freq - 1 / 6) <= 5 * math.sqrt(N * (1 / 6) * (5 / 6)) / N)


@pytest.mark.parametrize("states,probs", [([1, 1], [0.5, 0.5]), ([1, 2], [0.5, 0.6]), ([1, 2], [-0.1, 1.1]), ([], [])])
def test_discrete_validation(states, probs):
    with pytest.raises(ConfigError):
        samplers.DiscreteDistribution(states, probs)


def test_bernoulli_bounds_and_mean(stream):
    assert not samplers.sample_bernoulli(0.0, stream, size=1000).any()
    assert samplers.sample_bernoulli(1.0, stream, size=1000).all()
    assert samplers.sample_bernoulli(0.0, FixedStream([0.0])) == 0
    x = samplers.sample_bernoulli(0.6, stream, size=N)
    assert abs(x.mean() - 0.6) <= 5 * math.sqrt(0.24 / N)


def test_binomial_from_bernoullis(stream):
    x = samplers.sample_binomial(20, 0.3, stream, size=N)
    assert_close_clt(x.mean(), 6.0, math.sqrt(20 * 0.3 * 0.7), N)
    # pmf agrees with an independent binomial table
    freq = np.bincount(x, minlength=21) / N
    pmf = stats.binom.pmf(np.arange(21), 20, 0.3)
    assert np.all(np.abs(freq - pmf) <= 5 * np.sqrt(pmf * (1 - pmf) / N) + 1e-12)


def test_binomial_normal_approx(stream):
    x = samplers.sample_binomial_normal_approx(400, 0.5, stream, size=N)
    assert x.min() >= 0 and x.max() <= 400
    assert_close_clt(x.mean(), 200.0, 10.0, N)
    assert abs(x.var() / 100.0 - 1) < 0.03


@pytest.mark.parametrize("lam", [0.5, 3.0, 9.5, 10.0, 25.0, 400.0])
def test_poisson_matches_pmf(lam):
    s = RandomStream(int(lam * 10))
    n = 50_000
    x = samplers.sample_poisson(lam, s, size=n)
    assert_close_clt(x.mean(), lam, math.sqrt(lam), n)
    lo, hi = stats.poisson.ppf([0.001, 0.999], lam)
    ks = np.arange(int(lo), int(hi) + 1)
    observed = np.array([np.sum(x == k) for k in ks])
    expected = n * stats.poisson.pmf(ks, lam)
    keep = expected > 20
    chi2 = np.sum((observed[keep] - expected[keep]) ** 2 / expected[keep])
    assert stats.chi2.sf(chi2, keep.sum() - 1) > 1e-4


def test_poisson_edge_cases():
    assert samplers.sample_poisson(0.0, RandomStream(0)) == 0
    with pytest.raises(ConfigError):
        samplers.sample_poisson(-1.0, RandomStream(0))
    assert isinstance(samplers.sample_poisson(50.0, RandomStream(1)), int)


# -- inverse transform ------------------------------------------------------


def test_exponential_closed_forms():
    assert samplers.sample_exponential(1.0, FixedStream([1 - math.exp(-1)])) == pytest.approx(1.0, abs=1e-15)
    assert samplers.sample_exponential(0.5, FixedStream([0.5])) == pytest.approx(2 * math.log(2), abs=1e-15)


def test_exponential_mean(stream):
    x = samplers.sample_exponential(0.5, stream, size=N)
    assert_close_clt(x.mean(), 2.0, 2.0, N)


def test_linear_density_inverse():
    assert samplers.sample_inverse_transform(samplers.linear_density_inverse(), FixedStream([0.25])) == 0.5


def test_weibull_reduces_to_exponential():
    u = np.linspace(0, 0.999, 101)
    assert np.allclose(samplers.weibull_inverse(1.0, 2.0)(u), samplers.exponential_inverse(0.5)(u), rtol=0, atol=1e-14)


def test_weibull_against_scipy(stream):
    x = samplers.sample_inverse_transform(samplers.weibull_inverse(1.7, 3.0), stream, size=20_000)
    assert stats.kstest(x, stats.weibull_min(1.7, scale=3.0).cdf).pvalue > 1e-3


def test_sine_inverse():
    assert samplers.sine_inverse()(0.5) == pytest.approx(math.pi / 2, abs=1e-15)
    x = samplers.sample_inverse_transform(samplers.sine_inverse(), RandomStream(2), size=20_000)
    assert stats.kstest(x, lambda t: (1 - np.cos(t)) / 2).pvalue > 1e-3


@pytest.mark.parametrize("inv,dist", [
    (samplers.beta_a1_inverse(2.5), stats.beta(2.5, 1)),
    (samplers.beta_1b_inverse(3.0), stats.beta(1, 3.0)),
])
def test_beta_inverses(inv, dist):
    x = samplers.sample_inverse_transform(inv, RandomStream(5), size=20_000)
    assert stats.kstest(x, dist.cdf).pvalue > 1e-3


INVERSES = [
    samplers.exponential_inverse(0.7),
    samplers.weibull_inverse(0.6, 2.0),
    samplers.sine_inverse(),
    samplers.linear_density_inverse(),
    samplers.beta_a1_inverse(0.3),
    samplers.beta_1b_inverse(4.0),
]


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0, 1, exclude_max=True), b=st.floats(0, 1, exclude_max=True))
def test_inverses_monotone(a, b):
    lo, hi = min(a, b), max(a, b)
    for inv in INVERSES:
        assert inv(lo) <= inv(hi)


def test_ordered_statistics(stream):
    ident = lambda u: np.asarray(u)  # noqa: E731
    mx = samplers.sample_ordered_statistic(ident, 3, "max", stream, size=N)
    mn = samplers.sample_ordered_statistic(ident, 3, "min", stream, size=N)
    sd = math.sqrt(3 / (16 * 5))
    assert_close_clt(mx.mean(), 0.75, sd, N)
    assert_close_clt(mn.mean(), 0.25, sd, N)


def test_ordered_statistic_n1_is_plain_inverse():
    inv = samplers.exponential_inverse(1.3)
    a = samplers.sample_ordered_statistic(inv, 1, "max", RandomStream(4), size=100)
    b = samplers.sample_inverse_transform(inv, RandomStream(4), size=100)
    assert np.array_equal(a, b)


# -- accept-reject ----------------------------------------------------------


def test_linear_density_acceptance_rate(stream):
    _, trials = samplers.sample_accept_reject(samplers.linear_density_envelope(), stream, size=N // 2, return_trials=True)
    rate = (N // 2) / trials
    assert abs(rate - 0.5) <= 5 * math.sqrt(0.25 / trials)


def test_linear_density_cdf(stream):
    x = samplers.sample_accept_reject(samplers.linear_density_envelope(), stream, size=N)
    for t in (0.25, 0.5, 0.75):
        F = t * t
        assert abs(np.mean(x <= t) - F) <= 5 * math.sqrt(F * (1 - F) / N)


def test_semicircle_acceptance_rate(stream):
    x, trials = samplers.sample_accept_reject(samplers.semicircle_envelope(1.0), stream, size=N, return_trials=True)
    rate = N / trials
    assert abs(rate - math.pi / 4) <= 5 * math.sqrt(rate * (1 - rate) / trials)
    assert np.all(np.abs(x) <= 1)


def test_identity_envelope_accepts_everything(stream):
    env = samplers.EnvelopeSpec(lambda x: np.ones_like(x), lambda x: np.ones_like(x), 1.0, lambda s, m: s.uniforms(m))
    _, trials = samplers.sample_accept_reject(env, stream, size=1000, return_trials=True)
    assert trials == 1000


def test_envelope_violation_is_a_model_error(stream):
    env = samplers.EnvelopeSpec(lambda x: 3 * x * x, lambda x: np.ones_like(x), 1.5, lambda s, m: s.uniforms(m))
    with pytest.raises(ModelError):
        samplers.sample_accept_reject(env, stream, size=1000)
    with pytest.raises(ConfigError):
        samplers.EnvelopeSpec(lambda x: x, lambda x: x, 0.5, lambda s, m: s.uniforms(m))


def test_scalar_accept_reject():
    v = samplers.sample_accept_reject(samplers.linear_density_envelope(), RandomStream(1))
    assert isinstance(v, float) and 0 <= v <= 1


# -- normals ----------------------------------------------------------------


def test_box_muller_hand_value():
    # theta = pi/2 puts the cosine branch at zero whatever the radius
    z = samplers.sample_standard_normal(FixedStream([0.25, 1 - math.exp(-2)]))
    assert abs(z) < 1e-15
    z1, z2 = samplers.sample_standard_normal(FixedStream([0.25, 1 - math.exp(-2)]), pair=True)
    assert z2 == pytest.approx(2.0, abs=1e-15)


def test_box_muller_moments(stream):
    z = samplers.sample_standard_normal(stream, size=N)
    assert abs(z.mean()) <= 5 / math.sqrt(N)
    assert abs(z.var(ddof=1) - 1) <= 5 * math.sqrt(2 / N)
    assert abs(np.mean(z <= 0) - 0.5) <= 5 * math.sqrt(0.25 / N)


def test_box_muller_scalar_matches_batch():
    a = samplers.sample_standard_normal(RandomStream(3))
    b = samplers.standard_normals(1, RandomStream(3))
    assert a == b[0]


def test_normal_ar(stream):
    z, rounds = samplers.sample_normal_ar(stream, size=N, return_trials=True)
    rate = N / rounds
    oracle = 0.7601734505331404  # sqrt(pi / (2e))
    assert abs(rate - oracle) <= 5 * math.sqrt(oracle * (1 - oracle) / rounds)
    assert abs(z.mean()) <= 5 / math.sqrt(N)
    assert abs(np.mean(z > 0) - 0.5) <= 5 * math.sqrt(0.25 / N)
    assert stats.kstest(z[:20_000], "norm").pvalue > 1e-3


def test_multivariate_identity(stream):
    x = samplers.sample_multivariate_normal(samplers.MultiNormalSpec([0, 0], np.eye(2)), N, stream)
    assert np.all(np.abs(x.mean(axis=0)) <= 5 / math.sqrt(N))
    assert np.all(np.abs(x.var(axis=0, ddof=1) - 1) <= 5 * math.sqrt(2 / N))


def test_multivariate_cholesky_and_covariance(stream):
    cov = np.array([[1, 0.5], [0.5, 1]])
    spec = samplers.MultiNormalSpec([1.0, -2.0], cov)
    assert np.allclose(spec.chol, [[1, 0], [0.5, math.sqrt(0.75)]], atol=1e-15)
    x = samplers.sample_multivariate_normal(spec, N, stream)
    assert np.all(np.abs(np.cov(x.T) - cov) <= 5 * math.sqrt(2 / N))
    assert np.all(np.abs(x.mean(axis=0) - [1.0, -2.0]) <= 5 * np.sqrt(np.diag(cov) / N))


def test_multivariate_scalar_reduction():
    x = samplers.sample_multivariate_normal(samplers.MultiNormalSpec([3.0], [[4.0]]), 50, RandomStream(9))
    z = samplers.standard_normals(50, RandomStream(9))
    assert np.allclose(x[:, 0], 3.0 + 2.0 * z, rtol=0, atol=1e-14)


def test_multivariate_validation():
    with pytest.raises(NumericalError, match="smallest eigenvalue"):
        samplers.MultiNormalSpec([0, 0], [[1, 2], [2, 1]])
    with pytest.raises(ConfigError):
        samplers.MultiNormalSpec([0, 0], [[1, 0.2], [0.1, 1]])
