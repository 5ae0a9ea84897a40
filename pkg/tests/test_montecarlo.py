import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simlab import montecarlo as mc
from simlab import samplers
from simlab.errors import ConfigError, ModelError
from simlab.rng import RandomStream
from simlab.scenarios import tail_importance_spec

from conftest import ci_covers

SIN_EXACT = 1 - math.cos(1.0)
PHI_M45 = 3.3976731247300535e-06  # scipy.stats.norm.cdf(-4.5)
DELTA_T2 = 1.282195102693534  # quadrature of the two posterior integrals at t=2


@pytest.mark.parametrize("level,z,tol", [(0.95, 1.96, 0.005), (0.99, 2.576, 0.005), (0.999, 3.29, 0.01), (0.9, 1.645, 0.005)])
def test_z_quantile(level, z, tol):
    assert abs(mc.z_quantile(level) - z) <= tol


def test_z_quantile_off_table():
    assert mc.z_quantile(0.8) == pytest.approx(1.2815515655446004, abs=1e-12)
    with pytest.raises(ConfigError):
        mc.z_quantile(1.0)


def test_constant_integrand_has_no_spread(stream):
    r = mc.estimate_mean(lambda x: np.full_like(x, 3.5), lambda s, n: s.uniforms(n), 100, stream)
    assert (r.mean, r.std, r.half_width) == (3.5, 0.0, 0.0)
    r = mc.integrate_interval(lambda x: np.ones_like(x), 2.0, 5.0, 100, stream)
    assert r.mean == 3.0 and r.half_width == 0.0


def test_sin_integral(stream):
    r = mc.integrate_interval(np.sin, 0.0, 1.0, 10**5, stream)
    assert abs(r.mean - SIN_EXACT) <= 5 * r.std / math.sqrt(r.n)


def test_quarter_circle_pi(stream):
    r = mc.integrate_interval(lambda x: 4 * np.sqrt(1 - x * x), 0.0, 1.0, 10**6, stream, level=0.99)
    ci_covers(r, math.pi)


def test_exponential_weighted_integral(stream):
    r = mc.estimate_mean(lambda x: (x * x - x) / 0.5, lambda s, n: samplers.sample_exponential(0.5, s, size=n), 10**5, stream)
    ci_covers(r, 12.0)


def test_gaussian_weighted_integral(stream):
    c = math.sqrt(2 * math.pi)
    r = mc.estimate_mean(lambda x: c * (x**4 - x + 1), lambda s, n: samplers.standard_normals(n, s), 10**5, stream)
    ci_covers(r, 4 * c)


def test_importance_identity_envelope_is_plain_mean():
    f = lambda x: np.exp(-x)  # noqa: E731
    spec = mc.ImportanceSpec(f, f, lambda x: x * x, lambda s, n: samplers.sample_exponential(1.0, s, size=n))
    a = mc.importance_estimate(spec, 1000, RandomStream(1))
    b = mc.estimate_mean(lambda x: x * x, lambda s, n: samplers.sample_exponential(1.0, s, size=n), 1000, RandomStream(1))
    assert a == b


def test_importance_tail(stream):
    r = mc.importance_estimate(tail_importance_spec(-4.5), 10**5, stream)
    assert abs(r.mean - PHI_M45) / PHI_M45 < 1e-2


def test_importance_beats_naive_variance():
    # large enough n that the naive indicator sees the tail at all
    n = 10**7
    is_rep = mc.importance_estimate(tail_importance_spec(-4.5), n, RandomStream(1))
    naive = mc.estimate_tail_naive(-4.5, n, RandomStream(2))
    assert is_rep.std**2 < naive.std**2


@settings(max_examples=40, deadline=None)
@given(c=st.floats(1e-3, 1e3), c2=st.floats(1e-3, 1e3))
def test_self_normalized_scale_invariance(c, c2):
    base = tail_importance_spec(-3.0)

    def scaled(k_f, k_l):
        return mc.ImportanceSpec(
            lambda x: k_f * base.target_pdf(x), lambda x: k_l * base.envelope_pdf(x),
            base.performance, base.envelope_sampler, self_normalized=True,
        )

    a = mc.importance_estimate(scaled(1.0, 1.0), 2000, RandomStream(5))
    b = mc.importance_estimate(scaled(c, c2), 2000, RandomStream(5))
    # weights are rescaled by c/c2, which cancels up to rounding
    assert b.mean == pytest.approx(a.mean, rel=1e-12)


def test_importance_support_violation():
    spec = mc.ImportanceSpec(lambda x: np.ones_like(x), lambda x: np.where(x < 0.5, 2.0, 0.0), lambda x: x, lambda s, n: s.uniforms(n))
    with pytest.raises(ModelError):
        mc.importance_estimate(spec, 100, RandomStream(0))


def test_naive_tail_cases():
    r = mc.estimate_tail_naive(0.0, 10**6, RandomStream(3))
    assert abs(r.mean - 0.5) <= 3 * 0.5 / math.sqrt(r.n)
    # rare event with few samples: nothing is seen
    assert mc.estimate_tail_naive(-4.5, 10**3, RandomStream(4)).mean == 0.0
    assert mc.estimate_tail_naive(10.0, 10**4, RandomStream(5)).mean == 1.0


def test_convergence_slopes():
    grid = [10**k for k in range(2, 7)]
    tab = mc.convergence_study(lambda n, s: mc.integrate_interval(np.sin, 0, 1, n, s).mean, SIN_EXACT, grid, 10, RandomStream(0))
    assert -0.65 <= tab.slope <= -0.35
    mid = mc.midpoint_study(np.sin, 0.0, 1.0, SIN_EXACT, [10, 20, 40, 80, 160, 320])
    assert -2.1 <= mid.slope <= -1.9


def test_degenerate_grid():
    tab = mc.convergence_study(lambda n, s: 0.0, 1.0, [100], 3, RandomStream(0))
    assert tab.rows() == [(100, 1.0)] and tab.slope is None


def test_unbiased_over_replications():
    root = RandomStream(10)
    means = np.array([mc.integrate_interval(np.sin, 0, 1, 1000, root.spawn(r)).mean for r in range(200)])
    assert abs(means.mean() - SIN_EXACT) <= 5 * means.std(ddof=1) / math.sqrt(200)


def test_ci_calibration():
    root = RandomStream(11)
    cover = [mc.integrate_interval(np.sin, 0, 1, 1000, root.spawn(r)).covers(SIN_EXACT) for r in range(500)]
    assert 0.91 <= np.mean(cover) <= 0.985


def test_sharded_matches_pooled_moments():
    g = lambda x: x * x  # noqa: E731
    sampler = lambda s, n: s.uniforms(n)  # noqa: E731
    root = RandomStream(12)
    r = mc.estimate_mean_sharded(g, sampler, 1003, root, 4)
    parts = np.concatenate([root.spawn(i).uniforms(m) ** 2 for i, m in enumerate([251, 251, 251, 250])])
    assert r.n == 1003
    assert r.mean == pytest.approx(parts.mean(), rel=1e-13)
    assert r.std == pytest.approx(parts.std(ddof=1), rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(xs=st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=60), cut=st.integers(2, 58))
def test_pool_reports_equals_single_report(xs, cut):
    cut = min(cut, len(xs) - 2)
    whole = mc.EstimateReport.from_values(xs)
    pooled = mc.pool_reports([mc.EstimateReport.from_values(xs[:cut]), mc.EstimateReport.from_values(xs[cut:])])
    assert pooled.n == whole.n
    assert pooled.mean == pytest.approx(whole.mean, rel=1e-9, abs=1e-9)
    assert pooled.std == pytest.approx(whole.std, rel=1e-7, abs=1e-7)


def test_normal_cauchy_delta():
    r = mc.normal_cauchy_delta(2.0, 10**5, RandomStream(13))
    ci_covers(r, DELTA_T2)


def test_normal_cauchy_delta_symmetry():
    # draws X and -X are equally likely at t=0, so the estimate is centred on 0
    r = mc.normal_cauchy_delta(0.0, 10**5, RandomStream(14))
    ci_covers(r, 0.0)


def test_report_needs_two_points():
    with pytest.raises(ConfigError):
        mc.EstimateReport.from_values([1.0])
