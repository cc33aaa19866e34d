"""Tests `advreg.evaluation.distances` and `advreg.evaluation.moments`."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate, stats

from advreg.evaluation import distances, moments

LN2 = np.log(2.0)


def _hist(mass):
    mass = np.asarray(mass, dtype=np.float64)
    return distances.Histogram(0.0, 1.0, len(mass), mass)


def test_ks_examples():
    assert distances.ks_distance([0.3, 0.1, 0.2], [0.1, 0.2, 0.3]) == 0.0
    assert distances.ks_distance([0.0], [1.0]) == 1.0
    assert distances.ks_distance([0.0, 1.0], [0.5, 1.5]) == 0.5
    with pytest.raises(ValueError, match="empty"):
        distances.ks_distance([], [1.0])


samples = arrays(np.float64, st.integers(1, 30), elements=st.floats(-3, 3))


@given(samples, samples)
@settings(max_examples=50, deadline=None)
def test_ks_is_symmetric_and_bounded(p, q):
    d = distances.ks_distance(p, q)
    assert 0.0 <= d <= 1.0
    assert d == distances.ks_distance(q, p)


def test_ks_to_cdf():
    assert distances.ks_distance_to_cdf([0.5], lambda x: x) == 0.5
    x = stats.norm.rvs(size=20_000, random_state=0)
    assert distances.ks_distance_to_cdf(x, stats.norm.cdf) < 0.02


def test_histogram_bins():
    hist = distances.histogram([0.101, 0.102, 0.103], 0.0, 1.0, 10)
    assert hist.mass[1] == 1.0
    at_hi = distances.histogram([1.0], 0.0, 1.0, 10)
    assert at_hi.mass[-1] == 1.0
    assert at_hi.clamped == 0


def test_histogram_clamps_out_of_range():
    hist = distances.histogram([-2.0, 0.5, 7.0, 1.0])
    assert hist.mass[0] == 0.25
    assert hist.mass[-1] == 0.25
    assert hist.clamped == 2
    assert hist.count == 4


def test_histogram_of_uniform_sample():
    rng = np.random.default_rng(0)
    hist = distances.histogram(rng.uniform(-0.5, 1.5, size=1_000_000))
    sd = np.sqrt(0.005 * 0.995 / 1_000_000)
    assert np.all(np.abs(hist.mass - 0.005) < 5 * sd)
    assert hist.mass.sum() == pytest.approx(1.0, abs=1e-12)


def test_histogram_errors():
    with pytest.raises(ValueError, match="empty"):
        distances.histogram([])
    with pytest.raises(ValueError, match="n_bins"):
        distances.histogram([0.5], n_bins=0)
    with pytest.raises(ValueError, match="lo < hi"):
        distances.histogram([0.5], lo=1.0, hi=0.0)
    with pytest.raises(ValueError, match="sum to 1"):
        _hist([0.5, 0.2])


def test_kl_examples():
    p, q = _hist([0.5, 0.5]), _hist([0.25, 0.75])
    assert distances.kl_discrete(p, p) == 0.0
    assert distances.kl_discrete(p, q) == pytest.approx(0.14384, abs=1e-5)
    assert distances.kl_discrete(q, p) != pytest.approx(distances.kl_discrete(p, q))


def test_kl_is_finite_with_empty_bins():
    kl = distances.kl_discrete(_hist([0.5, 0.5]), _hist([1.0, 0.0]))
    assert np.isfinite(kl)
    assert kl > 10


def test_js_examples():
    p = _hist([1.0, 0.0])
    assert distances.js_divergence(p, p) == 0.0
    assert distances.js_divergence(p, _hist([0.0, 1.0])) == pytest.approx(LN2)
    expected = 0.5 * np.log(4 / 3) + 0.5 * (0.5 * np.log(2 / 3) + 0.5 * LN2)
    assert distances.js_divergence(p, _hist([0.5, 0.5])) == pytest.approx(expected)
    assert expected == pytest.approx(0.21576, abs=1e-5)


masses = arrays(np.float64, 5, elements=st.floats(0.0, 1.0)).filter(
    lambda m: m.sum() > 0.1,
)


@given(masses, masses)
@settings(max_examples=50, deadline=None)
def test_js_is_symmetric_and_bounded(a, b):
    p, q = _hist(a / a.sum()), _hist(b / b.sum())
    js = distances.js_divergence(p, q)
    assert 0.0 <= js <= LN2
    assert js == pytest.approx(distances.js_divergence(q, p), abs=1e-12)
    assert distances.kl_discrete(p, q) >= -1e-12


def test_binning_mismatch():
    p = _hist([0.5, 0.5])
    q = distances.Histogram(0.0, 2.0, 2, np.array([0.5, 0.5]))
    with pytest.raises(distances.BinningMismatchError):
        distances.kl_discrete(p, q)
    with pytest.raises(distances.BinningMismatchError):
        distances.js_divergence(p, _hist([0.2, 0.3, 0.5]))


def test_moment_examples():
    m = moments.moments([0.0, 2.0])
    assert (m.mean, m.variance) == (1.0, 1.0)
    m = moments.moments([-1.0, 0.0, 1.0])
    assert m.mean == 0.0
    assert m.skewness == 0.0
    assert m.kurtosis == pytest.approx(1.5)


def test_moments_of_normal_sample():
    x = np.random.default_rng(0).standard_normal(1_000_000)
    m = moments.moments(x)
    n = len(x)
    assert abs(m.mean) < 5 / np.sqrt(n)
    assert abs(m.variance - 1.0) < 5 * np.sqrt(2 / n)
    assert abs(m.skewness) < 5 * np.sqrt(6 / n)
    assert abs(m.kurtosis - 3.0) < 5 * np.sqrt(24 / n)


def test_moments_degenerate_and_errors():
    m = moments.moments([0.5, 0.5, 0.5])
    assert m.degenerate
    assert m.variance == 0.0
    assert np.isnan(m.skewness) and np.isnan(m.kurtosis)
    with pytest.raises(ValueError, match="at least 2"):
        moments.moments([1.0])


def test_kde_of_single_point():
    grid = np.linspace(-0.5, 0.5, 101)
    density = moments.kde([0.0], grid, bandwidth=0.1)
    np.testing.assert_allclose(density, stats.norm.pdf(grid, 0.0, 0.1), rtol=1e-9)


def test_kde_direct_sum():
    sample = np.array([0.1, 0.35, 0.4, 0.8])
    grid = np.array([0.0, 0.25, 0.4, 0.6, 1.0])
    expected = stats.norm.pdf(grid[:, None], sample[None, :], 0.05).mean(axis=1)
    np.testing.assert_allclose(moments.kde(sample, grid, 0.05), expected, rtol=1e-9)


def test_kde_ignores_duplication():
    sample = np.random.default_rng(1).uniform(size=50)
    grid = np.linspace(0, 1, 21)
    np.testing.assert_allclose(
        moments.kde(sample, grid),
        moments.kde(np.concatenate([sample, sample]), grid),
        rtol=1e-9,
    )


def test_kde_integrates_to_one():
    sample = np.random.default_rng(2).normal(0.5, 0.05, size=500)
    grid = np.linspace(-0.5, 1.5, 4001)
    area = integrate.trapezoid(moments.kde(sample, grid), grid)
    assert area == pytest.approx(1.0, abs=1e-3)


def test_kde_errors():
    with pytest.raises(ValueError, match="Bandwidth"):
        moments.kde([0.0], [0.0], bandwidth=0.0)
    with pytest.raises(ValueError, match="empty"):
        moments.kde([], [0.0])
