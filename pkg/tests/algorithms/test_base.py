"""Tests for `advreg.algorithms.base` and the least-squares baseline."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advreg.algorithms import base, ols
from advreg.data import models


def test_minibatch_sizes(rng):
    batches = base.minibatches(10, 3, rng)
    assert [len(next(batches)) for _ in range(8)] == [3, 3, 3, 1, 3, 3, 3, 1]


@given(st.integers(1, 40), st.integers(1, 40))
@settings(max_examples=30, deadline=None)
def test_epoch_covers_every_row_once(n, m):
    m = min(m, n)
    rng = np.random.default_rng(0)
    batches = base.minibatches(n, m, rng)
    epoch = np.concatenate([next(batches) for _ in range(-(-n // m))])
    np.testing.assert_array_equal(np.sort(epoch), np.arange(n))


def test_epochs_are_reshuffled(rng):
    batches = base.minibatches(50, 50, rng)
    assert not np.array_equal(next(batches), next(batches))


def test_minibatches_accept_datasets(rng):
    dataset = models.sample_dataset(models.get_model("model1"), 12, seed=0)
    assert len(next(base.minibatches(dataset, 12, rng))) == 12


@pytest.mark.parametrize("m", [0, 11])
def test_minibatches_reject_bad_sizes(m, rng):
    with pytest.raises(ValueError, match="Batch size"):
        base.minibatches(10, m, rng)


def test_index_stream_spans_epochs(rng):
    stream = base.IndexStream(4, rng)
    first = stream.take(3)
    second = stream.take(3)
    assert len(first) == len(second) == 3
    np.testing.assert_array_equal(
        np.sort(np.concatenate([first, second[:1]])),
        np.arange(4),
    )
    assert len(stream.take(0)) == 0


def test_index_stream_errors(rng):
    with pytest.raises(ValueError, match="empty"):
        base.IndexStream(0, rng)
    with pytest.raises(ValueError):
        base.IndexStream(3, rng).take(-1)


def test_ols_recovers_exact_line():
    fit = ols.ols_fit(np.array([1.0, 2.0, 3.0]), np.array([2.0, 4.0, 6.0]))
    np.testing.assert_allclose(fit.beta, [2.0])
    assert fit.sigma2 == pytest.approx(0.0, abs=1e-20)
    point, variance = ols.ols_predict(fit, [4.0])
    assert point == pytest.approx(8.0)
    assert variance == pytest.approx(0.0, abs=1e-20)


def test_ols_errors():
    with pytest.raises(ValueError, match="more rows"):
        ols.ols_fit(np.eye(2), np.ones(2))
    with pytest.raises(ols.SingularMatrixError):
        ols.ols_fit(np.ones((5, 2)), np.arange(5.0))
    with pytest.raises(ValueError, match="responses"):
        ols.ols_fit(np.ones((5, 1)), np.ones(4))
    fit = ols.ols_fit(np.arange(5.0), np.arange(5.0))
    with pytest.raises(ValueError, match="entries"):
        ols.ols_predict(fit, [1.0, 2.0])


def test_ols_on_model1():
    dataset = models.sample_dataset(models.get_model("model1"), 2_000, seed=0)
    fit = ols.ols_fit(ols.with_intercept(dataset.X), dataset.Y)
    slope_se = np.sqrt(fit.sigma2 * fit.xtx_inv[1, 1])
    assert abs(fit.beta[1] - 1.0) < 4 * slope_se
    assert np.sqrt(fit.sigma2) == pytest.approx(0.05, rel=0.1)
    point, variance = ols.ols_predict(fit, [1.0, 0.4])
    assert point == pytest.approx(0.4, abs=0.01)
    assert variance > fit.sigma2
