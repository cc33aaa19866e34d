"""Tests `advreg.data`: models, the slicing oracle and dataset CSVs."""

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import signal

from advreg.data import models, oracle, serialize, types


@pytest.mark.parametrize("kind", types.MODEL_KINDS)
def test_sample_dataset_shapes(kind):
    model = models.get_model(kind)
    dataset = models.sample_dataset(model, 200, seed=1)
    assert dataset.X.shape == (200, model.input_dim)
    assert dataset.Y.shape == (200, 1)
    assert np.all((dataset.X >= 0) & (dataset.X <= 1))
    assert len(dataset) == 200


def test_sample_dataset_is_seeded():
    model = models.get_model("model3")
    a = models.sample_dataset(model, 50, seed=3)
    b = models.sample_dataset(model, 50, seed=3)
    c = models.sample_dataset(model, 50, seed=4)
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.Y, b.Y)
    assert not np.array_equal(a.Y, c.Y)


def test_sample_dataset_rejects_empty():
    with pytest.raises(ValueError, match="positive"):
        models.sample_dataset(models.get_model("model1"), 0, seed=0)


def test_unknown_model():
    with pytest.raises(ValueError, match="Unknown model"):
        models.get_model("model4")


def test_model_means():
    x = np.array([[0.0], [0.5], [1.0]])
    np.testing.assert_allclose(models.get_model("model1").mean(x), [0.0, 0.5, 1.0])
    np.testing.assert_allclose(
        models.get_model("model3").mean(x),
        x[:, 0] + 0.2 * np.sin(20 * x[:, 0]),
    )
    point = np.full((1, 5), 0.4)
    expected = (0.4 + 0.16 + np.log(1.4) + 0.2 * np.sin(8.0) - 0.4 + 1) / 3.5
    assert models.get_model("highdim5").mean(point)[0] == pytest.approx(expected)


def test_residuals_match_noise_scale():
    model = models.get_model("model1")
    dataset = models.sample_dataset(model, 20_000, seed=0)
    resid = dataset.Y[:, 0] - model.mean(dataset.X)
    assert np.std(resid) == pytest.approx(0.05, rel=0.03)


@pytest.mark.parametrize(
    "kind,x,mean,variance",
    [
        ("model1", 0.4, 0.4, 0.0025),
        ("model2", 0.5, 0.5, 0.0025),
        ("model3", 0.1, 0.1 + 0.2 * np.sin(2.0), 0.0025),
    ],
)
def test_analytic_forward_conditional(kind, x, mean, variance):
    ref = models.analytic_forward_conditional(models.get_model(kind), x)
    assert ref.mean == pytest.approx(mean)
    assert ref.variance == pytest.approx(variance)
    assert not ref.degenerate


def test_model2_degenerate_at_zero():
    ref = models.analytic_forward_conditional(models.get_model("model2"), 0.0)
    assert ref.degenerate
    assert ref.variance == 0.0


def test_highdim5_conditions_on_every_input():
    model = models.get_model("highdim5")
    point = models.condition_point(model, 0.7)
    np.testing.assert_array_equal(point, np.full(5, 0.7))
    ref = models.analytic_forward_conditional(model, point)
    assert ref.mean == pytest.approx(model.mean(point.reshape(1, -1))[0])
    with pytest.raises(ValueError):
        models.analytic_forward_conditional(model, 0.7)


def test_inverse_split():
    dataset = models.sample_dataset(models.get_model("model1"), 10, seed=0)
    cond, target = dataset.split("inverse")
    np.testing.assert_array_equal(cond, dataset.Y)
    np.testing.assert_array_equal(target, dataset.X)
    high = models.sample_dataset(models.get_model("highdim5"), 10, seed=0)
    with pytest.raises(ValueError, match="single input"):
        high.split("inverse")


def test_slice_oracle_keeps_window():
    model = models.get_model("model1")
    ref = oracle.slice_oracle(model, 0.4, width=0.02, n_oracle=50_000, chunk_size=8_000)
    assert ref.count == len(ref.values) > 0
    assert ref.n_oracle == 50_000
    # x | y = 0.4 is centred near 0.4 with spread about the noise sd.
    assert ref.mean == pytest.approx(0.4, abs=0.02)
    assert 0.02 < np.sqrt(ref.variance) < 0.08


def test_slice_oracle_is_reproducible():
    model = models.get_model("model3")
    kwargs = dict(width=0.02, n_oracle=30_000, seed=5, chunk_size=10_000)
    a = oracle.slice_oracle(model, 0.7, **kwargs)
    b = oracle.slice_oracle(model, 0.7, **kwargs)
    np.testing.assert_array_equal(a.values, b.values)


def test_slice_oracle_errors():
    model = models.get_model("model1")
    with pytest.raises(oracle.EmptySliceError):
        oracle.slice_oracle(model, 5.0, n_oracle=1_000, chunk_size=1_000)
    with pytest.raises(ValueError, match="width"):
        oracle.slice_oracle(model, 0.5, width=0.0)
    with pytest.raises(ValueError, match="one-input"):
        oracle.slice_oracle(models.get_model("highdim5"), 0.5)


def test_dataset_csv_round_trip(tmp_path):
    model = models.get_model("highdim5")
    dataset = models.sample_dataset(model, 25, seed=2)
    path = tmp_path / "dataset.csv"
    serialize.save_dataset(path, dataset)
    header = pd.read_csv(path, nrows=0).columns.tolist()
    assert header == ["x1", "x2", "x3", "x4", "x5", "y"]
    loaded = serialize.load_dataset(path, model, seed=2)
    np.testing.assert_array_equal(loaded.X, dataset.X)
    np.testing.assert_array_equal(loaded.Y, dataset.Y)


def test_load_dataset_checks_header(tmp_path):
    path = tmp_path / "dataset.csv"
    dataset = models.sample_dataset(models.get_model("model1"), 5, seed=0)
    serialize.save_dataset(path, dataset)
    with pytest.raises(ValueError, match="columns"):
        serialize.load_dataset(path, models.get_model("highdim5"), seed=0)


@given(st.floats(0.0, 1.0))
@settings(max_examples=25, deadline=None)
def test_model2_noise_grows_with_x(x):
    ref = models.analytic_forward_conditional(models.get_model("model2"), x)
    assert ref.sd == pytest.approx(0.1 * x)


def test_model1_slice_matches_forward_conditional():
    """For model1, X | Y = v and Y | X = v agree in mean and variance."""
    model = models.get_model("model1")
    width = 0.01
    forward = models.analytic_forward_conditional(model, 0.4)
    ref = oracle.slice_oracle(model, 0.4, width=width, n_oracle=2_000_000, seed=1)
    mean_se = np.sqrt(ref.variance / ref.count)
    assert abs(ref.mean - forward.mean) < 3 * mean_se
    # The slice window adds the variance of a uniform on [-width, width].
    var_se = ref.variance * np.sqrt(2.0 / ref.count)
    assert abs(ref.variance - width**2 / 3 - forward.variance) < 3 * var_se


def test_model3_slice_is_multimodal():
    ref = oracle.slice_oracle(
        models.get_model("model3"),
        0.7,
        width=0.01,
        n_oracle=2_000_000,
        seed=2,
    )
    counts, _ = np.histogram(ref.values, bins=200, range=(0.0, 1.0))
    peaks, _ = signal.find_peaks(counts, prominence=0.2 * counts.max())
    assert len(peaks) >= 2


def test_model2_variance_grows_across_x_slices():
    model = models.get_model("model2")
    X, Y = models.sample_pairs(model, 400_000, np.random.default_rng(0))
    variances = []
    for x in (0.25, 0.5, 0.75, 1.0):
        mask = np.abs(X[:, 0] - x) <= 0.01
        variances.append(np.var(Y[mask, 0] - model.mean(X[mask])))
    assert np.all(np.diff(variances) > 0)


@pytest.mark.expensive
def test_slice_oracle_full_size():
    ref = oracle.slice_oracle(models.get_model("model1"), 0.4)
    assert (ref.width, ref.n_oracle) == (0.01, 10_000_000)
    assert ref.mean == pytest.approx(0.4, abs=0.002)
    assert ref.variance == pytest.approx(0.0025, rel=0.1)
