"""Sampling from the synthetic models and their analytic forward conditionals."""

from typing import Tuple, Union

import numpy as np

from advreg.data import types
from advreg.util import util

MODELS = {kind: types.ModelSpec(kind) for kind in types.MODEL_KINDS}


def get_model(kind: str) -> types.ModelSpec:
    try:
        return MODELS[kind]
    except KeyError:
        raise ValueError(
            f"Unknown model '{kind}', expected one of {types.MODEL_KINDS}.",
        ) from None


def sample_pairs(
    model: types.ModelSpec,
    n: int,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Draws X ~ U[0, 1]^p, then Y = f(X) + sd(X) * N(0, 1).

    Normal variates come from `Generator.standard_normal` (ziggurat method).
    """
    X = rng.uniform(0.0, 1.0, size=(n, model.input_dim))
    eps = rng.standard_normal(n)
    Y = model.mean(X) + model.noise_scale(X) * eps
    return X, Y.reshape(n, 1)


def sample_dataset(model: types.ModelSpec, n: int, seed: int) -> types.Dataset:
    """Samples `n` i.i.d. pairs from `model` using the `data` stream of `seed`.

    Raises:
        ValueError: `n` is not positive.
    """
    if n <= 0:
        raise ValueError(f"Dataset size must be positive, got {n}.")
    X, Y = sample_pairs(model, n, util.make_rng(seed, "data"))
    return types.Dataset(X=X, Y=Y, seed=seed, model=model)


def condition_point(model: types.ModelSpec, value: float) -> np.ndarray:
    """Input vector used for a scalar condition: `value` in every coordinate."""
    return np.full(model.input_dim, float(value))


def analytic_forward_conditional(
    model: types.ModelSpec,
    x: Union[float, np.ndarray],
) -> types.AnalyticConditional:
    """Normal law of Y given X = x.

    Args:
        model: The model.
        x: A scalar for one-input models, or a vector of `model.input_dim` values.

    Returns:
        Mean and variance of the conditional; for model2 at x = 0 the variance
        is 0 and the result is flagged degenerate.

    Raises:
        ValueError: `x` has the wrong number of coordinates.
    """
    point = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if point.shape != (model.input_dim,):
        raise ValueError(
            f"{model.kind} conditions on {model.input_dim} inputs, got {point.shape}.",
        )
    row = point.reshape(1, -1)
    mean = float(model.mean(row)[0])
    variance = float(model.noise_scale(row)[0] ** 2)
    return types.AnalyticConditional(
        mean=mean,
        variance=variance,
        degenerate=variance == 0,
    )
