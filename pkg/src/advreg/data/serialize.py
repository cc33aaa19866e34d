"""Load and save datasets as CSV with columns ``x1, ..., xp, y``."""

import logging

import numpy as np
import pandas as pd

from advreg.data import types
from advreg.util import util

FLOAT_FORMAT = "%.17g"

logger = logging.getLogger(__name__)


def dataset_columns(input_dim: int):
    return [f"x{i + 1}" for i in range(input_dim)] + ["y"]


def save_dataset(path: types.AnyPath, dataset: types.Dataset) -> None:
    """Writes `dataset` with round-trippable decimal text."""
    p = util.parse_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        np.hstack([dataset.X, dataset.Y]),
        columns=dataset_columns(dataset.X.shape[1]),
    )
    frame.to_csv(p, index=False, float_format=FLOAT_FORMAT)
    logger.info("Dumped %d rows to %s", len(dataset), p)


def load_dataset(
    path: types.AnyPath,
    model: types.ModelSpec,
    seed: int,
) -> types.Dataset:
    """Reads a CSV written by `save_dataset`.

    Args:
        path: CSV file.
        model: Model the rows were drawn from.
        seed: Seed recorded for the rows.

    Returns:
        The dataset.

    Raises:
        ValueError: the header is not ``x1, ..., xp, y`` for the model's `p`.
    """
    p = util.parse_path(path)
    frame = pd.read_csv(p, float_precision="round_trip")
    expected = dataset_columns(model.input_dim)
    if list(frame.columns) != expected:
        raise ValueError(f"{p}: columns {list(frame.columns)}, expected {expected}.")
    values = frame.to_numpy(dtype=np.float64)
    return types.Dataset(X=values[:, :-1], Y=values[:, -1:], seed=seed, model=model)
