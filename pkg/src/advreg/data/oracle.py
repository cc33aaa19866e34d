"""Monte-Carlo slicing oracle for inverse conditionals p(X | Y = y0)."""

import logging

import numpy as np

from advreg.data import models, types
from advreg.util import util

N_ORACLE = 10_000_000
CHUNK_SIZE = 1_000_000
SLICE_WIDTH = 0.01

logger = logging.getLogger(__name__)


class EmptySliceError(ValueError):
    """No sampled pair fell inside the slice."""


def slice_oracle(
    model: types.ModelSpec,
    y0: float,
    width: float = SLICE_WIDTH,
    n_oracle: int = N_ORACLE,
    seed: int = 0,
    chunk_size: int = CHUNK_SIZE,
) -> types.SliceSample:
    """Keeps the x of every sampled pair with |y - y0| <= width.

    Pairs are drawn in chunks of `chunk_size`, chunk `k` from its own substream
    of `seed`, and retained values are concatenated in chunk order. The result
    therefore depends only on `(seed, n_oracle, chunk_size)`.

    Args:
        model: A one-input model.
        y0: Centre of the slice.
        width: Half-width of the closed slice.
        n_oracle: Total number of pairs to draw.
        seed: Run seed.
        chunk_size: Pairs per chunk.

    Returns:
        The retained inputs.

    Raises:
        ValueError: non-positive width or sizes, or a multi-input model.
        EmptySliceError: nothing fell inside the slice.
    """
    if width <= 0:
        raise ValueError(f"Slice width must be positive, got {width}.")
    if n_oracle <= 0 or chunk_size <= 0:
        raise ValueError("n_oracle and chunk_size must be positive.")
    if model.input_dim != 1:
        raise ValueError(f"Slicing needs a one-input model, got {model.kind}.")

    kept = []
    n_chunks = -(-n_oracle // chunk_size)
    for k in range(n_chunks):
        n = min(chunk_size, n_oracle - k * chunk_size)
        X, Y = models.sample_pairs(model, n, util.make_rng(seed, "oracle", k))
        mask = np.abs(Y[:, 0] - y0) <= width
        kept.append(X[mask, 0])
    values = np.concatenate(kept)

    if len(values) == 0:
        raise EmptySliceError(
            f"No {model.kind} pair out of {n_oracle} has |y - {y0}| <= {width}.",
        )
    logger.debug("Slice y0=%s kept %d of %d pairs", y0, len(values), n_oracle)
    return types.SliceSample(
        y0=float(y0),
        width=float(width),
        values=values,
        count=len(values),
        n_oracle=n_oracle,
    )
