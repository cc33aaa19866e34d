"""Minibatching helpers shared by the training algorithms."""

from typing import Iterator, Sized, Union

import numpy as np


def _length(data: Union[int, Sized]) -> int:
    return data if isinstance(data, int) else len(data)


def minibatches(
    data: Union[int, Sized],
    m: int,
    rng: np.random.Generator,
) -> Iterator[np.ndarray]:
    """Endless stream of index batches, reshuffled every epoch.

    Each epoch is a fresh uniform permutation of ``range(n)`` cut into
    ``ceil(n / m)`` consecutive batches, so the last batch of an epoch holds
    ``n mod m`` indices when `m` does not divide `n`.

    >>> rng = np.random.default_rng(0)
    >>> batches = minibatches(10, 3, rng)
    >>> [len(next(batches)) for _ in range(4)]
    [3, 3, 3, 1]

    Args:
        data: A dataset, or its number of rows.
        m: Batch size.
        rng: Source of the shuffles.

    Yields:
        Integer index arrays.

    Raises:
        ValueError: `m` is not in ``[1, n]``.
    """
    n = _length(data)
    if not 1 <= m <= n:
        raise ValueError(f"Batch size must be in [1, {n}], got {m}.")
    return _epochs(n, m, rng)


def _epochs(n: int, m: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    while True:
        order = rng.permutation(n)
        for start in range(0, n, m):
            yield order[start : start + m]


class IndexStream:
    """Indices taken in order from an endless sequence of permutations of ``range(n)``.

    Unlike `minibatches`, any number of indices can be requested at a time;
    a request may span two epochs.
    """

    def __init__(self, data: Union[int, Sized], rng: np.random.Generator):
        self.n = _length(data)
        if self.n < 1:
            raise ValueError("Cannot stream indices of an empty dataset.")
        self._rng = rng
        self._order = rng.permutation(self.n)
        self._pos = 0

    def take(self, k: int) -> np.ndarray:
        if k < 0:
            raise ValueError(f"Cannot take {k} indices.")
        parts = []
        while k > 0:
            if self._pos == self.n:
                self._order = self._rng.permutation(self.n)
                self._pos = 0
            chunk = self._order[self._pos : self._pos + k]
            self._pos += len(chunk)
            k -= len(chunk)
            parts.append(chunk)
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
