"""Moment diagnostics and Gaussian kernel density estimates."""

import dataclasses

import numpy as np
from scipy import stats
from sklearn.neighbors import KernelDensity

KDE_BANDWIDTH = 0.01


@dataclasses.dataclass(frozen=True)
class MomentSet:
    """First four moments with 1/n normalization; kurtosis is not excess (Normal: 3)."""

    mean: float
    variance: float
    skewness: float
    kurtosis: float
    degenerate: bool = False
    """Zero variance: skewness and kurtosis are undefined (nan)."""


def moments(sample: np.ndarray) -> MomentSet:
    """Mean, variance, skewness and kurtosis of `sample`.

    Raises:
        ValueError: fewer than two values.
    """
    x = np.asarray(sample, dtype=np.float64).reshape(-1)
    if x.size < 2:
        raise ValueError(f"Moments need at least 2 values, got {x.size}.")
    mean = float(np.mean(x))
    variance = float(np.var(x))
    if variance == 0:
        return MomentSet(mean, 0.0, float("nan"), float("nan"), degenerate=True)
    return MomentSet(
        mean=mean,
        variance=variance,
        skewness=float(stats.skew(x, bias=True)),
        kurtosis=float(stats.kurtosis(x, fisher=False, bias=True)),
    )


def kde(
    sample: np.ndarray,
    grid: np.ndarray,
    bandwidth: float = KDE_BANDWIDTH,
) -> np.ndarray:
    """Gaussian kernel density of `sample` evaluated on `grid`.

    Raises:
        ValueError: empty sample or non-positive bandwidth.
    """
    if bandwidth <= 0:
        raise ValueError(f"Bandwidth must be positive, got {bandwidth}.")
    x = np.asarray(sample, dtype=np.float64).reshape(-1, 1)
    if x.size == 0:
        raise ValueError("Cannot estimate a density from an empty sample.")
    estimator = KernelDensity(kernel="gaussian", bandwidth=bandwidth).fit(x)
    points = np.asarray(grid, dtype=np.float64).reshape(-1, 1)
    return np.exp(estimator.score_samples(points))
