"""Distances between one-dimensional distributions: KS, and KL/JS on histograms."""

import dataclasses
from typing import Callable

import numpy as np
from scipy import special

HIST_LO = -0.5
HIST_HI = 1.5
HIST_BINS = 200
KL_FLOOR = 1e-12


class BinningMismatchError(ValueError):
    """Two histograms do not share the same bin edges."""


def _sample(name: str, values: np.ndarray) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise ValueError(f"{name} is empty.")
    return x


def ks_distance(sample_p: np.ndarray, sample_q: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic.

    The supremum of ``|F_p - F_q|`` over the pooled points, with
    right-continuous empirical CDFs.

    Raises:
        ValueError: either sample is empty.
    """
    p = np.sort(_sample("sample_p", sample_p))
    q = np.sort(_sample("sample_q", sample_q))
    pooled = np.concatenate([p, q])
    cdf_p = np.searchsorted(p, pooled, side="right") / len(p)
    cdf_q = np.searchsorted(q, pooled, side="right") / len(q)
    return float(np.max(np.abs(cdf_p - cdf_q)))


def ks_distance_to_cdf(
    sample: np.ndarray,
    cdf: Callable[[np.ndarray], np.ndarray],
) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a continuous CDF."""
    x = np.sort(_sample("sample", sample))
    n = len(x)
    f = cdf(x)
    above = np.arange(1, n + 1) / n - f
    below = f - np.arange(n) / n
    return float(max(np.max(above), np.max(below)))


@dataclasses.dataclass(frozen=True)
class Histogram:
    """Probability mass over equal-width bins of ``[lo, hi]``."""

    lo: float
    hi: float
    n_bins: int
    mass: np.ndarray
    count: int = 0
    """Number of values binned (0 for analytic histograms)."""

    clamped: int = 0
    """Values outside ``[lo, hi]`` that were counted in an end bin."""

    def __post_init__(self):
        if self.mass.shape != (self.n_bins,):
            raise ValueError(f"mass has shape {self.mass.shape}, not ({self.n_bins},).")
        if np.any(self.mass < 0) or abs(float(np.sum(self.mass)) - 1.0) > 1e-9:
            raise ValueError("Histogram mass must be non-negative and sum to 1.")

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n_bins + 1)

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.n_bins

    def check_same_binning(self, other: "Histogram") -> None:
        if (self.lo, self.hi, self.n_bins) != (other.lo, other.hi, other.n_bins):
            raise BinningMismatchError(
                f"Binning ({self.lo}, {self.hi}, {self.n_bins}) != "
                f"({other.lo}, {other.hi}, {other.n_bins}).",
            )


def _check_binning(lo: float, hi: float, n_bins: int) -> None:
    if n_bins < 1:
        raise ValueError(f"n_bins must be positive, got {n_bins}.")
    if not lo < hi:
        raise ValueError(f"Need lo < hi, got [{lo}, {hi}].")


def histogram(
    sample: np.ndarray,
    lo: float = HIST_LO,
    hi: float = HIST_HI,
    n_bins: int = HIST_BINS,
) -> Histogram:
    """Normalized histogram with bins ``[lo + k w, lo + (k + 1) w)``, the last closed.

    Values outside ``[lo, hi]`` are counted in the nearest end bin, and their
    number is kept in `Histogram.clamped`.

    Raises:
        ValueError: empty sample or invalid binning.
    """
    _check_binning(lo, hi, n_bins)
    x = _sample("sample", sample)
    width = (hi - lo) / n_bins
    index = np.clip(np.floor((x - lo) / width), 0, n_bins - 1).astype(np.int64)
    counts = np.bincount(index, minlength=n_bins)
    return Histogram(
        lo=lo,
        hi=hi,
        n_bins=n_bins,
        mass=counts / len(x),
        count=len(x),
        clamped=int(np.sum((x < lo) | (x > hi))),
    )


def kl_discrete(p: Histogram, q: Histogram) -> float:
    """``sum P ln(P / Q)`` after flooring both at 1e-12 and renormalizing."""
    p.check_same_binning(q)
    p_mass = np.maximum(p.mass, KL_FLOOR)
    q_mass = np.maximum(q.mass, KL_FLOOR)
    p_mass = p_mass / p_mass.sum()
    q_mass = q_mass / q_mass.sum()
    return float(np.sum(special.rel_entr(p_mass, q_mass)))


def js_divergence(p: Histogram, q: Histogram) -> float:
    """Jensen-Shannon divergence in nats, unsmoothed; lies in ``[0, ln 2]``."""
    p.check_same_binning(q)
    m = 0.5 * (p.mass + q.mass)
    js = 0.5 * np.sum(special.rel_entr(p.mass, m))
    js += 0.5 * np.sum(special.rel_entr(q.mass, m))
    return float(np.clip(js, 0.0, np.log(2.0)))
