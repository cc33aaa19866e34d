"""Ordinary least squares baseline with a Normal predictive distribution."""

import dataclasses
from typing import Tuple

import numpy as np


class SingularMatrixError(ValueError):
    """The design matrix does not have full column rank."""


@dataclasses.dataclass(frozen=True)
class OLSFit:
    beta: np.ndarray
    """Coefficients, one per design column."""

    sigma2: float
    """Residual variance ``e'e / (n - p)``."""

    xtx_inv: np.ndarray
    n: int


def _design(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return X.reshape(-1, 1) if X.ndim == 1 else X


def ols_fit(X: np.ndarray, y: np.ndarray) -> OLSFit:
    """Closed-form least squares ``beta = (X'X)^-1 X'y``.

    `X` is used as given; add a column of ones for an intercept.

    Args:
        X: [n, p] design matrix.
        y: [n] or [n, 1] responses.

    Returns:
        The fit.

    Raises:
        ValueError: shapes disagree, or ``n <= p``.
        SingularMatrixError: `X` is rank deficient.
    """
    X = _design(X)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n, p = X.shape
    if len(y) != n:
        raise ValueError(f"{n} design rows but {len(y)} responses.")
    if n <= p:
        raise ValueError(f"Need more rows than columns, got n={n}, p={p}.")
    if np.linalg.matrix_rank(X) < p:
        raise SingularMatrixError(f"Design matrix {X.shape} is rank deficient.")
    xtx_inv = np.linalg.inv(X.T @ X)
    beta = xtx_inv @ X.T @ y
    resid = y - X @ beta
    sigma2 = float(resid @ resid / (n - p))
    return OLSFit(beta=beta, sigma2=sigma2, xtx_inv=xtx_inv, n=n)


def ols_predict(fit: OLSFit, x_star: np.ndarray) -> Tuple[float, float]:
    """Point prediction and predictive variance ``sigma2 (x* (X'X)^-1 x*' + 1)``."""
    x = np.asarray(x_star, dtype=np.float64).reshape(-1)
    if x.shape != fit.beta.shape:
        raise ValueError(f"x_star has {x.size} entries, fit has {fit.beta.size}.")
    point = float(x @ fit.beta)
    variance = fit.sigma2 * (float(x @ fit.xtx_inv @ x) + 1.0)
    return point, variance


def with_intercept(X: np.ndarray) -> np.ndarray:
    X = _design(X)
    return np.hstack([np.ones((X.shape[0], 1)), X])
