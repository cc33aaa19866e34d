"""Types for synthetic regression models, datasets and reference conditionals."""

import dataclasses
import os
from typing import Tuple, Union

import numpy as np

AnyPath = Union[str, bytes, os.PathLike]

MODEL_KINDS = ("model1", "model2", "model3", "highdim5")
DIRECTIONS = ("forward", "inverse")


@dataclasses.dataclass(frozen=True)
class ModelSpec:
    """A synthetic ground-truth model ``Y = f(X) + eps`` with X uniform on [0, 1]^p.

    - model1: ``a x + b``, noise sd `noise_sd`.
    - model2: ``a x + b``, heteroscedastic noise sd ``hetero_sd * x``.
    - model3: ``a x + c sin(d x)``, noise sd `noise_sd`.
    - highdim5: ``(x1 + x2^2 + ln(x3 + 1) + c sin(d x4) - x5 + 1) / 3.5`` over
      five inputs, noise sd `noise_sd`.
    """

    kind: str
    a: float = 1.0
    b: float = 0.0
    c: float = 0.2
    d: float = 20.0
    noise_sd: float = 0.05
    hetero_sd: float = 0.1

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(
                f"Unknown model '{self.kind}', expected one of {MODEL_KINDS}.",
            )
        if self.noise_sd <= 0 or self.hetero_sd <= 0:
            raise ValueError("Noise scales must be positive.")

    @property
    def input_dim(self) -> int:
        return 5 if self.kind == "highdim5" else 1

    def mean(self, X: np.ndarray) -> np.ndarray:
        """Noise-free response for each row of `X` (shape [n, input_dim])."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise ValueError(
                f"{self.kind} expects inputs of shape [n, {self.input_dim}], "
                f"got {X.shape}.",
            )
        if self.kind in ("model1", "model2"):
            return self.a * X[:, 0] + self.b
        if self.kind == "model3":
            return self.a * X[:, 0] + self.c * np.sin(self.d * X[:, 0])
        x1, x2, x3, x4, x5 = X.T
        total = x1 + x2**2 + np.log(x3 + 1) + self.c * np.sin(self.d * x4) - x5 + 1
        return total / 3.5

    def noise_scale(self, X: np.ndarray) -> np.ndarray:
        """Standard deviation of the noise for each row of `X`."""
        X = np.asarray(X, dtype=np.float64)
        if self.kind == "model2":
            return self.hetero_sd * np.abs(X[:, 0])
        return np.full(X.shape[0], self.noise_sd)

    def supports(self, direction: str) -> bool:
        if direction not in DIRECTIONS:
            raise ValueError(f"Unknown direction '{direction}'.")
        return direction == "forward" or self.input_dim == 1


@dataclasses.dataclass(frozen=True)
class Dataset:
    """Sampled (X, Y) pairs of a `ModelSpec`."""

    X: np.ndarray
    """Inputs, shape [n, p], entries in [0, 1]."""

    Y: np.ndarray
    """Responses, shape [n, 1]."""

    seed: int
    model: ModelSpec

    def __post_init__(self):
        if self.X.ndim != 2 or self.Y.ndim != 2 or self.Y.shape[1] != 1:
            raise ValueError(f"Bad dataset shapes X={self.X.shape}, Y={self.Y.shape}.")
        if len(self.X) != len(self.Y):
            raise ValueError(f"{len(self.X)} inputs but {len(self.Y)} responses.")
        if len(self.X) < 1:
            raise ValueError("A dataset needs at least one row.")
        if self.X.shape[1] != self.model.input_dim:
            raise ValueError(
                f"{self.model.kind} has {self.model.input_dim} inputs, "
                f"dataset has {self.X.shape[1]}.",
            )

    def __len__(self) -> int:
        return len(self.X)

    def split(self, direction: str) -> Tuple[np.ndarray, np.ndarray]:
        """(conditions, targets): (X, Y) forward, (Y, X) inverse.

        Raises:
            ValueError: inverse direction on a multi-input model.
        """
        if not self.model.supports(direction):
            raise ValueError(
                f"The inverse direction needs a single input; {self.model.kind} "
                f"has {self.model.input_dim}.",
            )
        if direction == "forward":
            return self.X, self.Y
        return self.Y, self.X


@dataclasses.dataclass(frozen=True)
class AnalyticConditional:
    """Normal conditional of Y given x."""

    mean: float
    variance: float
    degenerate: bool = False
    """True when the variance is zero, e.g. model2 at x = 0."""

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f"Negative variance {self.variance}.")
        if (self.variance == 0) != self.degenerate:
            raise ValueError("degenerate must be set exactly when variance is 0.")

    @property
    def sd(self) -> float:
        return float(np.sqrt(self.variance))


@dataclasses.dataclass(frozen=True)
class SliceSample:
    """Inputs whose sampled response fell within `width` of `y0`."""

    y0: float
    width: float
    values: np.ndarray
    count: int
    n_oracle: int
    """Number of pairs drawn to obtain `values`."""

    def __post_init__(self):
        if self.count != len(self.values):
            raise ValueError(f"count {self.count} != {len(self.values)} values.")

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def variance(self) -> float:
        return float(np.var(self.values))


Reference = Union[AnalyticConditional, SliceSample]
