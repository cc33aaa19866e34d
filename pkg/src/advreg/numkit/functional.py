"""Layer, activation and loss primitives built from `autodiff` ops."""

import re
from typing import Optional, Tuple

from advreg.numkit import autodiff
from advreg.numkit.autodiff import Tensor, TensorLike

ACTIVATION_KINDS = ("relu", "leaky_relu", "sigmoid", "identity", "softmax")
BCE_CLAMP = 1e-12

_TAG_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([-+0-9.eE]+)\s*\))?\s*$")


def parse_activation(tag: str) -> Tuple[str, Optional[float]]:
    """Splits an activation tag such as ``"leaky_relu(0.2)"`` into kind and slope.

    Args:
        tag: `relu`, `sigmoid`, `identity`, `softmax`, or `leaky_relu(alpha)`.

    Returns:
        The kind and, for leaky relu, its negative-side slope.

    Raises:
        ConfigurationError: the tag is malformed or names an unknown kind.
    """
    match = _TAG_RE.match(tag)
    if match is None or match.group(1) not in ACTIVATION_KINDS:
        raise autodiff.ConfigurationError(f"Unknown activation '{tag}'.")
    kind, alpha = match.group(1), match.group(2)
    if kind == "leaky_relu":
        return kind, 0.2 if alpha is None else float(alpha)
    if alpha is not None:
        raise autodiff.ConfigurationError(f"'{kind}' takes no parameter: '{tag}'.")
    return kind, None


def activation_tag(kind: str, alpha: Optional[float] = None) -> str:
    if kind == "leaky_relu":
        return f"leaky_relu({0.2 if alpha is None else alpha!r})"
    return kind


def activation(z: TensorLike, kind: str, alpha: Optional[float] = None) -> Tensor:
    """Applies an elementwise activation (softmax normalizes each row).

    Args:
        z: Pre-activations.
        kind: An activation kind or full tag, e.g. ``"leaky_relu(0.2)"``.
        alpha: Slope override for leaky relu.

    Returns:
        The activations.

    Raises:
        ConfigurationError: unknown kind, or a leaky slope outside (0, 1).
    """
    kind, tag_alpha = parse_activation(kind)
    if kind == "relu":
        return autodiff.relu(z)
    if kind == "leaky_relu":
        slope = tag_alpha if alpha is None else alpha
        assert slope is not None
        if not 0 < slope < 1:
            raise autodiff.ConfigurationError(
                f"leaky_relu slope must be in (0, 1), got {slope}.",
            )
        return autodiff.leaky_relu(z, slope)
    if kind == "sigmoid":
        return autodiff.sigmoid(z)
    if kind == "softmax":
        return autodiff.softmax(z)
    return autodiff.Tensor(z) if not isinstance(z, Tensor) else z


def affine_forward(a_prev: TensorLike, W: TensorLike, b: TensorLike) -> Tensor:
    """Computes ``a_prev @ W + b`` for a batch of row vectors."""
    a_prev, W, b = (x if isinstance(x, Tensor) else Tensor(x) for x in (a_prev, W, b))
    if a_prev.ndim != 2 or W.ndim != 2 or b.ndim != 1:
        raise autodiff.DimensionError(
            "affine_forward needs a [batch, n_in] input, [n_in, n_out] weights "
            f"and [n_out] biases; got {a_prev.shape}, {W.shape}, {b.shape}.",
        )
    if a_prev.shape[1] != W.shape[0] or W.shape[1] != b.shape[0]:
        raise autodiff.DimensionError(
            f"affine_forward shapes do not conform: {a_prev.shape} @ {W.shape} "
            f"+ {b.shape}.",
        )
    return autodiff.add(autodiff.matmul(a_prev, W), b)


def _same_shape(name: str, y_hat: Tensor, y: Tensor) -> None:
    if y_hat.shape != y.shape:
        raise autodiff.DimensionError(
            f"{name}: prediction shape {y_hat.shape} != target shape {y.shape}.",
        )


def bce_loss(y_hat: TensorLike, y: TensorLike) -> Tensor:
    """Mean binary cross-entropy; `y_hat` is clamped into [1e-12, 1 - 1e-12]."""
    y_hat = y_hat if isinstance(y_hat, Tensor) else Tensor(y_hat)
    y = y if isinstance(y, Tensor) else Tensor(y)
    _same_shape("bce_loss", y_hat, y)
    p = autodiff.clamp(y_hat, BCE_CLAMP, 1.0 - BCE_CLAMP)
    log_likelihood = y * autodiff.log(p) + (1.0 - y) * autodiff.log(1.0 - p)
    return autodiff.neg(autodiff.mean(log_likelihood))


def mse_loss(y_hat: TensorLike, y: TensorLike) -> Tensor:
    """Mean (not sum) of squared residuals."""
    y_hat = y_hat if isinstance(y_hat, Tensor) else Tensor(y_hat)
    y = y if isinstance(y, Tensor) else Tensor(y)
    _same_shape("mse_loss", y_hat, y)
    return autodiff.mean(autodiff.square(y_hat - y))


def log_sigmoid(z: TensorLike) -> Tensor:
    return autodiff.log_sigmoid(z)
