"""Discriminator and generator objectives of the supported GAN families.

All objectives are losses to be minimized and are built from tape ops, so
they can be differentiated with `autodiff.backward`. Discriminator outputs
are sigmoid probabilities for ``sgan`` and raw critic scores otherwise.
"""

from typing import Mapping, Optional

import numpy as np

from advreg.networks import mlp
from advreg.numkit import autodiff, functional
from advreg.numkit.autodiff import Tensor

GAN_KINDS = ("sgan", "wgan_clip", "wgan_gp", "rsgan", "rasgan")
PAIRED_KINDS = ("rsgan",)


def check_kind(kind: str) -> None:
    if kind not in GAN_KINDS:
        raise ValueError(f"Unknown GAN kind '{kind}', expected one of {GAN_KINDS}.")


def _check_scores(kind: str, real: Optional[Tensor], fake: Tensor) -> None:
    if real is None:
        raise ValueError(f"{kind} needs discriminator outputs on a real batch.")
    if real.ndim != 2 or fake.ndim != 2 or real.shape[1] != 1 or fake.shape[1] != 1:
        raise autodiff.DimensionError(
            f"Expected [m, 1] scores, got {real.shape} and {fake.shape}.",
        )
    if kind in PAIRED_KINDS and real.shape != fake.shape:
        raise autodiff.DimensionError(
            f"{kind} pairs real and fake rows; got batches of {real.shape[0]} "
            f"and {fake.shape[0]}.",
        )


def _relativistic_average(a: Tensor, b: Tensor) -> Tensor:
    """-mean log sigmoid(a - mean b)."""
    return autodiff.neg(autodiff.mean(functional.log_sigmoid(a - autodiff.mean(b))))


def d_objective(kind: str, d_real: Tensor, d_fake: Tensor) -> Tensor:
    """Discriminator loss on outputs for a real and a generated batch.

    Args:
        kind: GAN kind.
        d_real: [m, 1] outputs on real (condition, target) rows.
        d_fake: [m, 1] outputs on generated rows.

    Returns:
        Scalar loss. The Wasserstein kinds return the bare critic objective;
        the gradient penalty is added by the caller.

    Raises:
        DimensionError: score shapes are wrong, or paired batches differ in size.
    """
    check_kind(kind)
    _check_scores(kind, d_real, d_fake)
    if kind == "sgan":
        ones = np.ones(d_real.shape)
        zeros = np.zeros(d_fake.shape)
        return functional.bce_loss(d_real, ones) + functional.bce_loss(d_fake, zeros)
    if kind in ("wgan_clip", "wgan_gp"):
        return autodiff.mean(d_fake) - autodiff.mean(d_real)
    if kind == "rsgan":
        return autodiff.neg(autodiff.mean(functional.log_sigmoid(d_real - d_fake)))
    # ln(1 - sigmoid(z)) == log_sigmoid(-z)
    return _relativistic_average(d_real, d_fake) + _relativistic_average(
        autodiff.neg(d_fake),
        autodiff.neg(d_real),
    )


def g_objective(kind: str, d_fake: Tensor, d_real: Optional[Tensor] = None) -> Tensor:
    """Generator loss; the relativistic kinds also need `d_real`.

    ``sgan`` uses the non-saturating form ``-mean ln D(G(z))``.
    """
    check_kind(kind)
    if kind == "sgan":
        p = autodiff.clamp(d_fake, functional.BCE_CLAMP, 1.0 - functional.BCE_CLAMP)
        return autodiff.neg(autodiff.mean(autodiff.log(p)))
    if kind in ("wgan_clip", "wgan_gp"):
        return autodiff.neg(autodiff.mean(d_fake))
    _check_scores(kind, d_real, d_fake)
    assert d_real is not None
    if kind == "rsgan":
        return autodiff.neg(autodiff.mean(functional.log_sigmoid(d_fake - d_real)))
    return _relativistic_average(d_fake, d_real) + _relativistic_average(
        autodiff.neg(d_real),
        autodiff.neg(d_fake),
    )


def gradient_penalty(
    tape: autodiff.Tape,
    critic: mlp.Network,
    params: Optional[Mapping[str, Tensor]],
    real: np.ndarray,
    fake: np.ndarray,
    lambda_gp: float,
    rng: np.random.Generator,
) -> Tensor:
    """``lambda * mean((||grad_x C(x_hat)|| - 1)^2)`` over random interpolates.

    Every row gets its own ``eps ~ U[0, 1]`` and ``x_hat = eps real + (1 - eps)
    fake``, interpolating the whole critic input including the condition
    columns. The input gradient is recorded on `tape`, so the result can be
    differentiated with respect to the watched critic `params`.

    Args:
        tape: Tape holding the critic parameters.
        critic: The critic.
        params: Tracked critic parameters from `critic.watch`. If None, the
            stored parameters are used as constants.
        real: [m, k] real critic inputs.
        fake: [m, k] generated critic inputs.
        lambda_gp: Penalty weight.
        rng: Source of the interpolation weights.

    Returns:
        Scalar penalty.

    Raises:
        ValueError: negative `lambda_gp`.
        DimensionError: `real` and `fake` differ in shape.
    """
    if lambda_gp < 0:
        raise ValueError(f"lambda_gp must be non-negative, got {lambda_gp}.")
    real = np.asarray(real, dtype=np.float64)
    fake = np.asarray(fake, dtype=np.float64)
    if real.shape != fake.shape or real.ndim != 2:
        raise autodiff.DimensionError(
            f"Interpolation needs equal [m, k] batches, got {real.shape} "
            f"and {fake.shape}.",
        )
    eps = rng.uniform(0.0, 1.0, size=(real.shape[0], 1))
    x_hat = tape.watch(eps * real + (1.0 - eps) * fake, f"gp/x_hat{len(tape.roots)}")
    out = autodiff.sum(critic.forward(x_hat, params))
    g = autodiff.input_gradient(tape, out, x_hat)
    gap = autodiff.l2_norm(g) - 1.0
    return lambda_gp * autodiff.mean(autodiff.square(gap))


def clip_weights(network: mlp.Network, c: float) -> mlp.Network:
    """Copy of `network` with every weight and bias clipped into [-c, c]."""
    if c <= 0:
        raise ValueError(f"Clip bound must be positive, got {c}.")
    clipped = {name: np.clip(value, -c, c) for name, value in network.params.items()}
    return network.with_params(clipped)
