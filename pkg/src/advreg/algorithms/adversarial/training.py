"""Entry point selecting the trainer class for a GAN kind."""

from typing import Mapping, Optional, Type

from advreg.algorithms.adversarial import common, relativistic, sgan, wgan
from advreg.data import types
from advreg.util import logger as advreg_logger

TRAINERS: Mapping[str, Type[common.AdversarialRegressionTrainer]] = {
    "sgan": sgan.SGAN,
    "wgan_clip": wgan.WGANClip,
    "wgan_gp": wgan.WGANGP,
    "rsgan": relativistic.RSGAN,
    "rasgan": relativistic.RaSGAN,
}


def make_trainer(
    config: common.TrainConfig,
    dataset: types.Dataset,
    **kwargs,
) -> common.AdversarialRegressionTrainer:
    """Builds the trainer for `config.gan`; `kwargs` go to its constructor."""
    return TRAINERS[config.gan.tag](config=config, dataset=dataset, **kwargs)


def train(
    config: common.TrainConfig,
    dataset: types.Dataset,
    *,
    checkpoint_dir: Optional[types.AnyPath] = None,
    callback: Optional[common.EvalCallback] = None,
    custom_logger: Optional[advreg_logger.MeanLogger] = None,
    progress_bar: bool = True,
) -> common.TrainRun:
    """Trains a conditional generator on `dataset` as described by `config`.

    Args:
        config: Training configuration.
        dataset: Training pairs.
        checkpoint_dir: Where generator checkpoints are written.
        callback: Called as ``callback(update, generator)`` every
            `config.eval_every` generator updates.
        custom_logger: Where to log statistics.
        progress_bar: Show a progress bar.

    Returns:
        The run summary; `status` is ``diverged`` if a loss became non-finite.
    """
    trainer = make_trainer(
        config,
        dataset,
        checkpoint_dir=checkpoint_dir,
        custom_logger=custom_logger,
        progress_bar=progress_bar,
    )
    return trainer.train(callback=callback)
