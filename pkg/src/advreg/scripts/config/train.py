"""Configuration for advreg.scripts.train."""

from typing import Any, Mapping

import sacred

from advreg.algorithms.adversarial import common
from advreg.data import models, oracle
from advreg.evaluation import distances
from advreg.networks import mlp
from advreg.scripts.ingredients import logging as logging_ingredient

train_ex = sacred.Experiment(
    "train",
    ingredients=[logging_ingredient.logging_ingredient],
)

# Keys of the experiment config that are fields of `common.TrainConfig`.
TRAIN_CONFIG_KEYS = (
    "direction",
    "n_data",
    "noise_dim",
    "batch_size",
    "lr",
    "beta1",
    "beta2",
    "epsilon",
    "optimizer",
    "d_steps",
    "g_steps",
    "total_updates",
    "eval_every",
    "checkpoint_every",
    "conditions",
    "gen_hidden",
    "disc_hidden",
    "leaky_slope",
    "out_dim",
    "seed",
)


@train_ex.config
def defaults():
    model = "model1"
    direction = "forward"  # "forward" learns Y | X, "inverse" learns X | Y
    n_data = 10_000  # Pairs sampled when no dataset_path is given
    dataset_path = None  # CSV written by advreg-gen-data, optional

    gan = "sgan"  # sgan, wgan_clip, wgan_gp, rsgan or rasgan
    clip_c = 0.01  # Weight-clipping bound (wgan_clip)
    lambda_gp = 0.1  # Gradient-penalty weight (wgan_gp)

    noise_dim = 10
    out_dim = None  # Defaults to the width of the target
    batch_size = None  # None: per-kind default
    lr = None  # None: per-kind default
    d_steps = None  # None: per-kind default
    g_steps = 1
    optimizer = "adam"  # adam, momentum or rmsprop
    beta1 = 0.0
    beta2 = 0.9
    epsilon = 1e-8

    total_updates = 20_000  # Generator updates
    eval_every = 100
    checkpoint_every = 10_000
    conditions = list(common.DEFAULT_CONDITIONS)
    gen_hidden = list(mlp.GENERATOR_HIDDEN)
    disc_hidden = list(mlp.DISCRIMINATOR_HIDDEN)
    leaky_slope = mlp.LEAKY_SLOPE

    n_eval = None  # None: slice count (inverse) or 10,000 (forward)
    slice_width = oracle.SLICE_WIDTH
    n_oracle = oracle.N_ORACLE
    oracle_chunk = oracle.CHUNK_SIZE
    hist_lo = distances.HIST_LO
    hist_hi = distances.HIST_HI
    hist_bins = distances.HIST_BINS

    progress_bar = True
    seed = 0


@train_ex.config
def per_kind_defaults(gan, batch_size, lr, d_steps):
    if gan in common.GAN_DEFAULTS:
        if batch_size is None:
            batch_size = common.GAN_DEFAULTS[gan][0]
        if lr is None:
            lr = common.GAN_DEFAULTS[gan][1]
        if d_steps is None:
            d_steps = common.GAN_DEFAULTS[gan][2]


def make_train_config(config: Mapping[str, Any], **overrides) -> common.TrainConfig:
    """Builds the `TrainConfig` described by an experiment config.

    Args:
        config: The experiment config.
        overrides: Values replacing those of `config`.

    Returns:
        The validated training configuration.

    Raises:
        ValueError: an invalid value.
    """
    values = {**config, **overrides}
    kwargs = {k: values[k] for k in TRAIN_CONFIG_KEYS}
    for k in ("conditions", "gen_hidden", "disc_hidden"):
        kwargs[k] = tuple(kwargs[k])
    return common.TrainConfig(
        gan=common.GanKind(
            values["gan"],
            clip_c=values["clip_c"],
            lambda_gp=values["lambda_gp"],
        ),
        model=models.get_model(values["model"]),
        **kwargs,
    )


@train_ex.config_hook
def check(config, command_name: str, logger):
    del command_name, logger
    make_train_config(config)
    if config["n_eval"] is not None and config["n_eval"] < 1:
        raise ValueError(f"n_eval must be positive, got {config['n_eval']}.")
    return {}


@train_ex.named_config
def fast():
    # Seconds-scale run for tests and smoke checks.
    n_data = 400
    batch_size = 100
    noise_dim = 2
    total_updates = 20
    eval_every = 5
    checkpoint_every = 10
    gen_hidden = [8, 8]
    disc_hidden = [8, 8]
    n_eval = 300
    slice_width = 0.02
    n_oracle = 100_000
    oracle_chunk = 50_000
    progress_bar = False
    logging = dict(log_format_strs=["log", "csv"])


@train_ex.named_config
def full_scale():
    total_updates = 510_000


@train_ex.named_config
def model1():
    model = "model1"


@train_ex.named_config
def model2():
    model = "model2"


@train_ex.named_config
def model3():
    model = "model3"


@train_ex.named_config
def highdim5():
    model = "highdim5"
    direction = "forward"
    n_data = 100_000


@train_ex.named_config
def forward():
    direction = "forward"


@train_ex.named_config
def inverse():
    direction = "inverse"
