"""Configuration for advreg.scripts.sweep.

A sweep trains one child run per value of a single train config key. The
children use the ``advreg-train`` configuration, adjusted by
`base_named_configs` and `base_config_updates`.
"""

import sacred

from advreg.scripts.ingredients import logging as logging_ingredient

SWEEP_AXES = ("noise_dim", "n_data", "batch_size", "gan")

sweep_ex = sacred.Experiment(
    "sweep",
    ingredients=[logging_ingredient.logging_ingredient],
)


@sweep_ex.config
def defaults():
    axis = "noise_dim"  # Train config key varied across children
    values = [1, 2, 3, 5, 10, 20]
    base_named_configs = []  # Train named configs applied to every child
    base_config_updates = {}  # Train config updates applied to every child
    parallelism = 1  # Children run at once; above 1 needs ray
    init_kwargs = {}  # Keyword arguments to pass to ray.init()
    block_size = 100  # Records per block in comparison.csv
    seed = 0


@sweep_ex.named_config
def noise_sweep():
    axis = "noise_dim"
    values = [1, 2, 3, 5, 10, 20]


@sweep_ex.named_config
def sample_size_sweep():
    axis = "n_data"
    values = [250, 500, 1000, 2500, 5000, 10_000, 100_000]


@sweep_ex.named_config
def batch_sweep():
    axis = "batch_size"
    values = [20, 80, 250, 500, 1000, 2000]
    base_config_updates = {"gan": "rsgan"}


@sweep_ex.named_config
def gan_sweep():
    axis = "gan"
    values = ["sgan", "wgan_gp", "rsgan"]


@sweep_ex.named_config
def fast():
    base_named_configs = ["fast"]
    block_size = 2


@sweep_ex.config_hook
def check(config, command_name: str, logger):
    del command_name, logger
    if config["axis"] not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}, got '{config['axis']}'.")
    if not config["values"]:
        raise ValueError("A sweep needs at least one value.")
    if config["parallelism"] < 1:
        raise ValueError(f"parallelism must be positive, got {config['parallelism']}.")
    return {}
