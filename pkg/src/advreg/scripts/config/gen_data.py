"""Configuration for advreg.scripts.gen_data."""

import sacred

from advreg.data import models
from advreg.scripts.ingredients import logging as logging_ingredient

gen_data_ex = sacred.Experiment(
    "gen_data",
    ingredients=[logging_ingredient.logging_ingredient],
)


@gen_data_ex.config
def defaults():
    model = "model1"  # One of model1, model2, model3, highdim5
    n = 10_000  # Number of (x, y) pairs
    seed = 0


@gen_data_ex.named_config
def highdim5():
    model = "highdim5"
    n = 100_000


@gen_data_ex.config_hook
def check(config, command_name: str, logger):
    del command_name, logger
    models.get_model(config["model"])
    if config["n"] < 1:
        raise ValueError(f"n must be positive, got {config['n']}.")
    return {}
