"""Configuration for advreg.scripts.ensemble."""

import sacred

from advreg.scripts.ingredients import logging as logging_ingredient

ensemble_ex = sacred.Experiment(
    "ensemble",
    ingredients=[logging_ingredient.logging_ingredient],
)


@ensemble_ex.config
def defaults():
    source_dir = None  # Train run directory, required
    first = 310_000  # Pooled updates are first, first + step, ..., last
    last = 510_000
    step = 10_000
    conditions = None  # None: the run's conditions
    n_per = 5_000  # Generated values per checkpoint
    seed = 0


@ensemble_ex.named_config
def fast():
    first = 10
    last = 20
    step = 10
    n_per = 300


@ensemble_ex.config_hook
def check(config, command_name: str, logger):
    del command_name, logger
    if config["source_dir"] is None:
        raise ValueError("source_dir must name a train run directory.")
    if config["step"] < 1:
        raise ValueError(f"step must be positive, got {config['step']}.")
    if config["last"] - config["first"] < config["step"]:
        raise ValueError(
            f"[{config['first']}, {config['last']}] holds fewer than two "
            f"checkpoints at step {config['step']}.",
        )
    if config["n_per"] < 1:
        raise ValueError(f"n_per must be positive, got {config['n_per']}.")
    return {}
