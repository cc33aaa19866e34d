"""Configuration for advreg.scripts.report."""

import sacred

from advreg.evaluation import evaluate, moments, reports
from advreg.scripts.ingredients import logging as logging_ingredient

report_ex = sacred.Experiment(
    "report",
    ingredients=[logging_ingredient.logging_ingredient],
)


@report_ex.config
def defaults():
    source_dir = None  # Train run or sweep directory, required
    block_size = evaluate.BLOCK_SIZE  # Records per block summary
    n_density = 100_000  # Generated values behind each density overlay
    bandwidth = moments.KDE_BANDWIDTH
    grid_points = reports.GRID_POINTS
    seed = 0


@report_ex.named_config
def fast():
    block_size = 2
    n_density = 2_000
    grid_points = 101


@report_ex.config_hook
def check(config, command_name: str, logger):
    del command_name, logger
    if config["source_dir"] is None:
        raise ValueError("source_dir must name a train run or sweep directory.")
    for key in ("block_size", "n_density", "grid_points"):
        if config[key] < 1:
            raise ValueError(f"{key} must be positive, got {config[key]}.")
    if config["bandwidth"] <= 0:
        raise ValueError(f"bandwidth must be positive, got {config['bandwidth']}.")
    return {}
