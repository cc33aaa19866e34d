"""This ingredient places every command's output in a run directory.

It configures Python logging and the statistics logger, and links the run
directory to the sacred observer's records.
"""

import logging
import pathlib
from typing import Sequence, Tuple, Union

import sacred

from advreg.util import logger as advreg_logger
from advreg.util import sacred as sacred_util
from advreg.util import util

logging_ingredient = sacred.Ingredient("logging")
logger = logging.getLogger(__name__)

# Experiment config keys that name a run, in order.
RUN_NAME_KEYS = ("model", "direction", "gan", "axis")


@logging_ingredient.config
def config():
    run_root = None  # Defaults to $ADVREG_RUN_ROOT, then ./runs
    run_name = None  # Defaults to the command and its main config values
    run_dir = None  # Overrides run_root and run_name when given
    log_level = logging.INFO
    log_format_strs = ["stdout", "log", "csv"]

    locals()  # quieten flake8


def default_run_name(config, command_name: str) -> str:
    parts = [command_name]
    parts += [str(config[k]) for k in RUN_NAME_KEYS if config.get(k) is not None]
    return "_".join(parts)


@logging_ingredient.config_hook
def hook(config, command_name: str, logger):
    del logger
    updates = {}
    if config["logging"]["run_root"] is None:
        updates["run_root"] = str(sacred_util.default_run_root())
    if config["logging"]["run_dir"] is None:
        source_dir = config.get("source_dir")
        if source_dir is not None:
            # Commands that post-process a run write into that run.
            updates["run_dir"] = str(util.parse_path(source_dir))
        else:
            run_root = config["logging"]["run_root"] or updates["run_root"]
            name = config["logging"]["run_name"] or default_run_name(
                config,
                command_name,
            )
            stamped = f"{name}_{util.make_unique_timestamp()}"
            updates["run_dir"] = str(util.unique_dir(run_root, stamped))
    return updates


@logging_ingredient.capture
def make_run_dir(
    _run,
    run_dir: str,
    log_level: Union[int, str],
) -> pathlib.Path:
    """Creates the run directory and sets up the symlink to sacred's records.

    Args:
        run_dir: The directory of this run.
        log_level: The threshold of the logger. Either an integer level (10, 20, ...),
            a string of digits ('10', '20'), or a string of the designated level
            ('DEBUG', 'INFO', ...).

    Returns:
        The `run_dir`. This avoids the caller needing to capture this argument.
    """
    parsed_run_dir = util.parse_path(run_dir)
    parsed_run_dir.mkdir(parents=True, exist_ok=True)
    # convert strings of digits to numbers; but leave levels like 'INFO' unmodified
    try:
        log_level = int(log_level)
    except ValueError:
        pass
    logging.basicConfig(level=log_level)
    logging.getLogger("advreg").setLevel(log_level)
    logger.info("Writing run to %s", parsed_run_dir)
    link_name = "sacred"
    if _run.config.get("source_dir") is not None:
        # Keep the link of the command that created the directory.
        link_name = f"sacred_{_run.experiment_info['name']}"
    sacred_util.build_sacred_symlink(parsed_run_dir, _run, link_name)
    return parsed_run_dir


@logging_ingredient.capture
def setup_logging(
    _run,
    log_format_strs: Sequence[str],
) -> Tuple[advreg_logger.MeanLogger, pathlib.Path]:
    """Builds the statistics logger.

    Args:
        log_format_strs: The types of formats to log to.

    Returns:
        The configured logger and `run_dir`.
        Returning `run_dir` avoids the caller needing to capture this value.
    """
    run_dir = make_run_dir()
    custom_logger = advreg_logger.configure(
        folder=run_dir / "log",
        format_strs=log_format_strs,
    )
    return custom_logger, run_dir
