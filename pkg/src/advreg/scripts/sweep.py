"""Trains one child run per value of a config key and compares them."""

import copy
import logging
import pathlib
import sys
from typing import Any, Dict, List, Mapping, Sequence

import sacred

from advreg.evaluation import reports
from advreg.scripts.config.sweep import sweep_ex
from advreg.scripts.ingredients import logging as logging_ingredient
from advreg.util import sacred as sacred_util
from advreg.util import util

logger = logging.getLogger(__name__)


def run_child(
    named_configs: Sequence[str],
    config_updates: Mapping[str, Any],
    sacred_dir: str,
) -> Dict[str, Any]:
    """Runs ``advreg-train`` in-process and reports its outcome.

    Exceptions are caught, so one failing child does not stop a sweep.

    Returns:
        ``status`` (``completed``, ``diverged`` or ``failed``), ``run_dir``,
        and ``error`` for failed children.
    """
    # Import inside function rather than in module because Sacred experiments
    # are not picklable, and Ray requires this function to be picklable.
    from advreg.scripts.train import train_ex

    # Set Sacred capture mode to "sys" because default "fd" option leads to error.
    # See https://github.com/IDSIA/sacred/issues/289.
    sacred.SETTINGS.CAPTURE_MODE = "sys"
    run_dir = config_updates["logging"]["run_dir"]
    try:
        run = train_ex.run(
            named_configs=list(named_configs),
            config_updates=dict(config_updates),
            options={"--file_storage": sacred_dir},
        )
    except Exception as e:  # noqa: B902
        logger.warning("Child %s failed: %r", run_dir, e)
        return {"status": "failed", "run_dir": run_dir, "error": repr(e)}
    return {"status": run.result["status"], "run_dir": run_dir, "error": None}


def _run_children(
    jobs: Sequence[Mapping[str, Any]],
    parallelism: int,
    init_kwargs: Mapping[str, Any],
) -> List[Dict[str, Any]]:
    if parallelism == 1:
        return [run_child(**job) for job in jobs]
    try:
        import ray
    except ImportError as e:  # pragma: no cover
        raise ImportError(
            "parallelism > 1 needs ray; install the 'parallel' extra.",
        ) from e
    ray.init(**{"num_cpus": parallelism, **init_kwargs})
    try:
        remote = ray.remote(run_child)
        return ray.get([remote.remote(**job) for job in jobs])
    finally:
        ray.shutdown()


@sweep_ex.main
def sweep(
    axis: str,
    values: Sequence[Any],
    base_named_configs: Sequence[str],
    base_config_updates: Mapping[str, Any],
    parallelism: int,
    init_kwargs: Mapping[str, Any],
    block_size: int,
    seed: int,
) -> Mapping[str, Any]:
    """Trains a child per value of `axis` and writes ``comparison.csv``.

    Child ``i`` gets the seed ``derive_seed(seed, i)`` and the run directory
    ``<sweep dir>/<axis>_<value>``. Children that raise are recorded as
    ``failed``; the sweep itself completes.

    Args:
        axis: Train config key to vary.
        values: Values of `axis`, one child each.
        base_named_configs: Train named configs for every child.
        base_config_updates: Train config updates for every child.
        parallelism: Children run at once.
        init_kwargs: Arguments to `ray.init` when `parallelism` > 1.
        block_size: Records per block of the comparison table.
        seed: Sweep seed.

    Returns:
        Status and the status of every child.
    """
    sweep_dir = logging_ingredient.make_run_dir()
    # Convert Sacred's ReadOnlyDict and ReadOnlyList to builtins, since they
    # are not picklable.
    values = sacred_util.plain(values)
    base_config_updates = copy.deepcopy(sacred_util.plain(base_config_updates))
    jobs = []
    for i, value in enumerate(values):
        child_dir = sweep_dir / f"{axis}_{value}"
        updates = copy.deepcopy(base_config_updates)
        updates.update({axis: value, "seed": util.derive_seed(seed, i)})
        updates["progress_bar"] = False
        updates["logging"] = {**updates.get("logging", {}), "run_dir": str(child_dir)}
        jobs.append(
            dict(
                named_configs=list(base_named_configs),
                config_updates=updates,
                sacred_dir=str(sweep_dir / "sacred_children"),
            ),
        )
    logger.info("Sweeping %s over %s", axis, values)
    outcomes = _run_children(jobs, parallelism, sacred_util.plain(init_kwargs))

    children = [
        reports.SweepChild(value=value, **outcome)
        for value, outcome in zip(values, outcomes)
    ]
    table = reports.comparison_table(axis, children, block_size)
    reports.to_csv(table, sweep_dir / "comparison.csv")
    sacred_util.RunManifest(
        command="sweep",
        config=dict(
            axis=axis,
            values=values,
            base_named_configs=list(base_named_configs),
            base_config_updates=base_config_updates,
            block_size=block_size,
        ),
        seed=seed,
        artifacts={"comparison": "comparison.csv"},
        extra={"children": [dict(value=c.value, status=c.status) for c in children]},
    ).save(sweep_dir)
    return {
        "status": "completed",
        "children": {str(c.value): c.status for c in children},
    }


def main_console():
    sys.exit(sacred_util.run_console(sweep_ex, "sweep"))


if __name__ == "__main__":  # pragma: no cover
    main_console()
