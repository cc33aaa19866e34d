"""Samples a synthetic regression dataset into a run directory."""

import logging
import sys
from typing import Any, Mapping

from advreg.data import models
from advreg.data import serialize as data_serialize
from advreg.scripts.config.gen_data import gen_data_ex
from advreg.scripts.ingredients import logging as logging_ingredient
from advreg.util import sacred as sacred_util
from advreg.util import util

logger = logging.getLogger(__name__)


@gen_data_ex.main
def gen_data(model: str, n: int, seed: int) -> Mapping[str, Any]:
    """Writes ``dataset.csv`` and ``manifest.json``.

    Args:
        model: Model key.
        n: Number of pairs.
        seed: Run seed; the pairs come from its ``data`` stream.

    Returns:
        Status and the dataset path.
    """
    run_dir = logging_ingredient.make_run_dir()
    spec = models.get_model(model)
    dataset = models.sample_dataset(spec, n, seed)
    data_serialize.save_dataset(run_dir / "dataset.csv", dataset)
    config = {"model": model, "n": n, "seed": seed}
    sacred_util.RunManifest(
        command="gen_data",
        config=config,
        seed=seed,
        config_digest=util.config_digest(config),
        artifacts={"dataset": "dataset.csv"},
    ).save(run_dir)
    return {"status": "completed", "dataset": str(run_dir / "dataset.csv")}


def main_console():
    sys.exit(sacred_util.run_console(gen_data_ex, "gen_data"))


if __name__ == "__main__":  # pragma: no cover
    main_console()
