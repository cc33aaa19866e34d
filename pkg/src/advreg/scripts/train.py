"""Train a conditional GAN as a sampler of a regression's predictive distribution."""

import logging
import pathlib
import sys
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from advreg.algorithms import ols
from advreg.algorithms.adversarial import common, training
from advreg.data import models
from advreg.data import serialize as data_serialize
from advreg.data import types
from advreg.evaluation import evaluate
from advreg.evaluation import references as references_lib
from advreg.networks import mlp
from advreg.scripts.config.train import make_train_config, train_ex
from advreg.scripts.ingredients import logging as logging_ingredient
from advreg.util import sacred as sacred_util
from advreg.util import util

logger = logging.getLogger(__name__)

# Experiment config keys stored in the manifest besides the `TrainConfig` fields.
EVAL_CONFIG_KEYS = (
    "dataset_path",
    "n_eval",
    "slice_width",
    "n_oracle",
    "oracle_chunk",
    "hist_lo",
    "hist_hi",
    "hist_bins",
)


def ols_baseline(
    dataset: types.Dataset,
    config: common.TrainConfig,
) -> Optional[Dict[str, Any]]:
    """OLS fit with intercept and its Normal prediction at every forward condition.

    Returns:
        ``None`` for the inverse direction; otherwise the coefficients, the
        residual variance and a ``{condition: {point, variance}}`` mapping.
    """
    if config.direction != "forward":
        return None
    fit = ols.ols_fit(ols.with_intercept(dataset.X), dataset.Y)
    predictions = {}
    for c in config.conditions:
        x_star = np.concatenate([[1.0], models.condition_point(config.model, c)])
        point, variance = ols.ols_predict(fit, x_star)
        predictions[repr(float(c))] = {"point": point, "variance": variance}
    return {
        "beta": fit.beta.tolist(),
        "sigma2": fit.sigma2,
        "predictions": predictions,
    }


def make_eval_callback(
    config: common.TrainConfig,
    references: Mapping[float, types.Reference],
    metrics_path: pathlib.Path,
    *,
    n_eval: Optional[int],
    hist: evaluate.HistogramSpec,
    labels: Mapping[str, str],
) -> common.EvalCallback:
    """Scores the generator at every condition and appends the rows to a CSV.

    Each evaluation draws its noise from the ``eval`` stream of the run seed,
    keyed by the update count.
    """

    def callback(update: int, generator: mlp.Network) -> List[evaluate.MetricRecord]:
        rng = util.make_rng(config.seed, "eval", update)
        records = [
            evaluate.evaluate(
                generator,
                c,
                references[float(c)],
                n_eval,
                rng=rng,
                cond_dim=config.cond_dim,
                update=update,
                hist=hist,
                **labels,
            )
            for c in config.conditions
        ]
        evaluate.append_metrics(metrics_path, records)
        return records

    return callback


@train_ex.main
def train(
    _config: Mapping[str, Any],
    seed: int,
    model: str,
    dataset_path: Optional[str],
    n_eval: Optional[int],
    slice_width: float,
    n_oracle: int,
    oracle_chunk: int,
    hist_lo: float,
    hist_hi: float,
    hist_bins: int,
    progress_bar: bool,
) -> Mapping[str, Any]:
    """Trains a generator and evaluates it against the true conditionals.

    The run directory receives the dataset, the evaluation references,
    generator checkpoints, the metrics CSV and ``manifest.json``.

    Args:
        seed: Run seed, split into per-purpose random streams.
        model: Model key.
        dataset_path: Dataset to train on; sampled from `model` when None.
        n_eval: Generated values per evaluation; None for the per-direction
            default.
        slice_width: Half-width of the inverse-direction slices.
        n_oracle: Draws made by the slicing oracle.
        oracle_chunk: Oracle draws per chunk.
        hist_lo: Lower end of the KL/JS histogram range.
        hist_hi: Upper end of the KL/JS histogram range.
        hist_bins: Number of KL/JS histogram bins.
        progress_bar: Show a progress bar.

    Returns:
        Status (``completed`` or ``diverged``), updates done and the run directory.
    """
    custom_logger, run_dir = logging_ingredient.setup_logging()
    spec = models.get_model(model)
    if dataset_path is None:
        dataset = models.sample_dataset(spec, _config["n_data"], seed)
    else:
        dataset = data_serialize.load_dataset(dataset_path, spec, seed)
    config = make_train_config(_config, n_data=len(dataset))
    data_serialize.save_dataset(run_dir / "dataset.csv", dataset)

    references = references_lib.build_references(
        spec,
        config.direction,
        config.conditions,
        seed=seed,
        slice_width=slice_width,
        n_oracle=n_oracle,
        oracle_chunk=oracle_chunk,
    )
    references_lib.save_references(run_dir / "references.npz", references)

    metrics_path = run_dir / "metrics.csv"
    evaluate.write_metrics(metrics_path, [])
    callback = make_eval_callback(
        config,
        references,
        metrics_path,
        n_eval=n_eval,
        hist=evaluate.HistogramSpec(hist_lo, hist_hi, hist_bins),
        labels=dict(
            run_id=config.run_id,
            model=model,
            direction=config.direction,
            gan=config.gan.tag,
        ),
    )

    manifest = sacred_util.RunManifest(
        command="train",
        run_id=config.run_id,
        config={
            **config.to_dict(),
            **{k: sacred_util.plain(_config[k]) for k in EVAL_CONFIG_KEYS},
        },
        seed=seed,
        config_digest=config.digest,
        artifacts={
            "dataset": "dataset.csv",
            "references": "references.npz",
            "checkpoints": "checkpoints",
            "metrics": "metrics.csv",
            "reports": "reports",
        },
        status="running",
        extra={"ols": ols_baseline(dataset, config)},
    )
    manifest.save(run_dir)

    result = training.train(
        config,
        dataset,
        checkpoint_dir=run_dir / "checkpoints",
        callback=callback,
        custom_logger=custom_logger,
        progress_bar=progress_bar,
    )

    manifest.status = result.status
    manifest.extra.update(
        updates=result.updates,
        disc_updates=result.disc_updates,
        wall_seconds=result.wall_seconds,
        diagnostic=result.diagnostic,
        checkpoints=[
            str(path.relative_to(run_dir))
            for _, path in sorted(result.checkpoints.items())
        ],
    )
    manifest.save(run_dir)
    return {
        "status": result.status,
        "updates": result.updates,
        "run_dir": str(run_dir),
    }


def main_console():
    sys.exit(sacred_util.run_console(train_ex, "train"))


if __name__ == "__main__":  # pragma: no cover
    main_console()
