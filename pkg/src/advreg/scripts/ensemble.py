"""Pools samples from late generator checkpoints and scores them."""

import logging
import sys
from typing import Any, List, Mapping, Optional, Sequence

from advreg.evaluation import evaluate, runs
from advreg.scripts.config.ensemble import ensemble_ex
from advreg.scripts.ingredients import logging as logging_ingredient
from advreg.util import sacred as sacred_util
from advreg.util import util

logger = logging.getLogger(__name__)


def ensemble_updates(first: int, last: int, step: int) -> List[int]:
    """Updates ``first, first + step, ...`` up to and including `last`.

    >>> ensemble_updates(0, 20, 20)
    [0, 20]
    """
    return list(range(first, last + 1, step))


@ensemble_ex.main
def ensemble(
    source_dir: str,
    first: int,
    last: int,
    step: int,
    conditions: Optional[Sequence[float]],
    n_per: int,
    seed: int,
) -> Mapping[str, Any]:
    """Scores the pooled checkpoint sample next to the final checkpoint alone.

    Both samples hold ``n_per`` values per pooled checkpoint. The rows are
    written to ``reports/ensemble_metrics.csv`` in the metrics schema, with
    ``:ensemble`` and ``:final`` appended to the run id.

    Args:
        source_dir: Train run directory.
        first: First pooled update.
        last: Last pooled update.
        step: Spacing of pooled updates.
        conditions: Conditions to score; defaults to the run's conditions.
        n_per: Generated values per pooled checkpoint.
        seed: Seed of the generator noise.

    Returns:
        Status and the JS divergence of both samples per condition.
    """
    run_dir = logging_ingredient.make_run_dir()
    trained = runs.load_run(run_dir)
    updates = ensemble_updates(first, last, step)
    generators = trained.load_generators(updates)
    final_update, final = trained.final_generator()
    references = trained.references()
    conds = trained.conditions if conditions is None else conditions
    logger.info("Pooling %d checkpoints of %s", len(generators), trained.run_id)

    records = []
    js = {}
    for i, c in enumerate(conds):
        c = float(c)
        if c not in references:
            raise ValueError(f"{trained.run_id} has no reference at condition {c}.")
        rng = util.make_rng(seed, "eval", i)
        pooled = evaluate.ensemble_sample(
            generators,
            c,
            n_per,
            rng,
            cond_dim=trained.cond_dim,
        )
        single = evaluate.sample_conditional(
            final,
            c,
            len(pooled),
            rng,
            cond_dim=trained.cond_dim,
        )
        pooled_record = evaluate.score_sample(
            pooled,
            references[c],
            condition=c,
            update=last,
            hist=trained.hist,
            **trained.labels(":ensemble"),
        )
        single_record = evaluate.score_sample(
            single,
            references[c],
            condition=c,
            update=final_update,
            hist=trained.hist,
            **trained.labels(":final"),
        )
        records += [pooled_record, single_record]
        js[repr(c)] = {"ensemble": pooled_record.js, "final": single_record.js}

    out_path = trained.reports_dir / "ensemble_metrics.csv"
    evaluate.write_metrics(out_path, records)
    logger.info("Wrote %s", out_path)
    return {"status": "completed", "js": js}


def main_console():
    sys.exit(sacred_util.run_console(ensemble_ex, "ensemble"))


if __name__ == "__main__":  # pragma: no cover
    main_console()
