"""Writes CSV tables and SVG plots for a train run or a sweep."""

import logging
import pathlib
import sys
from typing import Any, Dict, List, Mapping

import numpy as np
import pandas as pd

from advreg.evaluation import evaluate, moments, reports, runs
from advreg.scripts.config.report import report_ex
from advreg.scripts.ingredients import logging as logging_ingredient
from advreg.util import sacred as sacred_util
from advreg.util import util

logger = logging.getLogger(__name__)

COMPARISON_NAME = "comparison.csv"


def run_report(
    run_dir: pathlib.Path,
    *,
    block_size: int,
    n_density: int,
    bandwidth: float,
    grid_points: int,
    seed: int,
) -> List[pathlib.Path]:
    """Tables and plots of one train run, written to its ``reports/`` directory.

    Per condition: distances against updates, moments against updates, and
    the KDE of the final generator's sample over the reference density.
    Plus ``blocks.csv`` with the block summaries of every distance.

    Raises:
        ValueError: the run has no metric records.
    """
    trained = runs.load_run(run_dir)
    records = evaluate.read_metrics(trained.metrics_path)
    if not records:
        raise ValueError(f"{trained.metrics_path} holds no metric records.")
    out_dir = trained.reports_dir
    written = [
        reports.to_csv(
            reports.block_table(records, block_size=block_size),
            out_dir / "blocks.csv",
        ),
    ]

    references = trained.references()
    final_update, final = trained.final_generator()
    hist = trained.hist
    grid = np.linspace(hist.lo, hist.hi, grid_points)
    by_condition = evaluate.records_by_condition(records)
    for i, (c, group) in enumerate(by_condition.items()):
        tag = reports.condition_tag(c)
        title = f"{trained.model.kind} {trained.direction} {trained.gan}, c={tag}"
        written.append(
            reports.plot_distances(group, out_dir / f"distances_{tag}.svg", title),
        )
        reference = references.get(c)
        ref_moments = None
        if reference is not None:
            ref_moments = reports.reference_moments(reference)
        moments_path = out_dir / f"moments_{tag}.svg"
        written.append(reports.plot_moments(group, ref_moments, moments_path, title))
        sample = evaluate.sample_conditional(
            final,
            c,
            n_density,
            util.make_rng(seed, "eval", i),
            cond_dim=trained.cond_dim,
        )
        curves = {
            f"generated (update {final_update})": moments.kde(sample, grid, bandwidth),
        }
        if reference is not None:
            curves["reference"] = reports.reference_density(reference, grid, bandwidth)
        written.append(
            reports.plot_density(grid, curves, out_dir / f"density_{tag}.svg", title),
        )
    return written


def sweep_report(sweep_dir: pathlib.Path) -> List[pathlib.Path]:
    """JS against updates for every sweep child, one plot per condition.

    Raises:
        ValueError: no child of the sweep wrote metric records.
    """
    comparison = pd.read_csv(sweep_dir / COMPARISON_NAME, keep_default_na=False)
    curves: Dict[float, Dict[str, List[evaluate.MetricRecord]]] = {}
    children = comparison.drop_duplicates(subset=["value", "run_dir"])
    for child in children.itertuples(index=False):
        path = pathlib.Path(str(child.run_dir)) / "metrics.csv"
        if not child.run_dir or not path.exists():
            continue
        label = f"{child.axis}={child.value}"
        child_records = evaluate.read_metrics(path)
        for c, group in evaluate.records_by_condition(child_records).items():
            curves.setdefault(c, {})[label] = group
    if not curves:
        raise ValueError(f"No child of {sweep_dir} has metric records.")
    out_dir = sweep_dir / "reports"
    return [
        reports.plot_sweep(
            curves[c],
            out_dir / f"sweep_js_{reports.condition_tag(c)}.svg",
            f"JS at c={reports.condition_tag(c)}",
        )
        for c in sorted(curves)
    ]


@report_ex.main
def report(
    block_size: int,
    n_density: int,
    bandwidth: float,
    grid_points: int,
    seed: int,
) -> Mapping[str, Any]:
    """Reports on the directory named by ``source_dir``.

    A directory holding ``comparison.csv`` is treated as a sweep, anything
    else as a train run.

    Returns:
        Status and the written files.
    """
    source = logging_ingredient.make_run_dir()
    if (source / COMPARISON_NAME).exists():
        written = sweep_report(source)
    else:
        written = run_report(
            source,
            block_size=block_size,
            n_density=n_density,
            bandwidth=bandwidth,
            grid_points=grid_points,
            seed=seed,
        )
    logger.info("Wrote %d report files under %s", len(written), source)
    return {"status": "completed", "files": [str(p) for p in written]}


def main_console():
    sys.exit(sacred_util.run_console(report_ex, "report"))


if __name__ == "__main__":  # pragma: no cover
    main_console()
