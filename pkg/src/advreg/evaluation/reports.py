"""Report tables and SVG plots built from metric records."""

import dataclasses
import logging
import pathlib
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from advreg.data import types
from advreg.evaluation import evaluate
from advreg.evaluation import moments as moments_lib

DISTANCE_METRICS = ("ks", "kl", "js")
GRID_POINTS = 401
SVG_HASH_SALT = "advreg"

# (MomentSet field, axis title)
MOMENT_PANELS = (
    ("mean", "mean"),
    ("variance", "variance"),
    ("skewness", "skewness"),
    ("kurtosis", "kurtosis"),
)

COMPARISON_COLUMNS = (
    "axis",
    "value",
    "status",
    "run_dir",
    "condition",
    "block",
    "first_update",
    "last_update",
    "n",
    "mean",
    "q3",
    "max",
    "iqr",
    "partial",
)

logger = logging.getLogger(__name__)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: pathlib.Path) -> pathlib.Path:
    """Writes `fig` as an SVG that is byte-identical across reruns."""
    import matplotlib

    plt = _pyplot()
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug("Saved %s", path)
    return path


def condition_tag(condition: float) -> str:
    """File-name fragment for a condition value, e.g. ``0.4``."""
    return f"{condition:g}"


def to_csv(frame: pd.DataFrame, path: pathlib.Path) -> pathlib.Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g", na_rep="nan")
    return path


def block_table(
    records: Sequence[evaluate.MetricRecord],
    metrics: Sequence[str] = DISTANCE_METRICS,
    block_size: int = evaluate.BLOCK_SIZE,
) -> pd.DataFrame:
    """Block summaries of every metric at every condition, as one table."""
    rows = []
    for group in evaluate.records_by_condition(records).values():
        for metric in metrics:
            for summary in evaluate.block_aggregate(group, metric, block_size):
                rows.append(dataclasses.asdict(summary))
    columns = [f.name for f in dataclasses.fields(evaluate.BlockSummary)]
    return pd.DataFrame(rows, columns=columns)


@dataclasses.dataclass(frozen=True)
class SweepChild:
    """One training run of a sweep."""

    value: Any
    """Value of the swept key."""

    status: str
    """``completed``, ``diverged`` or ``failed``."""

    run_dir: Optional[str] = None
    error: Optional[str] = None


def comparison_table(
    axis: str,
    children: Sequence[SweepChild],
    block_size: int = evaluate.BLOCK_SIZE,
) -> pd.DataFrame:
    """One row per (child, condition, block) with the JS block statistics.

    Children that failed, or wrote no metrics, get a single row with the
    status and missing statistics.
    """
    rows: List[Dict[str, Any]] = []
    for child in children:
        base = dict(axis=axis, value=child.value, status=child.status)
        base["run_dir"] = child.run_dir
        records: List[evaluate.MetricRecord] = []
        if child.run_dir is not None:
            path = pathlib.Path(child.run_dir) / "metrics.csv"
            if path.exists():
                records = evaluate.read_metrics(path)
        if not records:
            rows.append(base)
            continue
        for condition, group in evaluate.records_by_condition(records).items():
            for s in evaluate.block_aggregate(group, "js", block_size):
                rows.append(
                    dict(
                        base,
                        condition=condition,
                        block=s.block,
                        first_update=s.first_update,
                        last_update=s.last_update,
                        n=s.n,
                        mean=s.mean,
                        q3=s.q3,
                        max=s.max,
                        iqr=s.iqr,
                        partial=s.partial,
                    ),
                )
    return pd.DataFrame(rows, columns=list(COMPARISON_COLUMNS))


def reference_density(
    reference: types.Reference,
    grid: np.ndarray,
    bandwidth: float = moments_lib.KDE_BANDWIDTH,
) -> np.ndarray:
    """Normal pdf of an analytic reference, or the KDE of a slice sample."""
    if isinstance(reference, types.SliceSample):
        return moments_lib.kde(reference.values, grid, bandwidth)
    return stats.norm.pdf(grid, loc=reference.mean, scale=reference.sd)


def reference_moments(reference: types.Reference) -> moments_lib.MomentSet:
    if isinstance(reference, types.SliceSample):
        return moments_lib.moments(reference.values)
    return moments_lib.MomentSet(
        mean=reference.mean,
        variance=reference.variance,
        skewness=0.0,
        kurtosis=3.0,
        degenerate=reference.degenerate,
    )


def plot_distances(
    records: Sequence[evaluate.MetricRecord],
    path: pathlib.Path,
    title: str,
) -> pathlib.Path:
    """KS, KL and JS against generator updates, one panel each."""
    plt = _pyplot()
    updates = [r.update for r in records]
    fig, axes = plt.subplots(len(DISTANCE_METRICS), 1, figsize=(7, 7), sharex=True)
    for ax, metric in zip(axes, DISTANCE_METRICS):
        ax.plot(updates, [getattr(r, metric) for r in records], linewidth=0.8)
        ax.set_ylabel(metric.upper())
        ax.grid(True, alpha=0.3)
    axes[0].set_title(title)
    axes[-1].set_xlabel("generator update")
    fig.tight_layout()
    return _save(fig, path)


def plot_density(
    grid: np.ndarray,
    curves: Mapping[str, np.ndarray],
    path: pathlib.Path,
    title: str,
) -> pathlib.Path:
    """Overlays density curves evaluated on a common grid."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, density in curves.items():
        ax.plot(grid, density, label=label, linewidth=1.0)
    ax.set_title(title)
    ax.set_xlabel("value")
    ax.set_ylabel("density")
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def plot_moments(
    records: Sequence[evaluate.MetricRecord],
    reference: Optional[moments_lib.MomentSet],
    path: pathlib.Path,
    title: str,
) -> pathlib.Path:
    """Generated moments against updates, with reference moments as flat lines."""
    plt = _pyplot()
    updates = [r.update for r in records]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    for ax, (field, label) in zip(axes.flat, MOMENT_PANELS):
        ax.plot(updates, [getattr(r.moments, field) for r in records], linewidth=0.8)
        if reference is not None and np.isfinite(getattr(reference, field)):
            ax.axhline(getattr(reference, field), color="black", linestyle="--")
        ax.set_title(label)
        ax.grid(True, alpha=0.3)
    for ax in axes[-1]:
        ax.set_xlabel("generator update")
    fig.suptitle(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(
    curves: Mapping[str, Sequence[evaluate.MetricRecord]],
    path: pathlib.Path,
    title: str,
    metric: str = "js",
) -> pathlib.Path:
    """One metric against updates for every child of a sweep."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, records in curves.items():
        ax.plot(
            [r.update for r in records],
            [getattr(r, metric) for r in records],
            label=label,
            linewidth=0.8,
        )
    ax.set_title(title)
    ax.set_xlabel("generator update")
    ax.set_ylabel(metric.upper())
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)
