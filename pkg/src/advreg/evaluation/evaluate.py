"""Scoring generator samples against reference conditionals, and summarizing scores."""

import dataclasses
import logging
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from advreg.data import types
from advreg.evaluation import distances
from advreg.evaluation import moments as moments_lib
from advreg.networks import mlp
from advreg.util import util

N_EVAL_FORWARD = 10_000
BLOCK_SIZE = 100

METRIC_COLUMNS = (
    "run_id",
    "model",
    "direction",
    "gan",
    "condition",
    "update",
    "ks",
    "kl",
    "js",
    "mean_abs_diff",
    "mean",
    "var",
    "skew",
    "kurt",
)

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class HistogramSpec:
    lo: float = distances.HIST_LO
    hi: float = distances.HIST_HI
    n_bins: int = distances.HIST_BINS


@dataclasses.dataclass(frozen=True)
class MetricRecord:
    """Distances between a generated sample and the reference at one condition."""

    condition: float
    update: int
    ks: float
    kl: float
    js: float
    mean_abs_diff: float
    moments: moments_lib.MomentSet
    run_id: str = ""
    model: str = ""
    direction: str = ""
    gan: str = ""

    def to_row(self) -> Dict[str, Any]:
        return dict(
            run_id=self.run_id,
            model=self.model,
            direction=self.direction,
            gan=self.gan,
            condition=self.condition,
            update=self.update,
            ks=self.ks,
            kl=self.kl,
            js=self.js,
            mean_abs_diff=self.mean_abs_diff,
            mean=self.moments.mean,
            var=self.moments.variance,
            skew=self.moments.skewness,
            kurt=self.moments.kurtosis,
        )


def reference_histogram(
    reference: types.Reference,
    hist: HistogramSpec = HistogramSpec(),
) -> distances.Histogram:
    """Histogram of the reference on the evaluation binning.

    Analytic references are discretized exactly through differences of the
    Normal CDF, with the mass outside ``[lo, hi]`` folded into the end bins.
    """
    if isinstance(reference, types.SliceSample):
        return distances.histogram(reference.values, hist.lo, hist.hi, hist.n_bins)
    if reference.degenerate:
        raise ValueError("Cannot discretize a degenerate reference.")
    edges = np.linspace(hist.lo, hist.hi, hist.n_bins + 1)
    cdf = stats.norm.cdf(edges, loc=reference.mean, scale=reference.sd)
    mass = np.diff(cdf)
    mass[0] += cdf[0]
    mass[-1] += 1.0 - cdf[-1]
    mass = np.clip(mass, 0.0, None)
    return distances.Histogram(hist.lo, hist.hi, hist.n_bins, mass / mass.sum())


def default_n_eval(reference: types.Reference) -> int:
    """Slice count for slice references, 10,000 for analytic ones."""
    if isinstance(reference, types.SliceSample):
        return reference.count
    return N_EVAL_FORWARD


def sample_conditional(
    generator: mlp.Network,
    condition: float,
    n: int,
    rng: np.random.Generator,
    cond_dim: int = 1,
) -> np.ndarray:
    """`n` generated values at a fixed condition ``condition * ones(cond_dim)``.

    Raises:
        ValueError: `n` is not positive, or `cond_dim` leaves no noise inputs.
    """
    if n < 1:
        raise ValueError(f"Cannot draw {n} generated values.")
    noise_dim = generator.spec.input_dim - cond_dim
    if noise_dim < 1:
        raise ValueError(
            f"Generator input {generator.spec.input_dim} has no room for noise "
            f"after {cond_dim} condition columns.",
        )
    conditions = np.full((n, cond_dim), float(condition))
    noise = rng.standard_normal((n, noise_dim))
    return mlp.generate(generator, conditions, noise)[:, 0]


def score_sample(
    generated: np.ndarray,
    reference: types.Reference,
    *,
    condition: float,
    update: int = 0,
    hist: HistogramSpec = HistogramSpec(),
    **labels: str,
) -> MetricRecord:
    """Scores an already generated sample against `reference`.

    Args:
        generated: Generated values.
        reference: Analytic conditional or slice sample.
        condition: Condition value the sample was drawn at.
        update: Generator-update count, for the record.
        hist: Binning used by KL and JS.
        labels: ``run_id``, ``model``, ``direction`` and ``gan`` for the record.

    Returns:
        The record.

    Raises:
        ValueError: empty sample, or a degenerate analytic reference.
    """
    generated = np.asarray(generated, dtype=np.float64).reshape(-1)
    if generated.size == 0:
        raise ValueError("Generated sample is empty.")
    if isinstance(reference, types.AnalyticConditional):
        if reference.degenerate:
            raise ValueError(
                f"Reference at condition {condition} has zero variance; "
                "distances to it are undefined.",
            )
        normal = stats.norm(loc=reference.mean, scale=reference.sd)
        ks = distances.ks_distance_to_cdf(generated, normal.cdf)
    else:
        ks = distances.ks_distance(generated, reference.values)

    p = distances.histogram(generated, hist.lo, hist.hi, hist.n_bins)
    q = reference_histogram(reference, hist)
    if p.clamped:
        logger.debug("%d generated values outside the histogram range", p.clamped)
    return MetricRecord(
        condition=float(condition),
        update=int(update),
        ks=ks,
        kl=distances.kl_discrete(q, p),
        js=distances.js_divergence(p, q),
        mean_abs_diff=abs(float(np.mean(generated)) - reference.mean),
        moments=moments_lib.moments(generated),
        **labels,
    )


def evaluate(
    generator: mlp.Network,
    condition: float,
    reference: types.Reference,
    n_eval: Optional[int] = None,
    *,
    rng: np.random.Generator,
    cond_dim: int = 1,
    update: int = 0,
    hist: HistogramSpec = HistogramSpec(),
    **labels: str,
) -> MetricRecord:
    """Draws `n_eval` values from `generator` at `condition` and scores them.

    Args:
        generator: Generator network.
        condition: Scalar condition; multi-input models use it in every
            coordinate.
        reference: True conditional at `condition`.
        n_eval: Sample size; defaults to `default_n_eval(reference)`.
        rng: Source of the generator noise.
        cond_dim: Number of condition columns of the generator.
        update: Generator-update count, for the record.
        hist: Binning used by KL and JS.
        labels: Passed to `score_sample`.

    Returns:
        The record.
    """
    n = default_n_eval(reference) if n_eval is None else n_eval
    generated = sample_conditional(generator, condition, n, rng, cond_dim)
    return score_sample(
        generated,
        reference,
        condition=condition,
        update=update,
        hist=hist,
        **labels,
    )


@dataclasses.dataclass(frozen=True)
class BlockSummary:
    """Statistics of one metric over a block of consecutive records."""

    block: int
    condition: float
    metric: str
    first_update: int
    last_update: int
    n: int
    mean: float
    min: float
    q3: float
    max: float
    iqr: float
    partial: bool


def block_aggregate(
    records: Sequence[MetricRecord],
    metric: str = "js",
    block_size: int = BLOCK_SIZE,
) -> List[BlockSummary]:
    """Summarizes consecutive blocks of `block_size` records of one condition.

    With evaluation every 100 generator updates, a block of 100 records spans
    10,000 updates. Quartiles use linear interpolation between order statistics.
    A trailing block with fewer records is returned with ``partial=True``.

    Args:
        records: Records of a single condition, sorted by update.
        metric: Record field to summarize.
        block_size: Records per block.

    Returns:
        One summary per block.

    Raises:
        ValueError: records mix conditions or are not sorted by update.
    """
    if block_size < 1:
        raise ValueError(f"block_size must be positive, got {block_size}.")
    if not records:
        return []
    conditions = {r.condition for r in records}
    if len(conditions) > 1:
        raise ValueError(f"Records mix conditions {sorted(conditions)}.")
    updates = [r.update for r in records]
    if any(b <= a for a, b in zip(updates, updates[1:])):
        raise ValueError("Records must be sorted by strictly increasing update.")

    summaries = []
    for block, start in enumerate(range(0, len(records), block_size)):
        chunk = records[start : start + block_size]
        values = np.array([getattr(r, metric) for r in chunk], dtype=np.float64)
        q1, q3 = np.quantile(values, [0.25, 0.75])
        summaries.append(
            BlockSummary(
                block=block,
                condition=chunk[0].condition,
                metric=metric,
                first_update=chunk[0].update,
                last_update=chunk[-1].update,
                n=len(chunk),
                mean=float(np.mean(values)),
                min=float(np.min(values)),
                q3=float(q3),
                max=float(np.max(values)),
                iqr=float(q3 - q1),
                partial=len(chunk) < block_size,
            ),
        )
    return summaries


def ensemble_sample(
    generators: Sequence[mlp.Network],
    condition: float,
    n_per_checkpoint: int,
    rng: np.random.Generator,
    cond_dim: int = 1,
) -> np.ndarray:
    """Pools equal-size conditional samples from several generator states.

    Raises:
        ValueError: fewer than two generators, or generators with different specs.
    """
    if len(generators) < 2:
        raise ValueError(f"Need 2 or more checkpoints, got {len(generators)}.")
    spec = generators[0].spec
    for g in generators[1:]:
        if g.spec != spec:
            raise ValueError("Ensemble checkpoints have different network specs.")
    samples = [
        sample_conditional(g, condition, n_per_checkpoint, rng, cond_dim)
        for g in generators
    ]
    return np.concatenate(samples)


def records_frame(records: Iterable[MetricRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in records], columns=list(METRIC_COLUMNS))


def write_metrics(path: types.AnyPath, records: Iterable[MetricRecord]) -> None:
    """Writes records in the fixed metrics CSV schema."""
    p = util.parse_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    records_frame(records).to_csv(p, index=False, float_format="%.17g", na_rep="nan")


def append_metrics(path: types.AnyPath, records: Iterable[MetricRecord]) -> None:
    """Appends records to a metrics CSV, writing the header if the file is new."""
    p = util.parse_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    records_frame(records).to_csv(
        p,
        mode="a",
        header=not p.exists(),
        index=False,
        float_format="%.17g",
        na_rep="nan",
    )


def read_metrics(path: types.AnyPath) -> List[MetricRecord]:
    """Reads records written by `write_metrics`."""
    frame = pd.read_csv(
        util.parse_path(path),
        float_precision="round_trip",
        keep_default_na=False,
        na_values=["nan", "NaN"],
        dtype={"run_id": str, "model": str, "direction": str, "gan": str},
    )
    missing = set(METRIC_COLUMNS) - set(frame.columns)
    if missing:
        raise ValueError(f"{path}: missing metric columns {sorted(missing)}.")
    records = []
    for row in frame.itertuples(index=False):
        variance = float(row.var)
        records.append(
            MetricRecord(
                condition=float(row.condition),
                update=int(row.update),
                ks=float(row.ks),
                kl=float(row.kl),
                js=float(row.js),
                mean_abs_diff=float(row.mean_abs_diff),
                moments=moments_lib.MomentSet(
                    mean=float(row.mean),
                    variance=variance,
                    skewness=float(row.skew),
                    kurtosis=float(row.kurt),
                    degenerate=variance == 0,
                ),
                run_id=row.run_id,
                model=row.model,
                direction=row.direction,
                gan=row.gan,
            ),
        )
    return records


def records_by_condition(
    records: Iterable[MetricRecord],
) -> Dict[float, List[MetricRecord]]:
    """Groups records by condition, each group sorted by update."""
    groups: Dict[float, List[MetricRecord]] = {}
    for r in records:
        groups.setdefault(r.condition, []).append(r)
    return {c: sorted(rs, key=lambda r: r.update) for c, rs in sorted(groups.items())}
