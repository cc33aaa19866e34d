"""True conditionals used as evaluation references, and their on-disk cache."""

import logging
from typing import Dict, Mapping, Sequence

import numpy as np

from advreg.data import models, oracle, types
from advreg.util import util

logger = logging.getLogger(__name__)


def build_references(
    model: types.ModelSpec,
    direction: str,
    conditions: Sequence[float],
    *,
    seed: int,
    slice_width: float = oracle.SLICE_WIDTH,
    n_oracle: int = oracle.N_ORACLE,
    oracle_chunk: int = oracle.CHUNK_SIZE,
) -> Dict[float, types.Reference]:
    """One reference per condition.

    Forward references are the analytic Normal conditionals at
    ``condition * ones(p)``; inverse references come from the slicing oracle.

    Raises:
        EmptySliceError: an inverse slice retained nothing.
        ValueError: inverse direction on a multi-input model.
    """
    if not model.supports(direction):
        raise ValueError(f"{model.kind} has no {direction} references.")
    refs: Dict[float, types.Reference] = {}
    for c in conditions:
        if direction == "forward":
            point = models.condition_point(model, c)
            refs[float(c)] = models.analytic_forward_conditional(model, point)
        else:
            refs[float(c)] = oracle.slice_oracle(
                model,
                y0=c,
                width=slice_width,
                n_oracle=n_oracle,
                seed=seed,
                chunk_size=oracle_chunk,
            )
            logger.info("Slice at y=%s holds %d values", c, refs[float(c)].count)
    return refs


def save_references(
    path: types.AnyPath,
    refs: Mapping[float, types.Reference],
) -> None:
    """Stores references in a ``.npz`` archive keyed by condition index."""
    arrays: Dict[str, np.ndarray] = {
        "conditions": np.array(sorted(refs), dtype=np.float64),
    }
    for i, c in enumerate(sorted(refs)):
        ref = refs[c]
        if isinstance(ref, types.SliceSample):
            arrays[f"slice_{i}"] = ref.values
            arrays[f"slice_meta_{i}"] = np.array([ref.y0, ref.width, ref.n_oracle])
        else:
            arrays[f"normal_{i}"] = np.array([ref.mean, ref.variance])
    p = util.parse_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    np.savez(p, **arrays)


def load_references(path: types.AnyPath) -> Dict[float, types.Reference]:
    refs: Dict[float, types.Reference] = {}
    with np.load(util.parse_path(path)) as archive:
        for i, c in enumerate(archive["conditions"]):
            if f"normal_{i}" in archive:
                mean, variance = archive[f"normal_{i}"]
                refs[float(c)] = types.AnalyticConditional(
                    mean=float(mean),
                    variance=float(variance),
                    degenerate=variance == 0,
                )
            else:
                values = archive[f"slice_{i}"]
                y0, width, n_oracle = archive[f"slice_meta_{i}"]
                refs[float(c)] = types.SliceSample(
                    y0=float(y0),
                    width=float(width),
                    values=values,
                    count=len(values),
                    n_oracle=int(n_oracle),
                )
    return refs
