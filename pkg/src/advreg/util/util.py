"""Miscellaneous utility methods."""

import datetime
import hashlib
import json
import pathlib
import uuid
from typing import Any, Mapping, Optional

import numpy as np

from advreg.data.types import AnyPath

# Fixed keys of the per-purpose random substreams derived from one run seed.
RNG_PURPOSES = {
    "data": 0,
    "oracle": 1,
    "init_gen": 2,
    "init_disc": 3,
    "shuffle": 4,
    "latent": 5,
    "penalty": 6,
    "eval": 7,
    "pairing": 8,
}


def make_unique_timestamp() -> str:
    """Timestamp, with random uuid added to avoid collisions."""
    ISO_TIMESTAMP = "%Y%m%d_%H%M%S"
    timestamp = datetime.datetime.now().strftime(ISO_TIMESTAMP)
    random_uuid = uuid.uuid4().hex[:6]
    return f"{timestamp}_{random_uuid}"


def make_rng(seed: int, purpose: str, *index: int) -> np.random.Generator:
    """An independent PCG64 stream for `purpose` (and optional sub-indices) of `seed`.

    Args:
        seed: Non-negative run seed.
        purpose: A key of `RNG_PURPOSES`.
        index: Further entropy words, e.g. an oracle chunk number.

    Returns:
        A generator whose stream depends only on `(seed, purpose, *index)`.

    Raises:
        ValueError: unknown purpose or negative seed.
    """
    if purpose not in RNG_PURPOSES:
        raise ValueError(f"Unknown RNG purpose '{purpose}'.")
    if seed < 0:
        raise ValueError(f"Seeds must be non-negative, got {seed}.")
    entropy = [int(seed), RNG_PURPOSES[purpose], *map(int, index)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed: int, index: int) -> int:
    """Seed of the `index`-th child of a run seeded with `seed`."""
    state = np.random.SeedSequence([int(seed), int(index)]).generate_state(1)
    return int(state[0] >> 1)


def config_digest(config: Mapping[str, Any]) -> str:
    """Stable short digest of a JSON-serializable configuration."""
    text = json.dumps(config, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def unique_dir(root: AnyPath, name: str) -> pathlib.Path:
    """`root/name`, or `root/name_1`, `root/name_2`, ... if that already exists."""
    root = parse_path(root)
    candidate = root / name
    suffix = 0
    while candidate.exists():
        suffix += 1
        candidate = root / f"{name}_{suffix}"
    return candidate


def parse_path(path: AnyPath, base_directory: Optional[AnyPath] = None) -> pathlib.Path:
    """Absolute `pathlib.Path` for `path`.

    Relative paths are taken relative to `base_directory`, or the working directory.
    """
    if isinstance(path, bytes):
        path = path.decode()
    parsed = pathlib.Path(path)
    if parsed.is_absolute():
        return parsed
    base = pathlib.Path.cwd() if base_directory is None else parse_path(base_directory)
    return base / parsed
