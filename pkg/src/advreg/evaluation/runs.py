"""Reading back the artifacts of a finished training run."""

import dataclasses
import pathlib
import re
from typing import Dict, List, Sequence, Tuple

from advreg.data import models, types
from advreg.evaluation import evaluate
from advreg.evaluation import references as references_lib
from advreg.networks import mlp, serialize
from advreg.util import sacred as sacred_util
from advreg.util import util

_CHECKPOINT_RE = re.compile(r"gen_(\d+)\.ckpt$")


@dataclasses.dataclass(frozen=True)
class TrainedRun:
    """A train run directory and what its manifest says about it."""

    run_dir: pathlib.Path
    manifest: sacred_util.RunManifest

    @property
    def run_id(self) -> str:
        return self.manifest.run_id or self.run_dir.name

    @property
    def model(self) -> types.ModelSpec:
        return models.get_model(self.manifest.config["model"]["kind"])

    @property
    def direction(self) -> str:
        return self.manifest.config["direction"]

    @property
    def gan(self) -> str:
        return self.manifest.config["gan"]

    @property
    def conditions(self) -> Tuple[float, ...]:
        return tuple(float(c) for c in self.manifest.config["conditions"])

    @property
    def cond_dim(self) -> int:
        return self.model.input_dim if self.direction == "forward" else 1

    @property
    def hist(self) -> evaluate.HistogramSpec:
        cfg = self.manifest.config
        return evaluate.HistogramSpec(cfg["hist_lo"], cfg["hist_hi"], cfg["hist_bins"])

    @property
    def metrics_path(self) -> pathlib.Path:
        return self.run_dir / self.manifest.artifacts["metrics"]

    @property
    def reports_dir(self) -> pathlib.Path:
        return self.run_dir / self.manifest.artifacts["reports"]

    def labels(self, suffix: str = "") -> Dict[str, str]:
        """Label columns for metric records of this run."""
        return dict(
            run_id=self.run_id + suffix,
            model=self.model.kind,
            direction=self.direction,
            gan=self.gan,
        )

    def references(self) -> Dict[float, types.Reference]:
        return references_lib.load_references(
            self.run_dir / self.manifest.artifacts["references"],
        )

    def checkpoints(self) -> Dict[int, pathlib.Path]:
        """Generator checkpoint files keyed by update count."""
        ckpt_dir = self.run_dir / self.manifest.artifacts["checkpoints"]
        found = {}
        for path in ckpt_dir.glob("gen_*.ckpt"):
            match = _CHECKPOINT_RE.search(path.name)
            if match:
                found[int(match.group(1))] = path
        return dict(sorted(found.items()))

    def load_generators(self, updates: Sequence[int]) -> List[mlp.Network]:
        """Generators saved at `updates`.

        Raises:
            FileNotFoundError: some of the updates have no checkpoint.
        """
        available = self.checkpoints()
        missing = [u for u in updates if u not in available]
        if missing:
            raise FileNotFoundError(
                f"{self.run_dir}: no checkpoints for updates {missing}; "
                f"available {list(available)}.",
            )
        return [serialize.load_network(available[u]) for u in updates]

    def final_generator(self) -> Tuple[int, mlp.Network]:
        """Update count and network of the latest checkpoint.

        Raises:
            FileNotFoundError: the run saved no checkpoint.
        """
        available = self.checkpoints()
        if not available:
            raise FileNotFoundError(f"{self.run_dir}: no generator checkpoints.")
        update = max(available)
        return update, serialize.load_network(available[update])


def load_run(run_dir: types.AnyPath) -> TrainedRun:
    """Opens a directory written by ``advreg-train``.

    Raises:
        FileNotFoundError: no manifest in `run_dir`.
        ValueError: the manifest is not from a train run.
    """
    path = util.parse_path(run_dir)
    manifest = sacred_util.RunManifest.load(path)
    if manifest.command != "train":
        raise ValueError(f"{path} holds a {manifest.command} run, not a train run.")
    return TrainedRun(run_dir=path, manifest=manifest)
