"""Core code for adversarial regression, shared by every GAN loss family."""

import abc
import dataclasses
import logging
import pathlib
import time
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import tqdm

from advreg.algorithms import base
from advreg.algorithms.adversarial import objectives
from advreg.data import types
from advreg.networks import mlp, serialize
from advreg.numkit import autodiff, optimizers
from advreg.numkit.autodiff import Tensor
from advreg.util import logger as advreg_logger
from advreg.util import util

# Per-kind defaults: (batch_size, learning rate, discriminator steps per update).
GAN_DEFAULTS: Mapping[str, Tuple[int, float, int]] = {
    "sgan": (2000, 1e-4, 5),
    "wgan_clip": (2000, 1e-5, 5),
    "wgan_gp": (2000, 1e-5, 5),
    "rsgan": (500, 1e-5, 1),
    "rasgan": (500, 1e-5, 5),
}

DEFAULT_CONDITIONS = (0.1, 0.4, 0.7, 1.0)

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class GanKind:
    """A GAN loss family and its kind-specific constants."""

    tag: str
    clip_c: float = 0.01
    """Weight-clipping bound, used by ``wgan_clip``."""

    lambda_gp: float = 0.1
    """Gradient-penalty weight, used by ``wgan_gp``."""

    def __post_init__(self):
        objectives.check_kind(self.tag)
        if self.clip_c <= 0:
            raise ValueError(f"clip_c must be positive, got {self.clip_c}.")
        if self.lambda_gp < 0:
            raise ValueError(f"lambda_gp must be non-negative, got {self.lambda_gp}.")

    @property
    def critic_role(self) -> str:
        return "discriminator" if self.tag == "sgan" else "critic"

    @property
    def default_batch_size(self) -> int:
        return GAN_DEFAULTS[self.tag][0]

    @property
    def default_lr(self) -> float:
        return GAN_DEFAULTS[self.tag][1]

    @property
    def default_d_steps(self) -> int:
        return GAN_DEFAULTS[self.tag][2]


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """Everything that determines a training run besides the dataset.

    `batch_size`, `lr` and `d_steps` default to `None`, meaning the
    per-kind default of `gan`; the resolved values are stored.
    """

    gan: GanKind
    model: types.ModelSpec
    direction: str = "forward"
    n_data: int = 10_000
    noise_dim: int = 10
    batch_size: Optional[int] = None
    lr: Optional[float] = None
    beta1: float = 0.0
    beta2: float = 0.9
    epsilon: float = 1e-8
    optimizer: str = "adam"
    d_steps: Optional[int] = None
    g_steps: int = 1
    total_updates: int = 20_000
    eval_every: int = 100
    checkpoint_every: int = 10_000
    conditions: Tuple[float, ...] = DEFAULT_CONDITIONS
    gen_hidden: Tuple[int, ...] = mlp.GENERATOR_HIDDEN
    disc_hidden: Tuple[int, ...] = mlp.DISCRIMINATOR_HIDDEN
    leaky_slope: float = mlp.LEAKY_SLOPE
    out_dim: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        resolved = dict(
            batch_size=self.gan.default_batch_size,
            lr=self.gan.default_lr,
            d_steps=self.gan.default_d_steps,
            out_dim=self.target_dim,
        )
        for name, default in resolved.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
        for name in ("conditions", "gen_hidden", "disc_hidden"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

        if not self.model.supports(self.direction):
            raise ValueError(
                f"{self.model.kind} supports only the forward direction, "
                f"got '{self.direction}'.",
            )
        if self.out_dim != self.target_dim:
            raise ValueError(
                f"Generator output {self.out_dim} != target width {self.target_dim} "
                f"for {self.model.kind} {self.direction}.",
            )
        for name in ("n_data", "noise_dim", "batch_size", "d_steps", "g_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}.")
        for name in ("total_updates", "eval_every", "checkpoint_every"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}.")
        assert self.batch_size is not None
        if self.batch_size > self.n_data:
            raise ValueError(
                f"batch_size {self.batch_size} exceeds n_data {self.n_data}.",
            )
        if self.checkpoint_every % self.eval_every != 0:
            raise ValueError(
                f"eval_every {self.eval_every} must divide checkpoint_every "
                f"{self.checkpoint_every}.",
            )
        optimizers.get_step_fn(self.optimizer)
        optimizers.OptimizerState(
            alpha=float(self.lr),  # type: ignore[arg-type]
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
        )
        if not self.conditions:
            raise ValueError("At least one evaluation condition is required.")

    @property
    def cond_dim(self) -> int:
        return self.model.input_dim if self.direction == "forward" else 1

    @property
    def target_dim(self) -> int:
        return 1 if self.direction == "forward" else self.model.input_dim

    def to_dict(self) -> Dict[str, Any]:
        d = dataclasses.asdict(self)
        d["gan"] = d["gan"]["tag"]
        d["clip_c"] = self.gan.clip_c
        d["lambda_gp"] = self.gan.lambda_gp
        d["conditions"] = list(self.conditions)
        d["gen_hidden"] = list(self.gen_hidden)
        d["disc_hidden"] = list(self.disc_hidden)
        return d

    @property
    def digest(self) -> str:
        return util.config_digest(self.to_dict())

    @property
    def run_id(self) -> str:
        """Label of the run in metric tables; equal configs and seeds share it."""
        return f"{self.model.kind}_{self.direction}_{self.gan.tag}_{self.digest[:8]}"


@dataclasses.dataclass
class TrainRun:
    """Outcome of a training run."""

    config_digest: str
    status: str = "running"
    """``running``, ``completed`` or ``diverged``."""

    updates: int = 0
    """Generator updates completed."""

    disc_updates: int = 0
    checkpoints: Dict[int, pathlib.Path] = dataclasses.field(default_factory=dict)
    """Checkpoint files keyed by generator-update count."""

    metric_log: List[Any] = dataclasses.field(default_factory=list)
    """Values returned by the evaluation callback, in call order."""

    wall_seconds: float = 0.0
    diagnostic: Optional[Dict[str, Any]] = None
    """Why training stopped early, if it did."""


class DivergenceError(RuntimeError):
    """A loss, gradient or parameter became non-finite."""

    def __init__(self, update: int, stage: str, losses: Mapping[str, float]):
        self.update = update
        self.stage = stage
        self.losses = dict(losses)
        super().__init__(
            f"Non-finite {stage} step at generator update {update}; "
            f"last losses {self.losses}.",
        )


def compute_train_stats(
    kind: str,
    d_real: np.ndarray,
    d_fake: np.ndarray,
) -> Mapping[str, float]:
    """Summary statistics of discriminator outputs on a real and a fake batch.

    Sigmoid outputs are thresholded at 0.5. Critic scores are thresholded at
    the midpoint of the real and fake means.

    Args:
        kind: GAN kind.
        d_real: Outputs on real rows.
        d_fake: Outputs on generated rows.

    Returns:
        A mapping from statistic names to float values.
    """
    mean_real = float(np.mean(d_real))
    mean_fake = float(np.mean(d_fake))
    threshold = 0.5 if kind == "sgan" else (mean_real + mean_fake) / 2
    acc_real = float(np.mean(d_real > threshold))
    acc_fake = float(np.mean(d_fake <= threshold))
    return {
        "mean_real": mean_real,
        "mean_fake": mean_fake,
        # fraction of real rows scored as real
        "acc_real": acc_real,
        "acc_fake": acc_fake,
        "acc": (acc_real * len(d_real) + acc_fake * len(d_fake))
        / (len(d_real) + len(d_fake)),
    }


EvalCallback = Callable[[int, mlp.Network], Optional[Sequence[Any]]]


class AdversarialRegressionTrainer(abc.ABC):
    """Trains a conditional generator against a discriminator or critic.

    Subclasses choose the loss family; this class owns the networks, the
    optimizer state, the random streams and the alternating schedule.
    """

    kind: str
    """GAN kind trained by this class."""

    needs_real_for_gen: bool = False
    """Whether the generator loss compares against a real batch."""

    def __init__(
        self,
        *,
        config: TrainConfig,
        dataset: types.Dataset,
        checkpoint_dir: Optional[types.AnyPath] = None,
        custom_logger: Optional[advreg_logger.MeanLogger] = None,
        config_digest: Optional[str] = None,
        progress_bar: bool = True,
    ):
        """Builds AdversarialRegressionTrainer.

        Args:
            config: Training configuration; `config.gan.tag` must equal `kind`.
            dataset: Training pairs, split by `config.direction` into
                conditions and targets.
            checkpoint_dir: Where generator checkpoints are written. Defaults
                to ``checkpoints/`` in the logger's directory.
            custom_logger: Where to log to; if None (default), creates a new logger.
            config_digest: Digest stored in checkpoint headers; defaults to
                `config.digest`.
            progress_bar: Show a tqdm progress bar while training.

        Raises:
            ValueError: the config is for another kind, or the dataset does not
                fit the config.
        """
        if config.gan.tag != self.kind:
            raise ValueError(
                f"{type(self).__name__} trains {self.kind}, got {config.gan.tag}.",
            )
        if dataset.model.kind != config.model.kind:
            raise ValueError(
                f"Dataset drawn from {dataset.model.kind}, config expects "
                f"{config.model.kind}.",
            )
        self.config = config
        self.dataset = dataset
        self.conditions, self.targets = dataset.split(config.direction)
        assert config.batch_size is not None and config.lr is not None
        if config.batch_size > len(dataset):
            raise ValueError(
                f"batch_size {config.batch_size} exceeds dataset size {len(dataset)}.",
            )
        self._logger = custom_logger or advreg_logger.configure()
        self.checkpoint_dir = (
            util.parse_path(checkpoint_dir)
            if checkpoint_dir is not None
            else advreg_logger.log_dir(self._logger) / "checkpoints"
        )
        self.config_digest = config_digest or config.digest
        self.progress_bar = progress_bar

        seed = config.seed
        gen_spec = mlp.generator_spec(
            cond_dim=config.cond_dim,
            noise_dim=config.noise_dim,
            out_dim=config.target_dim,
            hidden=config.gen_hidden,
        )
        disc_spec = mlp.discriminator_spec(
            input_dim=config.cond_dim + config.target_dim,
            role=config.gan.critic_role,
            hidden=config.disc_hidden,
            leaky_slope=config.leaky_slope,
        )
        self.gen = mlp.build_network(gen_spec, util.make_rng(seed, "init_gen"))
        self.disc = mlp.build_network(disc_spec, util.make_rng(seed, "init_disc"))

        self._step_fn = optimizers.get_step_fn(config.optimizer)
        self.gen_opt = self._make_opt_state()
        self.disc_opt = self._make_opt_state()

        self._real_batches = base.minibatches(
            len(dataset),
            config.batch_size,
            util.make_rng(seed, "shuffle"),
        )
        self._fake_conditions = base.IndexStream(
            len(dataset),
            util.make_rng(seed, "pairing"),
        )
        self._latent_rng = util.make_rng(seed, "latent")
        self._penalty_rng = util.make_rng(seed, "penalty")

        self._gen_updates = 0
        self._disc_updates = 0
        self._last_losses: Dict[str, float] = {}

    def _make_opt_state(self) -> optimizers.OptimizerState:
        assert self.config.lr is not None
        return optimizers.OptimizerState(
            alpha=self.config.lr,
            beta1=self.config.beta1,
            beta2=self.config.beta2,
            epsilon=self.config.epsilon,
        )

    @property
    def logger(self) -> advreg_logger.MeanLogger:
        return self._logger

    @property
    def gen_updates(self) -> int:
        return self._gen_updates

    def disc_penalty(
        self,
        tape: autodiff.Tape,
        params: Mapping[str, Tensor],
        real_input: np.ndarray,
        fake_input: np.ndarray,
    ) -> Optional[Tensor]:
        """Extra discriminator loss term, if the loss family has one."""
        return None

    def after_disc_step(self) -> None:
        """Hook run after every discriminator parameter update."""

    def _next_real(self) -> Tuple[np.ndarray, np.ndarray]:
        idx = next(self._real_batches)
        return self.conditions[idx], self.targets[idx]

    def _fake_batch(self, m: int) -> Tuple[np.ndarray, np.ndarray]:
        """Conditions for `m` generated rows and standard-normal noise for them."""
        cond = self.conditions[self._fake_conditions.take(m)]
        noise = self._latent_rng.standard_normal((m, self.config.noise_dim))
        return cond, noise

    def _check_update(
        self,
        stage: str,
        loss: float,
        grads: Mapping[str, np.ndarray],
        new_params: Mapping[str, np.ndarray],
    ) -> None:
        finite = np.isfinite(loss) and all(
            np.all(np.isfinite(v)) for v in (*grads.values(), *new_params.values())
        )
        if not finite:
            raise DivergenceError(self._gen_updates, stage, self._last_losses)

    def train_disc(self) -> Mapping[str, float]:
        """Performs a single discriminator update on a fresh real and fake batch.

        Returns:
            Statistics for the discriminator (loss, penalty, accuracy).

        Raises:
            DivergenceError: the loss, its gradients or the new parameters are
                not finite. The discriminator is left unchanged.
        """
        real_cond, real_target = self._next_real()
        m = len(real_cond)
        fake_cond, noise = self._fake_batch(m)
        real_input = np.concatenate([real_cond, real_target], axis=1)
        try:
            fake_target = mlp.generate(self.gen, fake_cond, noise)
            fake_input = np.concatenate([fake_cond, fake_target], axis=1)

            tape = autodiff.Tape()
            params = self.disc.watch(tape, "disc/")
            d_real = self.disc.forward(real_input, params)
            d_fake = self.disc.forward(fake_input, params)
            loss = objectives.d_objective(self.kind, d_real, d_fake)
            penalty = self.disc_penalty(tape, params, real_input, fake_input)
            total = loss if penalty is None else loss + penalty
            grads = autodiff.backward(tape, total, names=[f"disc/{k}" for k in params])
        except autodiff.NonFiniteError as e:
            raise DivergenceError(self._gen_updates, "disc", self._last_losses) from e

        grads = {name[len("disc/") :]: g for name, g in grads.items()}
        new_params = self._step_fn(self.disc_opt, grads, self.disc.params)
        self._check_update("disc", total.item(), grads, new_params)
        self.disc = self.disc.with_params(new_params)
        self.after_disc_step()
        self._disc_updates += 1

        stats = dict(compute_train_stats(self.kind, d_real.data, d_fake.data))
        stats["loss"] = loss.item()
        if penalty is not None:
            stats["penalty"] = penalty.item()
        self._last_losses["disc"] = total.item()
        with self.logger.accumulate_means("disc"):
            for k, v in stats.items():
                self.logger.record(k, v)
        return stats

    def train_gen(self) -> Mapping[str, float]:
        """Performs a single generator update against the current discriminator.

        Returns:
            Statistics for the generator.

        Raises:
            DivergenceError: the loss, its gradients or the new parameters are
                not finite. The generator is left unchanged.
        """
        real_input = None
        if self.needs_real_for_gen:
            real_cond, real_target = self._next_real()
            real_input = np.concatenate([real_cond, real_target], axis=1)
            m = len(real_cond)
        else:
            m = self.config.batch_size  # type: ignore[assignment]
        fake_cond, noise = self._fake_batch(m)
        try:
            tape = autodiff.Tape()
            params = self.gen.watch(tape, "gen/")
            fake = mlp.generator_forward(self.gen, fake_cond, noise, params)
            d_fake = self.disc.forward(autodiff.concat_cols([Tensor(fake_cond), fake]))
            d_real = None if real_input is None else self.disc.forward(real_input)
            loss = objectives.g_objective(self.kind, d_fake, d_real)
            grads = autodiff.backward(tape, loss)
        except autodiff.NonFiniteError as e:
            raise DivergenceError(self._gen_updates, "gen", self._last_losses) from e

        grads = {name[len("gen/") :]: g for name, g in grads.items()}
        new_params = self._step_fn(self.gen_opt, grads, self.gen.params)
        self._check_update("gen", loss.item(), grads, new_params)
        self.gen = self.gen.with_params(new_params)

        stats = {"loss": loss.item(), "mean_fake": float(np.mean(d_fake.data))}
        self._last_losses["gen"] = stats["loss"]
        with self.logger.accumulate_means("gen"):
            for k, v in stats.items():
                self.logger.record(k, v)
        return stats

    def save_generator(self, run: TrainRun) -> pathlib.Path:
        update = self._gen_updates
        path = self.checkpoint_dir / f"gen_{update:07d}.ckpt"
        serialize.save_checkpoint(
            path,
            self.gen,
            update=update,
            seed=self.config.seed,
            config_digest=self.config_digest,
            extra={"gan": self.kind, "direction": self.config.direction},
        )
        run.checkpoints[update] = path
        return path

    def _after_gen_update(
        self,
        run: TrainRun,
        callback: Optional[EvalCallback],
    ) -> None:
        """Dumps logs, evaluates and checkpoints on their generator-update grids."""
        cfg = self.config
        update = self._gen_updates
        if update % cfg.eval_every == 0:
            self.logger.record("update", update)
            self.logger.record("disc_updates", self._disc_updates)
            self.logger.dump(update)
            if callback is not None:
                run.metric_log.extend(callback(update, self.gen) or ())
        if update % cfg.checkpoint_every == 0:
            self.save_generator(run)

    def train(
        self,
        total_updates: Optional[int] = None,
        callback: Optional[EvalCallback] = None,
    ) -> TrainRun:
        """Alternates `d_steps` discriminator updates with `g_steps` generator updates.

        After every `eval_every` generator updates `callback(update, generator)`
        is called and its return values are appended to the run's metric log;
        after every `checkpoint_every` the generator is saved. The final
        generator is always saved.

        Each generator step counts as one update, so a round of `g_steps`
        steps is cut short when it would pass the requested total.

        A non-finite loss stops training with status ``diverged``; the last
        finite generator is saved and the diagnostic is kept on the run.

        Args:
            total_updates: Generator updates to perform; defaults to
                `config.total_updates`.
            callback: Evaluation hook.

        Returns:
            The run summary.
        """
        cfg = self.config
        total = cfg.total_updates if total_updates is None else total_updates
        target = self._gen_updates + total
        run = TrainRun(config_digest=self.config_digest)
        start = time.perf_counter()
        try:
            hide = not self.progress_bar
            with tqdm.tqdm(total=total, desc="update", disable=hide) as progress:
                while self._gen_updates < target:
                    for _ in range(cfg.d_steps):  # type: ignore[arg-type]
                        self.train_disc()
                    for _ in range(min(cfg.g_steps, target - self._gen_updates)):
                        self.train_gen()
                        self._gen_updates += 1
                        progress.update(1)
                        self._after_gen_update(run, callback)
            run.status = "completed"
        except DivergenceError as e:
            logger.warning("Training diverged: %s", e)
            run.status = "diverged"
            run.diagnostic = {"update": e.update, "stage": e.stage, "losses": e.losses}
        if self._gen_updates not in run.checkpoints and self._gen_updates > 0:
            self.save_generator(run)

        run.updates = self._gen_updates
        run.disc_updates = self._disc_updates
        run.wall_seconds = time.perf_counter() - start
        logger.info(
            "Finished %s after %d generator updates (%s) in %.1fs",
            self.kind,
            run.updates,
            run.status,
            run.wall_seconds,
        )
        return run
