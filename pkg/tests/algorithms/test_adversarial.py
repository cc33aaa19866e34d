"""Tests for `advreg.algorithms.adversarial.*` trainers and objectives."""

import numpy as np
import pytest

from advreg.algorithms.adversarial import common, objectives, training
from advreg.data import models
from advreg.networks import mlp, serialize
from advreg.numkit import autodiff, optimizers
from advreg.numkit.autodiff import Tensor
from advreg.testing import gradcheck

LN2 = np.log(2.0)


def _scores(value, m=4):
    return Tensor(np.full((m, 1), value))


def test_sgan_objectives_at_equilibrium():
    d = objectives.d_objective("sgan", _scores(0.5), _scores(0.5))
    assert d.item() == pytest.approx(2 * LN2, abs=1e-12)
    assert objectives.g_objective("sgan", _scores(0.5)).item() == pytest.approx(LN2)
    assert objectives.g_objective("sgan", _scores(1.0 - 1e-9)).item() < 1e-8


def test_wasserstein_objectives():
    real, fake = Tensor([[1.0], [3.0]]), Tensor([[0.0], [1.0]])
    for kind in ("wgan_clip", "wgan_gp"):
        assert objectives.d_objective(kind, real, fake).item() == pytest.approx(-1.5)
        assert objectives.d_objective(kind, real, real).item() == 0.0
        assert objectives.g_objective(kind, fake).item() == pytest.approx(-0.5)


@pytest.mark.parametrize("kind", ["rsgan", "rasgan"])
def test_relativistic_objectives_at_equal_scores(kind):
    c = _scores(0.3)
    expected = LN2 if kind == "rsgan" else 2 * LN2
    assert objectives.d_objective(kind, c, c).item() == pytest.approx(expected)
    assert objectives.g_objective(kind, c, c).item() == pytest.approx(expected)


def test_rasgan_matches_formula(rng):
    real, fake = rng.normal(size=(5, 1)), rng.normal(size=(5, 1))

    def sig(z):
        return 1.0 / (1.0 + np.exp(-z))

    expected = -np.mean(np.log(sig(real - fake.mean()))) - np.mean(
        np.log(1.0 - sig(fake - real.mean())),
    )
    got = objectives.d_objective("rasgan", Tensor(real), Tensor(fake)).item()
    assert got == pytest.approx(expected, rel=1e-12)


def test_relativistic_objectives_need_real_scores():
    with pytest.raises(ValueError, match="real batch"):
        objectives.g_objective("rsgan", _scores(0.0))
    with pytest.raises(autodiff.DimensionError, match="pairs"):
        objectives.d_objective("rsgan", _scores(0.0, 3), _scores(0.0, 4))


def test_unknown_kind():
    with pytest.raises(ValueError, match="Unknown GAN kind"):
        objectives.d_objective("lsgan", _scores(0.5), _scores(0.5))


def _linear_critic(dim: int, weight: float = 1.0) -> mlp.Network:
    spec = mlp.NetSpec(dim, ((1, "identity"),), "critic")
    return mlp.Network(spec, {"W0": np.full((dim, 1), weight), "b0": np.zeros(1)})


@pytest.mark.parametrize("dim,expected", [(1, 0.0), (4, 0.1)])
def test_gradient_penalty_of_sum_critic(dim, expected, rng):
    critic = _linear_critic(dim)
    real, fake = rng.normal(size=(8, dim)), rng.normal(size=(8, dim))
    tape = autodiff.Tape()
    penalty = objectives.gradient_penalty(tape, critic, None, real, fake, 0.1, rng)
    assert penalty.item() == pytest.approx(expected, abs=1e-12)


def test_gradient_penalty_of_constant_critic(rng):
    spec = mlp.discriminator_spec(input_dim=2, role="critic", hidden=(4,))
    params = {k: np.zeros(s) for k, s in spec.param_shapes().items()}
    critic = mlp.Network(spec, params)
    real, fake = rng.normal(size=(8, 2)), rng.normal(size=(8, 2))
    tape = autodiff.Tape()
    watched = critic.watch(tape)
    penalty = objectives.gradient_penalty(tape, critic, watched, real, fake, 0.1, rng)
    assert penalty.item() == pytest.approx(0.1)


def test_gradient_penalty_parameter_gradient(rng):
    spec = mlp.discriminator_spec(input_dim=3, role="critic", hidden=(6, 4))
    critic = mlp.build_network(spec, rng)
    real, fake = rng.normal(size=(5, 3)), rng.normal(size=(5, 3))

    def loss_fn(tape, params):
        # Fresh generator per call, so every evaluation sees the same interpolates.
        eps_rng = np.random.default_rng(1)
        return objectives.gradient_penalty(
            tape,
            critic,
            params,
            real,
            fake,
            0.1,
            eps_rng,
        )

    errors = gradcheck.gradient_errors(loss_fn, critic.params)
    assert max(errors.values()) < 1e-5, errors


def test_gradient_penalty_errors(rng):
    critic = _linear_critic(2)
    tape = autodiff.Tape()
    with pytest.raises(ValueError, match="lambda_gp"):
        objectives.gradient_penalty(
            tape,
            critic,
            None,
            np.zeros((2, 2)),
            np.zeros((2, 2)),
            -1.0,
            rng,
        )
    with pytest.raises(autodiff.DimensionError):
        objectives.gradient_penalty(
            tape,
            critic,
            None,
            np.zeros((2, 2)),
            np.zeros((3, 2)),
            0.1,
            rng,
        )


def test_clip_weights(rng):
    spec = mlp.discriminator_spec(input_dim=2, role="critic", hidden=(4,))
    net = mlp.build_network(spec, rng)
    clipped = objectives.clip_weights(net, 0.01)
    assert clipped.max_abs_param() <= 0.01
    small = objectives.clip_weights(clipped, 0.5)
    for k, v in clipped.params.items():
        np.testing.assert_array_equal(small.params[k], v)
    with pytest.raises(ValueError):
        objectives.clip_weights(net, 0.0)


def test_sgan_discriminator_learns_density_ratio():
    """On a 10-bin toy problem D(x) approaches p_r(x) / (p_r(x) + p_g(x))."""
    bins = np.arange(1, 11)
    one_hot = np.eye(10)
    real = np.repeat(one_hot, 20 * bins, axis=0)
    fake = np.repeat(one_hot, 20 * (11 - bins), axis=0)
    optimal = bins / 11.0

    spec = mlp.discriminator_spec(input_dim=10, hidden=(16,))
    disc = mlp.build_network(spec, 0)
    state = optimizers.OptimizerState(alpha=1e-2, beta1=0.5, beta2=0.9)
    for step in range(1500):
        if step == 1000:
            state.alpha = 1e-3
        tape = autodiff.Tape()
        params = disc.watch(tape)
        loss = objectives.d_objective(
            "sgan",
            disc.forward(real, params),
            disc.forward(fake, params),
        )
        grads = autodiff.backward(tape, loss)
        disc = disc.with_params(optimizers.adam_step(state, grads, disc.params))

    np.testing.assert_allclose(disc(one_hot)[:, 0], optimal, atol=0.05)


def test_sgan_discriminator_loss_reaches_two_ln_two():
    """When real and generated laws coincide the best loss is 2 ln 2 at D = 1/2."""
    one_hot = np.eye(10)
    batch = np.repeat(one_hot, 20 * np.arange(1, 11), axis=0)

    spec = mlp.discriminator_spec(input_dim=10, hidden=(16,))
    disc = mlp.build_network(spec, 0)
    state = optimizers.OptimizerState(alpha=1e-2, beta1=0.5, beta2=0.9)
    losses = []
    for _ in range(500):
        tape = autodiff.Tape()
        params = disc.watch(tape)
        loss = objectives.d_objective(
            "sgan",
            disc.forward(batch, params),
            disc.forward(batch, params),
        )
        losses.append(loss.item())
        grads = autodiff.backward(tape, loss)
        disc = disc.with_params(optimizers.adam_step(state, grads, disc.params))

    assert min(losses) >= 2 * LN2 - 1e-9
    assert losses[-1] == pytest.approx(2 * LN2, abs=1e-3)
    np.testing.assert_allclose(disc(one_hot)[:, 0], 0.5, atol=0.02)


@pytest.mark.parametrize("kind", objectives.GAN_KINDS)
def test_train_smoke(kind, make_config, small_dataset, custom_logger, tmp_path):
    config = make_config(kind)
    updates = []

    def callback(update, generator):
        updates.append(update)
        return [update]

    run = training.train(
        config,
        small_dataset,
        checkpoint_dir=tmp_path / "checkpoints",
        callback=callback,
        custom_logger=custom_logger,
        progress_bar=False,
    )
    assert run.status == "completed"
    assert run.updates == 6
    assert run.disc_updates == 6 * config.d_steps
    assert updates == [2, 4, 6]
    assert run.metric_log == [2, 4, 6]
    assert sorted(run.checkpoints) == [4, 6]
    for update, path in run.checkpoints.items():
        checkpoint = serialize.load_checkpoint(path)
        assert checkpoint.header.update == update
        assert checkpoint.header.config_digest == config.digest
        assert all(np.all(np.isfinite(v)) for v in checkpoint.network.params.values())


def test_d_steps_honored(make_config, small_dataset, custom_logger):
    config = make_config("sgan", d_steps=3, total_updates=2)
    trainer = training.make_trainer(
        config,
        small_dataset,
        custom_logger=custom_logger,
        progress_bar=False,
    )
    run = trainer.train()
    assert run.disc_updates == 6
    assert trainer.gen_updates == 2


def test_per_kind_defaults():
    model = models.get_model("model1")
    config = common.TrainConfig(gan=common.GanKind("rsgan"), model=model)
    assert (config.batch_size, config.lr, config.d_steps) == (500, 1e-5, 1)
    config = common.TrainConfig(gan=common.GanKind("sgan"), model=model)
    assert (config.batch_size, config.lr, config.d_steps) == (2000, 1e-4, 5)


def test_wgan_clip_keeps_critic_clipped(make_config, small_dataset, custom_logger):
    config = make_config("wgan_clip", total_updates=3)
    trainer = training.make_trainer(
        config,
        small_dataset,
        custom_logger=custom_logger,
        progress_bar=False,
    )
    trainer.train()
    assert trainer.disc.max_abs_param() <= config.gan.clip_c


def test_training_is_deterministic(
    make_config,
    small_dataset,
    custom_logger,
    tmp_path,
):
    config = make_config("wgan_gp", total_updates=4)
    trainers = []
    for i in range(2):
        trainer = training.make_trainer(
            config,
            small_dataset,
            checkpoint_dir=tmp_path / str(i),
            custom_logger=custom_logger,
            progress_bar=False,
        )
        trainer.train()
        trainers.append(trainer)
    for k, v in trainers[0].gen.params.items():
        np.testing.assert_array_equal(trainers[1].gen.params[k], v)


def test_divergence_stops_training(
    make_config,
    small_dataset,
    custom_logger,
    tmp_path,
    monkeypatch,
):
    calls = []
    g_objective = objectives.g_objective

    def failing_g_objective(*args, **kwargs):
        calls.append(None)
        if len(calls) == 3:
            raise autodiff.NonFiniteError("'log' produced non-finite values.")
        return g_objective(*args, **kwargs)

    monkeypatch.setattr(objectives, "g_objective", failing_g_objective)
    run = training.train(
        make_config("sgan"),
        small_dataset,
        checkpoint_dir=tmp_path,
        custom_logger=custom_logger,
        progress_bar=False,
    )
    assert run.status == "diverged"
    assert run.updates == 2
    assert run.diagnostic["stage"] == "gen"
    assert run.diagnostic["update"] == 2
    assert sorted(run.checkpoints) == [2]


@pytest.mark.parametrize(
    "kwargs,match",
    [
        (dict(batch_size=500), "exceeds"),
        (dict(eval_every=3), "divide"),
        (dict(direction="sideways"), "direction"),
        (dict(optimizer="adagrad"), "optimizer"),
        (dict(conditions=()), "condition"),
        (dict(noise_dim=0), "noise_dim"),
    ],
)
def test_invalid_configs(make_config, kwargs, match):
    with pytest.raises(ValueError, match=match):
        make_config("sgan", **kwargs)


def test_inverse_direction_only_for_one_input_models(make_config):
    with pytest.raises(ValueError, match="forward"):
        make_config("sgan", model=models.get_model("highdim5"), direction="inverse")


def test_trainer_rejects_other_model(make_config, custom_logger):
    dataset = models.sample_dataset(models.get_model("model3"), 200, seed=0)
    with pytest.raises(ValueError, match="model3"):
        training.make_trainer(
            make_config("sgan"),
            dataset,
            custom_logger=custom_logger,
        )


def test_compute_train_stats():
    d_real, d_fake = np.array([0.9, 0.4]), np.array([0.2, 0.6])
    stats = common.compute_train_stats("sgan", d_real, d_fake)
    assert stats["acc_real"] == 0.5
    assert stats["acc_fake"] == 0.5
    assert stats["mean_real"] == pytest.approx(0.65)


def test_every_generator_step_counts(make_config, small_dataset, custom_logger):
    config = make_config("sgan", d_steps=1, g_steps=2, total_updates=5)
    trainer = training.make_trainer(
        config,
        small_dataset,
        custom_logger=custom_logger,
        progress_bar=False,
    )
    run = trainer.train(callback=lambda update, generator: [update])
    assert trainer.gen_updates == 5
    assert run.updates == 5
    # Rounds of 2, 2 and 1 generator steps, one critic step before each.
    assert run.disc_updates == 3
    assert run.metric_log == [2, 4]
    assert sorted(run.checkpoints) == [4, 5]
