"""Fixtures common across algorithm tests."""

from typing import Callable

import pytest

from advreg.algorithms.adversarial import common
from advreg.data import models, types

ConfigFactory = Callable[..., common.TrainConfig]


@pytest.fixture
def make_config() -> ConfigFactory:
    """Builds seconds-scale training configurations on model1."""

    def make(gan: str, **kwargs) -> common.TrainConfig:
        values = dict(
            gan=common.GanKind(gan),
            model=models.get_model("model1"),
            n_data=200,
            noise_dim=2,
            batch_size=50,
            total_updates=6,
            eval_every=2,
            checkpoint_every=4,
            conditions=(0.4, 0.7),
            gen_hidden=(8, 8),
            disc_hidden=(8, 8),
        )
        values.update(kwargs)
        return common.TrainConfig(**values)

    return make


@pytest.fixture
def small_dataset() -> types.Dataset:
    return models.sample_dataset(models.get_model("model1"), 200, seed=0)
