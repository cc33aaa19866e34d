"""Fixtures for evaluation tests."""

from typing import Callable

import numpy as np
import pytest

from advreg.networks import mlp


@pytest.fixture
def constant_generator() -> Callable[..., mlp.Network]:
    """Generators whose output ignores condition and noise."""

    def make(value: float, cond_dim: int = 1, hidden=(4,)) -> mlp.Network:
        spec = mlp.generator_spec(cond_dim, noise_dim=2, hidden=hidden)
        params = {k: np.zeros(s) for k, s in spec.param_shapes().items()}
        params[f"b{spec.n_layers - 1}"] = np.array([value])
        return mlp.Network(spec, params)

    return make
