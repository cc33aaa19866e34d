"""Momentum, RMSprop and Adam steps on named float64 parameter arrays.

Each step reads gradients and current parameters, updates the moving averages
held in an `OptimizerState` in place, and returns new parameter arrays.
"""

import dataclasses
from typing import Callable, Dict, Mapping

import numpy as np

Params = Mapping[str, np.ndarray]


@dataclasses.dataclass
class OptimizerState:
    """Moving averages and hyperparameters shared by the three update rules."""

    alpha: float
    """Learning rate."""

    beta1: float = 0.0
    beta2: float = 0.9
    epsilon: float = 1e-8
    t: int = 0
    """Number of steps taken so far."""

    V: Dict[str, np.ndarray] = dataclasses.field(default_factory=dict)
    """First-moment averages, one per parameter."""

    S: Dict[str, np.ndarray] = dataclasses.field(default_factory=dict)
    """Second-moment averages, one per parameter."""

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"Learning rate must be positive, got {self.alpha}.")
        for name in ("beta1", "beta2"):
            beta = getattr(self, name)
            if not 0 <= beta < 1:
                raise ValueError(f"{name} must be in [0, 1), got {beta}.")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}.")

    def _moment(self, table: Dict[str, np.ndarray], name: str, like: np.ndarray):
        if name not in table:
            table[name] = np.zeros_like(like)
        elif table[name].shape != like.shape:
            raise ValueError(
                f"Parameter '{name}' changed shape from {table[name].shape} "
                f"to {like.shape}.",
            )
        return table[name]

    def as_dict(self) -> Dict[str, float]:
        return dict(
            alpha=self.alpha,
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
            t=self.t,
        )


def _check_keys(grads: Params, params: Params) -> None:
    if set(grads) != set(params):
        raise KeyError(
            f"Gradient keys {sorted(grads)} do not match parameters {sorted(params)}.",
        )


def sgd_momentum_step(
    state: OptimizerState,
    grads: Params,
    params: Params,
) -> Dict[str, np.ndarray]:
    """V <- beta1 V + (1 - beta1) g;  theta <- theta - alpha V."""
    _check_keys(grads, params)
    state.t += 1
    beta = state.beta1
    updated = {}
    for name, theta in params.items():
        g = grads[name]
        v = beta * state._moment(state.V, name, theta) + (1.0 - beta) * g
        state.V[name] = v
        updated[name] = theta - state.alpha * v
    return updated


def rmsprop_step(
    state: OptimizerState,
    grads: Params,
    params: Params,
) -> Dict[str, np.ndarray]:
    """S <- beta2 S + (1 - beta2) g^2;  theta <- theta - alpha g / (sqrt(S) + eps)."""
    _check_keys(grads, params)
    state.t += 1
    beta = state.beta2
    updated = {}
    for name, theta in params.items():
        g = grads[name]
        s = beta * state._moment(state.S, name, theta) + (1.0 - beta) * g * g
        state.S[name] = s
        updated[name] = theta - state.alpha * g / (np.sqrt(s) + state.epsilon)
    return updated


def adam_step(
    state: OptimizerState,
    grads: Params,
    params: Params,
) -> Dict[str, np.ndarray]:
    """Momentum and RMSprop averages with bias correction by the step count.

    `t` is incremented before the correction factors are computed.
    """
    _check_keys(grads, params)
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1**state.t
    correction2 = 1.0 - b2**state.t
    updated = {}
    for name, theta in params.items():
        g = grads[name]
        v = b1 * state._moment(state.V, name, theta) + (1.0 - b1) * g
        s = b2 * state._moment(state.S, name, theta) + (1.0 - b2) * g * g
        state.V[name], state.S[name] = v, s
        v_corr = v / correction1
        s_corr = s / correction2
        updated[name] = theta - state.alpha * v_corr / (np.sqrt(s_corr) + state.epsilon)
    return updated


StepFn = Callable[[OptimizerState, Params, Params], Dict[str, np.ndarray]]

OPTIMIZERS: Mapping[str, StepFn] = {
    "adam": adam_step,
    "momentum": sgd_momentum_step,
    "rmsprop": rmsprop_step,
}


def get_step_fn(name: str) -> StepFn:
    try:
        return OPTIMIZERS[name]
    except KeyError:
        raise ValueError(
            f"Unknown optimizer '{name}', expected one of {sorted(OPTIMIZERS)}.",
        ) from None
