"""Dense generator and discriminator/critic networks on the autodiff tape."""

import dataclasses
from typing import Any, Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from advreg.numkit import autodiff, functional
from advreg.numkit.autodiff import Tensor, TensorLike

ROLES = ("generator", "discriminator", "critic")
GENERATOR_HIDDEN = (256, 128, 64)
DISCRIMINATOR_HIDDEN = (256, 256, 256)
LEAKY_SLOPE = 0.2
INIT_SCHEME = "uniform_glorot"

Layer = Tuple[int, str]
Seed = Union[int, np.random.Generator]


@dataclasses.dataclass(frozen=True)
class NetSpec:
    """Architecture of a dense network: input width and (width, activation) layers."""

    input_dim: int
    layers: Tuple[Layer, ...]
    role: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"Unknown role '{self.role}', expected one of {ROLES}.")
        if self.input_dim < 1:
            raise ValueError(f"input_dim must be positive, got {self.input_dim}.")
        if not self.layers:
            raise ValueError("Network spec has an empty layer list.")
        layers = tuple((int(w), str(tag)) for w, tag in self.layers)
        for width, tag in layers:
            if width < 1:
                raise ValueError(f"Layer widths must be positive, got {width}.")
            functional.parse_activation(tag)
        object.__setattr__(self, "layers", layers)

    @property
    def output_dim(self) -> int:
        return self.layers[-1][0]

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def layer_shapes(self) -> Iterator[Tuple[int, int]]:
        n_in = self.input_dim
        for width, _ in self.layers:
            yield n_in, width
            n_in = width

    def param_shapes(self) -> Dict[str, Tuple[int, ...]]:
        shapes: Dict[str, Tuple[int, ...]] = {}
        for i, (n_in, n_out) in enumerate(self.layer_shapes()):
            shapes[f"W{i}"] = (n_in, n_out)
            shapes[f"b{i}"] = (n_out,)
        return shapes

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            input_dim=self.input_dim,
            layers=[[w, tag] for w, tag in self.layers],
            role=self.role,
        )

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "NetSpec":
        return cls(
            input_dim=int(d["input_dim"]),
            layers=tuple((int(w), str(tag)) for w, tag in d["layers"]),
            role=str(d["role"]),
        )


def generator_spec(
    cond_dim: int,
    noise_dim: int = 10,
    out_dim: int = 1,
    hidden: Sequence[int] = GENERATOR_HIDDEN,
) -> NetSpec:
    """Relu hidden layers and an identity output over [condition, noise] inputs."""
    layers = [(w, "relu") for w in hidden] + [(out_dim, "identity")]
    return NetSpec(
        input_dim=cond_dim + noise_dim,
        layers=tuple(layers),
        role="generator",
    )


def discriminator_spec(
    input_dim: int,
    role: str = "discriminator",
    hidden: Sequence[int] = DISCRIMINATOR_HIDDEN,
    leaky_slope: float = LEAKY_SLOPE,
) -> NetSpec:
    """Leaky-relu hidden layers; sigmoid output (discriminator) or linear (critic).

    Args:
        input_dim: Width of a (condition, target) pair.
        role: `discriminator` or `critic`.
        hidden: Hidden layer widths.
        leaky_slope: Negative-side slope of the hidden activations.

    Returns:
        The network spec.

    Raises:
        ValueError: `role` is `generator`.
    """
    if role == "generator":
        raise ValueError("Use `generator_spec` for generators.")
    hidden_tag = functional.activation_tag("leaky_relu", leaky_slope)
    out_tag = "sigmoid" if role == "discriminator" else "identity"
    layers = [(w, hidden_tag) for w in hidden] + [(1, out_tag)]
    return NetSpec(input_dim=input_dim, layers=tuple(layers), role=role)


class Network:
    """A `NetSpec` together with its weights ``W{l}`` and biases ``b{l}``."""

    spec: NetSpec
    params: Dict[str, np.ndarray]

    def __init__(self, spec: NetSpec, params: Mapping[str, np.ndarray]):
        expected = spec.param_shapes()
        if set(params) != set(expected):
            raise ValueError(
                f"Parameters {sorted(params)} do not match spec {sorted(expected)}.",
            )
        for name, shape in expected.items():
            if np.shape(params[name]) != shape:
                raise ValueError(
                    f"Parameter '{name}' has shape {np.shape(params[name])}, "
                    f"spec requires {shape}.",
                )
        self.spec = spec
        self.params = {
            name: np.array(params[name], dtype=np.float64) for name in expected
        }

    @property
    def role(self) -> str:
        return self.spec.role

    def with_params(self, params: Mapping[str, np.ndarray]) -> "Network":
        return Network(self.spec, params)

    def watch(self, tape: autodiff.Tape, prefix: str = "") -> Dict[str, Tensor]:
        """Registers every parameter as a root named ``prefix + name``."""
        return {
            name: tape.watch(value, f"{prefix}{name}")
            for name, value in self.params.items()
        }

    def forward(
        self,
        x: TensorLike,
        params: Optional[Mapping[str, Tensor]] = None,
    ) -> Tensor:
        """Runs the network on a [batch, input_dim] input.

        Args:
            x: Input rows.
            params: Tracked parameters from `watch`. If omitted, the stored
                parameters are used as constants.

        Returns:
            Output of shape [batch, output_dim].

        Raises:
            DimensionError: `x` does not have `input_dim` columns.
        """
        a = x if isinstance(x, Tensor) else Tensor(x)
        if a.ndim != 2 or a.shape[1] != self.spec.input_dim:
            raise autodiff.DimensionError(
                f"Expected input of shape [batch, {self.spec.input_dim}], "
                f"got {a.shape}.",
            )
        for i, (_, tag) in enumerate(self.spec.layers):
            if params is None:
                W, b = Tensor(self.params[f"W{i}"]), Tensor(self.params[f"b{i}"])
            else:
                W, b = params[f"W{i}"], params[f"b{i}"]
            a = functional.activation(functional.affine_forward(a, W, b), tag)
        return a

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x).data

    def max_abs_param(self) -> float:
        return max(float(np.max(np.abs(p))) for p in self.params.values())


def build_network(spec: NetSpec, seed: Seed) -> Network:
    """Builds a network with uniform(+-sqrt(6 / (n_in + n_out))) weights, zero biases.

    Args:
        spec: Architecture.
        seed: Integer seed or generator for the weight draws.

    Returns:
        The initialized network.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    params: Dict[str, np.ndarray] = {}
    for i, (n_in, n_out) in enumerate(spec.layer_shapes()):
        bound = np.sqrt(6.0 / (n_in + n_out))
        params[f"W{i}"] = rng.uniform(-bound, bound, size=(n_in, n_out))
        params[f"b{i}"] = np.zeros(n_out)
    return Network(spec, params)


def _as_rows(name: str, values: TensorLike) -> Tensor:
    t = values if isinstance(values, Tensor) else Tensor(values)
    if t.ndim == 1:
        t = autodiff.reshape(t, (t.shape[0], 1))
    if t.ndim != 2:
        raise autodiff.DimensionError(f"{name} must be [m, k], got shape {t.shape}.")
    return t


def generator_forward(
    net: Network,
    conditions: TensorLike,
    noise: TensorLike,
    params: Optional[Mapping[str, Tensor]] = None,
) -> Tensor:
    """Forward pass of a generator on concatenated [condition, noise] rows."""
    if net.role != "generator":
        raise ValueError(f"Expected a generator, got role '{net.role}'.")
    c = _as_rows("conditions", conditions)
    z = _as_rows("noise", noise)
    if c.shape[0] != z.shape[0]:
        raise autodiff.DimensionError(
            f"{c.shape[0]} conditions but {z.shape[0]} noise rows.",
        )
    if c.shape[1] + z.shape[1] != net.spec.input_dim:
        raise autodiff.DimensionError(
            f"Condition width {c.shape[1]} + noise width {z.shape[1]} != "
            f"generator input_dim {net.spec.input_dim}.",
        )
    return net.forward(autodiff.concat_cols([c, z]), params)


def generate(net: Network, conditions: np.ndarray, noise: np.ndarray) -> np.ndarray:
    """Samples [m, out_dim] generator outputs for the given conditions and noise."""
    return generator_forward(net, conditions, noise).data
