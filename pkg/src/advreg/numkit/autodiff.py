"""Tape-based reverse-mode differentiation over float64 numpy arrays.

Every vector-Jacobian product is written in terms of recorded ops. A gradient
computed with ``create_graph=True`` is therefore itself a set of tape nodes and
can be differentiated a second time, which the gradient penalty relies on.

A `Tensor` knows the tape (if any) it was recorded on. Ops find the tape from
their operands, so there is no global state: distinct tapes may be used from
different threads.
"""

import contextlib
import dataclasses
from typing import (
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import numpy as np
from scipy import special


class DimensionError(ValueError):
    """Operand shapes do not conform."""


class ContractError(ValueError):
    """A differentiation call violated its preconditions."""


class CapabilityError(NotImplementedError):
    """An op on the differentiation path only supports first-order gradients."""


class NonFiniteError(FloatingPointError):
    """An op produced NaN or Inf."""


class ConfigurationError(ValueError):
    """Unknown op configuration, e.g. an unrecognized activation kind."""


ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]
TensorLike = Union["Tensor", ArrayLike]
VJP = Callable[["Tensor", "Tensor"], Sequence[Optional["Tensor"]]]

_SIGMOID_LO = float(np.finfo(np.float64).tiny)
_SIGMOID_HI = 1.0 - float(np.finfo(np.float64).epsneg)


def _as_array(value: ArrayLike) -> np.ndarray:
    return np.asarray(value, dtype=np.float64)


def _check_finite(op: str, value: np.ndarray) -> None:
    if not np.all(np.isfinite(value)):
        raise NonFiniteError(f"'{op}' produced non-finite values.")


@dataclasses.dataclass(frozen=True)
class Node:
    """One recorded op: its inputs, its output value and how to pull back."""

    op: str
    inputs: Tuple[Optional[int], ...]
    """Tape indices of the operands; None for untracked constants."""

    value: np.ndarray
    vjp: Optional[VJP]
    """Maps (output cotangent, output) to one cotangent per operand."""

    higher_order: bool = True
    """False if `vjp` leaves the tape, so its result cannot be differentiated."""


class Tape:
    """Append-only record of ops in creation order.

    Node inputs always reference earlier nodes, so creation order is a
    topological order and reverse creation order is a valid backward order.
    """

    nodes: List[Node]
    roots: Dict[str, int]

    def __init__(self) -> None:
        self.nodes = []
        self.roots = {}
        self._recording = True

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def recording(self) -> bool:
        return self._recording

    @contextlib.contextmanager
    def paused(self) -> Iterator[None]:
        """Ops inside this context produce untracked constants."""
        previous = self._recording
        self._recording = False
        try:
            yield
        finally:
            self._recording = previous

    def watch(self, value: ArrayLike, name: Optional[str] = None) -> "Tensor":
        """Records `value` as a root that gradients are reported against.

        Args:
            value: Initial value of the root.
            name: Key for this root in `self.roots` and in `backward` results.
                Defaults to `input{k}`.

        Returns:
            The tracked tensor.

        Raises:
            ValueError: `name` is already watched on this tape.
        """
        data = _as_array(value)
        _check_finite("watch", data)
        if name is None:
            name = f"input{len(self.roots)}"
        if name in self.roots:
            raise ValueError(f"Root '{name}' is already watched on this tape.")
        index = self._append(Node("leaf", (), data, None))
        self.roots[name] = index
        return Tensor(data, self, index)

    def _append(self, node: Node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1


class Tensor:
    """A float64 array, optionally tracked by a tape."""

    __slots__ = ("data", "tape", "node")
    # Makes numpy defer to our reflected operators, e.g. `np.float64(2) * t`.
    __array_ufunc__ = None

    def __init__(
        self,
        data: ArrayLike,
        tape: Optional[Tape] = None,
        node: Optional[int] = None,
    ):
        self.data = _as_array(data)
        self.tape = tape
        self.node = node

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def tracked(self) -> bool:
        return self.node is not None

    @property
    def T(self) -> "Tensor":  # noqa: N802
        return transpose(self)

    def item(self) -> float:
        if self.size != 1:
            raise ValueError(f"item() needs a single value, got shape {self.shape}.")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        return sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        return mean(self, axis=axis, keepdims=keepdims)

    def __add__(self, other: TensorLike) -> "Tensor":
        return add(self, other)

    def __radd__(self, other: TensorLike) -> "Tensor":
        return add(other, self)

    def __sub__(self, other: TensorLike) -> "Tensor":
        return sub(self, other)

    def __rsub__(self, other: TensorLike) -> "Tensor":
        return sub(other, self)

    def __mul__(self, other: TensorLike) -> "Tensor":
        return mul(self, other)

    def __rmul__(self, other: TensorLike) -> "Tensor":
        return mul(other, self)

    def __truediv__(self, other: TensorLike) -> "Tensor":
        return div(self, other)

    def __rtruediv__(self, other: TensorLike) -> "Tensor":
        return div(other, self)

    def __neg__(self) -> "Tensor":
        return neg(self)

    def __matmul__(self, other: TensorLike) -> "Tensor":
        return matmul(self, other)

    def __repr__(self) -> str:
        where = f", node={self.node}" if self.tracked else ""
        return f"Tensor(shape={self.shape}{where})"


def _lift(value: TensorLike) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _active_tape(operands: Iterable[Tensor]) -> Optional[Tape]:
    tape = None
    for t in operands:
        if t.tape is None or not t.tape.recording:
            continue
        if tape is None:
            tape = t.tape
        elif t.tape is not tape:
            raise ValueError("Operands are recorded on different tapes.")
    return tape


def _record(
    op: str,
    operands: Sequence[Tensor],
    value: np.ndarray,
    vjp: VJP,
    higher_order: bool = True,
) -> Tensor:
    _check_finite(op, value)
    tape = _active_tape(operands)
    if tape is None:
        return Tensor(value)
    inputs = tuple(t.node if t.tape is tape else None for t in operands)
    if all(i is None for i in inputs):
        return Tensor(value)
    index = tape._append(Node(op, inputs, value, vjp, higher_order))
    return Tensor(value, tape, index)


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as e:
        raise DimensionError(
            f"'{op}' cannot broadcast shapes {a.shape} and {b.shape}.",
        ) from e


def _sum_to_array(x: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    lead = x.ndim - len(shape)
    axes = tuple(range(lead)) + tuple(
        lead + i for i, s in enumerate(shape) if s == 1 and x.shape[lead + i] != 1
    )
    return np.sum(x, axis=axes, keepdims=True).reshape(shape)


# Shape plumbing.


def sum_to(x: TensorLike, shape: Sequence[int]) -> Tensor:
    """Sums `x` over broadcast axes so that it has `shape`."""
    x = _lift(x)
    shape = tuple(shape)
    if x.shape == shape:
        return x

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (broadcast_to(g, x.shape),)

    return _record("sum_to", (x,), _sum_to_array(x.data, shape), vjp)


def broadcast_to(x: TensorLike, shape: Sequence[int]) -> Tensor:
    x = _lift(x)
    shape = tuple(shape)
    if x.shape == shape:
        return x
    try:
        value = np.broadcast_to(x.data, shape).copy()
    except ValueError as e:
        raise DimensionError(f"Cannot broadcast {x.shape} to {shape}.") from e

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (sum_to(g, x.shape),)

    return _record("broadcast_to", (x,), value, vjp)


def reshape(x: TensorLike, shape: Sequence[int]) -> Tensor:
    x = _lift(x)
    try:
        value = x.data.reshape(tuple(shape))
    except ValueError as e:
        raise DimensionError(f"Cannot reshape {x.shape} to {tuple(shape)}.") from e

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (reshape(g, x.shape),)

    return _record("reshape", (x,), value, vjp)


def transpose(x: TensorLike) -> Tensor:
    x = _lift(x)
    if x.ndim != 2:
        raise DimensionError(f"transpose needs a matrix, got shape {x.shape}.")

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (transpose(g),)

    return _record("transpose", (x,), x.data.T.copy(), vjp)


def slice_cols(x: TensorLike, start: int, stop: int) -> Tensor:
    x = _lift(x)
    width = x.shape[1]

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (pad_cols(g, start, width),)

    return _record("slice_cols", (x,), x.data[:, start:stop].copy(), vjp)


def pad_cols(x: TensorLike, start: int, width: int) -> Tensor:
    """Places the columns of `x` at `start` inside a zero matrix of `width`."""
    x = _lift(x)
    stop = start + x.shape[1]
    if stop > width:
        raise DimensionError(f"Columns [{start}, {stop}) exceed width {width}.")
    value = np.zeros((x.shape[0], width))
    value[:, start:stop] = x.data

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (slice_cols(g, start, stop),)

    return _record("pad_cols", (x,), value, vjp)


def concat_cols(parts: Sequence[TensorLike]) -> Tensor:
    tensors = [_lift(p) for p in parts]
    if any(t.ndim != 2 for t in tensors):
        raise DimensionError("concat_cols needs matrices.")
    rows = {t.shape[0] for t in tensors}
    if len(rows) != 1:
        raise DimensionError(f"concat_cols row counts differ: {sorted(rows)}.")
    bounds = np.cumsum([0] + [t.shape[1] for t in tensors])

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return tuple(
            slice_cols(g, int(lo), int(hi)) if t.tracked else None
            for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:])
        )

    value = np.concatenate([t.data for t in tensors], axis=1)
    return _record("concat_cols", tensors, value, vjp)


# Arithmetic.


def add(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _lift(a), _lift(b)
    _broadcast_shape("add", a, b)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (
            sum_to(g, a.shape) if a.tracked else None,
            sum_to(g, b.shape) if b.tracked else None,
        )

    return _record("add", (a, b), a.data + b.data, vjp)


def sub(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _lift(a), _lift(b)
    _broadcast_shape("sub", a, b)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (
            sum_to(g, a.shape) if a.tracked else None,
            sum_to(neg(g), b.shape) if b.tracked else None,
        )

    return _record("sub", (a, b), a.data - b.data, vjp)


def mul(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _lift(a), _lift(b)
    _broadcast_shape("mul", a, b)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (
            sum_to(mul(g, b), a.shape) if a.tracked else None,
            sum_to(mul(g, a), b.shape) if b.tracked else None,
        )

    return _record("mul", (a, b), a.data * b.data, vjp)


def div(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _lift(a), _lift(b)
    _broadcast_shape("div", a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = a.data / b.data

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (
            sum_to(div(g, b), a.shape) if a.tracked else None,
            sum_to(neg(div(mul(g, out), b)), b.shape) if b.tracked else None,
        )

    return _record("div", (a, b), value, vjp)


def neg(x: TensorLike) -> Tensor:
    x = _lift(x)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (neg(g),)

    return _record("neg", (x,), -x.data, vjp)


def square(x: TensorLike) -> Tensor:
    x = _lift(x)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (mul(g, mul(x, 2.0)),)

    return _record("square", (x,), x.data * x.data, vjp)


def matmul(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _lift(a), _lift(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul shapes do not conform: {a.shape} @ {b.shape}.")

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (
            matmul(g, transpose(b)) if a.tracked else None,
            matmul(transpose(a), g) if b.tracked else None,
        )

    return _record("matmul", (a, b), a.data @ b.data, vjp)


def _keepdims_shape(shape: Tuple[int, ...], axis: Optional[int]) -> Tuple[int, ...]:
    if axis is None:
        return tuple(1 for _ in shape)
    axis = axis % len(shape)
    return tuple(1 if i == axis else s for i, s in enumerate(shape))


def sum(  # noqa: A001
    x: TensorLike,
    axis: Optional[int] = None,
    keepdims: bool = False,
) -> Tensor:
    x = _lift(x)
    kept = _keepdims_shape(x.shape, axis)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (broadcast_to(reshape(g, kept), x.shape),)

    value = np.sum(x.data, axis=axis, keepdims=keepdims)
    return _record("sum", (x,), np.asarray(value), vjp)


def mean(x: TensorLike, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    x = _lift(x)
    count = x.size if axis is None else x.shape[axis]
    if count == 0:
        raise DimensionError("mean of an empty tensor.")
    return mul(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


# Elementwise nonlinearities.


def exp(x: TensorLike) -> Tensor:
    x = _lift(x)
    with np.errstate(over="ignore"):
        value = np.exp(x.data)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (mul(g, out),)

    return _record("exp", (x,), value, vjp)


def log(x: TensorLike) -> Tensor:
    x = _lift(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.log(x.data)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (div(g, x),)

    return _record("log", (x,), value, vjp)


def sqrt(x: TensorLike) -> Tensor:
    x = _lift(x)
    with np.errstate(invalid="ignore"):
        value = np.sqrt(x.data)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (div(g, mul(out, 2.0)),)

    return _record("sqrt", (x,), value, vjp)


def relu(x: TensorLike) -> Tensor:
    x = _lift(x)
    mask = Tensor((x.data > 0).astype(np.float64))

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (mul(g, mask),)

    return _record("relu", (x,), x.data * mask.data, vjp)


def leaky_relu(x: TensorLike, alpha: float) -> Tensor:
    """max(alpha x, x); the derivative is piecewise constant, so its own is 0."""
    x = _lift(x)
    slope = Tensor(np.where(x.data > 0, 1.0, alpha))

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (mul(g, slope),)

    return _record("leaky_relu", (x,), x.data * slope.data, vjp)


def sigmoid(x: TensorLike) -> Tensor:
    """Logistic function, kept strictly inside (0, 1)."""
    x = _lift(x)
    value = np.clip(special.expit(x.data), _SIGMOID_LO, _SIGMOID_HI)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (mul(g, mul(out, sub(1.0, out))),)

    return _record("sigmoid", (x,), value, vjp)


def log_sigmoid(x: TensorLike) -> Tensor:
    x = _lift(x)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (mul(g, sigmoid(neg(x))),)

    return _record("log_sigmoid", (x,), -np.logaddexp(0.0, -x.data), vjp)


def softmax(x: TensorLike) -> Tensor:
    """Normalizes along the last axis."""
    x = _lift(x)
    shifted = np.exp(x.data - np.max(x.data, axis=-1, keepdims=True))
    value = shifted / np.sum(shifted, axis=-1, keepdims=True)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        inner = sum(mul(g, out), axis=-1, keepdims=True)
        return (mul(out, sub(g, inner)),)

    return _record("softmax", (x,), value, vjp)


def clamp(x: TensorLike, lo: float, hi: float) -> Tensor:
    """Clips into [lo, hi]. First-order only: the gate is applied off-tape."""
    x = _lift(x)
    if lo > hi:
        raise ValueError(f"clamp bounds reversed: lo={lo} > hi={hi}.")
    gate = ((x.data >= lo) & (x.data <= hi)).astype(np.float64)

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (Tensor(g.data * gate),)

    return _record("clamp", (x,), np.clip(x.data, lo, hi), vjp, higher_order=False)


def l2_norm(x: TensorLike) -> Tensor:
    """Euclidean norm of each row, shape [n, 1]. Zero rows get zero gradient."""
    x = _lift(x)
    if x.ndim != 2:
        raise DimensionError(f"l2_norm needs a matrix, got shape {x.shape}.")
    value = np.sqrt(np.sum(x.data * x.data, axis=1, keepdims=True))
    at_zero = Tensor((value == 0).astype(np.float64))

    def vjp(g: Tensor, out: Tensor) -> Sequence[Optional[Tensor]]:
        return (mul(g, div(x, add(out, at_zero))),)

    return _record("l2_norm", (x,), value, vjp)


# Differentiation.


def _on_path(tape: Tape, targets: Set[int], output: int) -> Set[int]:
    """Nodes lying on some path from a target to `output`."""
    if not targets:
        return set()
    downstream: Set[int] = set()
    for index in range(min(targets), output + 1):
        node = tape.nodes[index]
        if index in targets or any(i in downstream for i in node.inputs):
            downstream.add(index)

    on_path: Set[int] = set()
    stack = [output]
    while stack:
        index = stack.pop()
        if index in on_path or index not in downstream:
            continue
        on_path.add(index)
        stack.extend(i for i in tape.nodes[index].inputs if i is not None)
    return on_path


def grad(
    tape: Tape,
    output: Tensor,
    inputs: Sequence[Tensor],
    *,
    create_graph: bool = False,
) -> List[Tensor]:
    """Gradient of a scalar `output` with respect to each of `inputs`.

    Args:
        tape: The tape `output` and `inputs` were recorded on.
        output: A tracked tensor holding exactly one value.
        inputs: Tracked tensors to differentiate with respect to.
        create_graph: If True, the backward pass is itself recorded so the
            returned gradients can be differentiated again.

    Returns:
        One gradient per input, with the input's shape. Inputs that `output`
        does not depend on get zeros.

    Raises:
        ContractError: `output` is not a tracked scalar of `tape`, or an input
            is not tracked by `tape`.
        CapabilityError: `create_graph` is set and the path from an input to
            `output` contains a first-order-only op.
    """
    if output.tape is not tape or output.node is None:
        raise ContractError("output is not recorded on this tape.")
    if output.size != 1:
        raise ContractError(
            f"Can only differentiate a scalar output, got shape {output.shape}.",
        )
    for t in inputs:
        if t.tape is not tape or t.node is None:
            raise ContractError("Every input must be tracked by the same tape.")

    targets = {t.node for t in inputs if t.node is not None}
    path = _on_path(tape, targets, output.node)
    if create_graph:
        for index in sorted(path):
            node = tape.nodes[index]
            if not node.higher_order:
                raise CapabilityError(
                    f"'{node.op}' only supports first-order gradients.",
                )

    context = contextlib.nullcontext() if create_graph else tape.paused()
    cotangents: Dict[int, Tensor] = {output.node: Tensor(np.ones_like(output.data))}
    with context:
        for index in range(output.node, -1, -1):
            g = cotangents.get(index)
            node = tape.nodes[index]
            if g is None or index not in path or node.vjp is None:
                continue
            pulled = node.vjp(g, Tensor(node.value, tape, index))
            for parent, parent_grad in zip(node.inputs, pulled):
                if parent is None or parent_grad is None or parent not in path:
                    continue
                previous = cotangents.get(parent)
                cotangents[parent] = (
                    parent_grad if previous is None else add(previous, parent_grad)
                )

    results = []
    for t in inputs:
        g = cotangents.get(t.node) if t.node is not None else None
        results.append(g if g is not None else Tensor(np.zeros_like(t.data)))
    return results


def backward(
    tape: Tape,
    output: Tensor,
    names: Optional[Iterable[str]] = None,
) -> Dict[str, np.ndarray]:
    """Gradients of a scalar `output` with respect to the tape's roots.

    Args:
        tape: The tape holding the roots.
        output: Tracked scalar tensor.
        names: Roots to report; defaults to every root on the tape.

    Returns:
        Mapping from root name to gradient array.

    Raises:
        ContractError: a requested name is not a root of `tape`.
    """
    names = list(tape.roots) if names is None else list(names)
    missing = [n for n in names if n not in tape.roots]
    if missing:
        raise ContractError(f"Not roots of this tape: {missing}.")
    roots = [
        Tensor(tape.nodes[tape.roots[n]].value, tape, tape.roots[n]) for n in names
    ]
    grads = grad(tape, output, roots)
    return {n: g.data for n, g in zip(names, grads)}


def input_gradient(tape: Tape, output: Tensor, wrt: Tensor) -> Tensor:
    """Gradient of `output` with respect to `wrt`, recorded on `tape`.

    The result is made of tape nodes, so differentiating a function of it with
    `backward` yields second derivatives (double backpropagation).
    """
    return grad(tape, output, [wrt], create_graph=True)[0]
