"""Binary checkpoint format for networks.

Layout, all integers unsigned 32-bit little-endian::

    b"ADVREG01"
    metadata length, metadata (UTF-8 JSON: spec, update, seed, config digest)
    per parameter: name length, name, rank, dims..., float64 LE row-major data
"""

import dataclasses
import json
import logging
import struct
from typing import Any, Dict, Mapping, Optional

import numpy as np

from advreg.data import types
from advreg.networks import mlp
from advreg.util import util

MAGIC = b"ADVREG01"
FORMAT_VERSION = 1

_U32 = struct.Struct("<I")

logger = logging.getLogger(__name__)


class CheckpointFormatError(ValueError):
    """Not a checkpoint of a supported version, or inconsistent with its spec."""


class CheckpointCorruptedError(CheckpointFormatError):
    """The file ends before its declared contents."""


@dataclasses.dataclass(frozen=True)
class CheckpointHeader:
    spec: mlp.NetSpec
    update: int
    """Generator-update count at which the state was saved."""

    seed: int
    config_digest: str
    format_version: int = FORMAT_VERSION
    init: str = mlp.INIT_SCHEME
    extra: Mapping[str, Any] = dataclasses.field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            format_version=self.format_version,
            spec=self.spec.to_dict(),
            update=self.update,
            seed=self.seed,
            config_digest=self.config_digest,
            init=self.init,
            extra=dict(self.extra),
        )

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "CheckpointHeader":
        return cls(
            spec=mlp.NetSpec.from_dict(d["spec"]),
            update=int(d["update"]),
            seed=int(d["seed"]),
            config_digest=str(d["config_digest"]),
            format_version=int(d["format_version"]),
            init=str(d.get("init", mlp.INIT_SCHEME)),
            extra=dict(d.get("extra", {})),
        )


@dataclasses.dataclass(frozen=True)
class Checkpoint:
    header: CheckpointHeader
    network: mlp.Network


def save_checkpoint(
    path: types.AnyPath,
    net: mlp.Network,
    *,
    update: int,
    seed: int,
    config_digest: str,
    extra: Optional[Mapping[str, Any]] = None,
) -> CheckpointHeader:
    """Writes `net` and its metadata to `path`, creating parent directories.

    Args:
        path: Destination file.
        net: Network to save.
        update: Generator-update count.
        seed: Run seed.
        config_digest: Digest of the run configuration.
        extra: Additional JSON-serializable metadata.

    Returns:
        The header that was written.
    """
    header = CheckpointHeader(
        spec=net.spec,
        update=update,
        seed=seed,
        config_digest=config_digest,
        extra=dict(extra or {}),
    )
    meta = json.dumps(header.to_dict(), sort_keys=True).encode("utf-8")

    chunks = [MAGIC, _U32.pack(len(meta)), meta]
    for name, value in net.params.items():
        encoded = name.encode("utf-8")
        chunks.append(_U32.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(_U32.pack(value.ndim))
        chunks.extend(_U32.pack(d) for d in value.shape)
        chunks.append(np.ascontiguousarray(value, dtype="<f8").tobytes())

    path = util.parse_path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(chunks))
    logger.debug("Saved %s checkpoint at update %d to %s", net.role, update, path)
    return header


class _Reader:
    def __init__(self, buf: bytes, path: str):
        self.buf = buf
        self.pos = 0
        self.path = path

    def at_end(self) -> bool:
        return self.pos == len(self.buf)

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise CheckpointCorruptedError(
                f"{self.path}: truncated at byte {len(self.buf)}, "
                f"needed {self.pos + n}.",
            )
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return _U32.unpack(self.take(_U32.size))[0]


def load_checkpoint(path: types.AnyPath) -> Checkpoint:
    """Reads a checkpoint written by `save_checkpoint`.

    Args:
        path: Checkpoint file.

    Returns:
        The header and the network it describes.

    Raises:
        CheckpointFormatError: bad magic, unsupported version, or parameters that
            disagree with the stored spec.
        CheckpointCorruptedError: the file is truncated or a parameter name is
            not valid UTF-8.
    """
    path = util.parse_path(path)
    reader = _Reader(path.read_bytes(), str(path))

    magic = reader.buf[: len(MAGIC)]
    if magic != MAGIC:
        raise CheckpointFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}.")
    reader.take(len(MAGIC))

    meta_bytes = reader.take(reader.u32())
    try:
        header = CheckpointHeader.from_dict(json.loads(meta_bytes.decode("utf-8")))
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise CheckpointFormatError(f"{path}: unreadable metadata block.") from e
    if header.format_version != FORMAT_VERSION:
        raise CheckpointFormatError(
            f"{path}: format version {header.format_version}, "
            f"this build reads {FORMAT_VERSION}.",
        )

    params: Dict[str, np.ndarray] = {}
    while not reader.at_end():
        raw_name = reader.take(reader.u32())
        try:
            name = raw_name.decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointCorruptedError(
                f"{path}: unreadable parameter name {raw_name!r}.",
            ) from e
        rank = reader.u32()
        shape = tuple(reader.u32() for _ in range(rank))
        count = int(np.prod(shape, dtype=np.int64))
        payload = reader.take(8 * count)
        values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
        params[name] = values.reshape(shape)

    expected = header.spec.param_shapes()
    if set(params) < set(expected):
        missing = sorted(set(expected) - set(params))
        raise CheckpointCorruptedError(f"{path}: truncated, missing {missing}.")
    try:
        network = mlp.Network(header.spec, params)
    except ValueError as e:
        raise CheckpointFormatError(f"{path}: {e}") from e
    return Checkpoint(header=header, network=network)


def load_network(path: types.AnyPath) -> mlp.Network:
    return load_checkpoint(path).network
