"""Logging of training statistics through the Stable Baselines logger."""

import contextlib
import datetime
import pathlib
import tempfile
from typing import Generator, Optional, Sequence

import stable_baselines3.common.logger as sb_logger

from advreg.data import types
from advreg.util import util

DEFAULT_FORMATS = ("stdout", "log", "csv")


class MeanLogger(sb_logger.Logger):
    """A logger whose `accumulate_means` context averages values between dumps.

    Outside the context `record` behaves as usual. Inside
    ``accumulate_means(name)``, ``record(key, value)`` is turned into
    ``record_mean(f"{name}/{key}", value)``, so a discriminator trained five
    times per generator update reports the mean of its five losses at the
    next `dump`.
    """

    _scope: Optional[str]

    def __init__(
        self,
        folder: Optional[str],
        output_formats: Sequence[sb_logger.KVWriter],
    ):
        super().__init__(folder=folder, output_formats=list(output_formats))
        self._scope = None

    @contextlib.contextmanager
    def accumulate_means(self, name: str) -> Generator[None, None, None]:
        """Averages every value recorded in this context under the key prefix `name`.

        Args:
            name: Key prefix.

        Yields:
            None when the context is entered.

        Raises:
            RuntimeError: the context is already active.
        """
        if self._scope is not None:
            raise RuntimeError("Nested `accumulate_means` context")
        self._scope = name
        try:
            yield
        finally:
            self._scope = None

    def record(self, key, value, exclude=None) -> None:
        if self._scope is None:
            super().record(key, value, exclude)
        else:
            super().record_mean(f"{self._scope}/{key}", value, exclude)


def configure(
    folder: Optional[types.AnyPath] = None,
    format_strs: Optional[Sequence[str]] = None,
) -> MeanLogger:
    """Builds a `MeanLogger` writing to `folder` in each of `format_strs`.

    Args:
        folder: Log directory; a fresh directory under the system temporary
            directory if omitted.
        format_strs: Output formats understood by
            `stable_baselines3.common.logger.make_output_format`, e.g.
            ``stdout``, ``log``, ``csv`` or ``json``.

    Returns:
        The configured logger.
    """
    if folder is None:
        stamp = datetime.datetime.now().strftime("advreg-%Y-%m-%d-%H-%M-%S-%f")
        path = util.parse_path(tempfile.gettempdir()) / stamp
    else:
        path = util.parse_path(folder)
    path.mkdir(parents=True, exist_ok=True)
    formats = DEFAULT_FORMATS if format_strs is None else format_strs
    writers = [sb_logger.make_output_format(f, str(path)) for f in formats]
    return MeanLogger(str(path), writers)


def log_dir(logger: sb_logger.Logger) -> pathlib.Path:
    folder = logger.get_dir()
    if folder is None:
        raise ValueError("Logger has no output directory.")
    return util.parse_path(folder)
