"""Fixtures common across tests."""

import numpy as np
import pytest
import sacred
import torch

from advreg.util import logger
from advreg.util import sacred as sacred_util


@pytest.fixture(scope="session", autouse=True)
def torch_single_threaded():
    """Make PyTorch execute code single-threaded.

    PyTorch only serves as a reference implementation in these tests, and a
    single thread keeps it from competing with other tests run in parallel.
    """
    torch.set_num_threads(1)
    torch.set_num_interop_threads(1)


@pytest.fixture()
def custom_logger(tmpdir: str) -> logger.MeanLogger:
    return logger.configure(tmpdir, ["log", "csv"])


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(seed=0)


@pytest.fixture()
def run_root(tmp_path, monkeypatch):
    """Points the default run root at a temporary directory."""
    root = tmp_path / "runs"
    monkeypatch.setenv(sacred_util.RUN_ROOT_ENV, str(root))
    return root


@pytest.fixture()
def sacred_capture_use_sys():
    """Set Sacred capture mode to "sys" because default "fd" option leads to error.

    See https://github.com/IDSIA/sacred/issues/289.
    """
    temp = sacred.SETTINGS.CAPTURE_MODE
    sacred.SETTINGS.CAPTURE_MODE = "sys"
    yield
    sacred.SETTINGS.CAPTURE_MODE = temp
