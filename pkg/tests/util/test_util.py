"""Tests `advreg.util.sacred` and `advreg.util.util`."""

import json
import pathlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advreg.util import sacred as sacred_util
from advreg.util import util


@pytest.mark.parametrize("purpose", sorted(util.RNG_PURPOSES))
def test_make_rng_is_reproducible(purpose):
    a = util.make_rng(3, purpose).random(5)
    b = util.make_rng(3, purpose).random(5)
    np.testing.assert_array_equal(a, b)


def test_make_rng_streams_are_distinct():
    draws = {
        purpose: util.make_rng(3, purpose).random()
        for purpose in util.RNG_PURPOSES
    }
    assert len(set(draws.values())) == len(util.RNG_PURPOSES)
    chunks = [util.make_rng(3, "oracle", i).random() for i in range(2)]
    assert chunks[0] != chunks[1]
    assert util.make_rng(3, "data").random() != util.make_rng(4, "data").random()


def test_make_rng_errors():
    with pytest.raises(ValueError, match="Unknown RNG purpose"):
        util.make_rng(0, "weights")
    with pytest.raises(ValueError, match="non-negative"):
        util.make_rng(-1, "data")


@given(st.integers(0, 2**32), st.integers(0, 1000))
@settings(max_examples=25, deadline=None)
def test_derive_seed(seed, index):
    child = util.derive_seed(seed, index)
    assert child == util.derive_seed(seed, index)
    assert 0 <= child < 2**31
    assert child != util.derive_seed(seed, index + 1)


def test_config_digest():
    a = util.config_digest({"gan": "sgan", "lr": 1e-4})
    assert a == util.config_digest({"lr": 1e-4, "gan": "sgan"})
    assert a != util.config_digest({"gan": "sgan", "lr": 1e-5})
    assert len(a) == 16


def test_unique_dir(tmp_path):
    first = util.unique_dir(tmp_path, "run")
    assert first == tmp_path / "run"
    first.mkdir()
    assert util.unique_dir(tmp_path, "run") == tmp_path / "run_1"
    (tmp_path / "run_1").mkdir()
    assert util.unique_dir(tmp_path, "run") == tmp_path / "run_2"


def test_parse_path(tmp_path):
    assert util.parse_path("a/b", base_directory=tmp_path) == tmp_path / "a" / "b"
    assert util.parse_path(b"/x/y") == pathlib.Path("/x/y")
    assert util.parse_path("c") == pathlib.Path.cwd() / "c"


def test_default_run_root(monkeypatch, tmp_path):
    monkeypatch.setenv(sacred_util.RUN_ROOT_ENV, str(tmp_path))
    assert sacred_util.default_run_root() == tmp_path
    monkeypatch.setenv(sacred_util.RUN_ROOT_ENV, "")
    assert sacred_util.default_run_root() == pathlib.Path.cwd() / "runs"


def test_run_manifest_round_trip(tmp_path):
    manifest = sacred_util.RunManifest(
        command="train",
        config={"gan": "sgan", "conditions": [0.4]},
        seed=7,
        config_digest="abc",
        artifacts={"metrics": "metrics.csv"},
    )
    path = manifest.save(tmp_path / "0001")
    assert json.loads(path.read_text())["seed"] == 7
    assert sacred_util.RunManifest.load(tmp_path / "0001") == manifest
    with pytest.raises(FileNotFoundError):
        sacred_util.RunManifest.load(tmp_path)


def test_plain():
    value = {"a": (1, 2), 3: {"b": [0.5]}}
    assert sacred_util.plain(value) == {"a": [1, 2], "3": {"b": [0.5]}}
