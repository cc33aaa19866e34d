"""Tests `advreg.util.logger`."""

import csv
import json
import os.path as osp
from collections import defaultdict

import pytest

from advreg.util import logger


def _csv_to_dict(csv_path: str) -> dict:
    result = defaultdict(list)
    with open(csv_path, "r") as f:
        for row in csv.DictReader(f):
            for k, v in row.items():
                if v != "":
                    v = float(v)
                result[k].append(v)
    return result


def _json_to_dict(json_path: str) -> dict:
    r"""Loads the saved json logging file and convert it to expected dict format.

    Args:
        json_path: Path of the json log file.
            Stored in the format - '{"A": 1, "B": 1}\n{"A": 2}\n{"B": 3}\n'

    Returns:
        dictionary in the format - `{"A": [1, 2, ""], "B": [1, "", 3]}`
    """
    result = defaultdict(list)
    with open(json_path, "r") as f:
        all_line_dicts = [json.loads(line) for line in f.readlines()]
    all_keys = set().union(*[list(line_dict.keys()) for line_dict in all_line_dicts])
    for line_dict in all_line_dicts:
        for key in all_keys:
            result[key].append(line_dict.get(key, ""))
    return result


def test_no_accum(tmpdir):
    mean_logger = logger.configure(tmpdir, ["csv", "json"])
    assert mean_logger.get_dir() == str(tmpdir)

    # A value recorded twice before a dump is overwritten, not averaged.
    mean_logger.record("A", -1)
    mean_logger.record("A", 1)
    mean_logger.record("B", 1)
    mean_logger.dump()

    mean_logger.record("A", 2)
    mean_logger.dump()
    mean_logger.record("B", 3)
    mean_logger.dump()
    expect = {"A": [1, 2, ""], "B": [1, "", 3]}
    assert _csv_to_dict(osp.join(tmpdir, "progress.csv")) == expect
    assert _json_to_dict(osp.join(tmpdir, "progress.json")) == expect


def test_accumulate_means(tmpdir):
    mean_logger = logger.configure(tmpdir, ["csv"])
    for loss in (1.0, 2.0, 6.0):
        with mean_logger.accumulate_means("disc"):
            mean_logger.record("loss", loss)
    mean_logger.record("gen/loss", 0.5)
    mean_logger.dump(step=1)

    with mean_logger.accumulate_means("disc"):
        mean_logger.record("loss", 4.0)
    mean_logger.dump(step=2)

    observed = _csv_to_dict(osp.join(tmpdir, "progress.csv"))
    assert observed["disc/loss"] == [3.0, 4.0]
    assert observed["gen/loss"] == [0.5, ""]


def test_nested_accumulate_means(tmpdir):
    mean_logger = logger.configure(tmpdir, ["log"])
    with mean_logger.accumulate_means("disc"):
        with pytest.raises(RuntimeError, match="Nested"):
            with mean_logger.accumulate_means("gen"):
                pass
    # The scope is released after the failed entry and the outer exit.
    with mean_logger.accumulate_means("gen"):
        mean_logger.record("loss", 1.0)


def test_configure_defaults():
    mean_logger = logger.configure(format_strs=["log"])
    assert logger.log_dir(mean_logger).is_dir()
    assert "advreg" in logger.log_dir(mean_logger).name


def test_raise_unknown_format(tmpdir):
    with pytest.raises(ValueError, match=r"Unknown format specified:.*"):
        logger.configure(tmpdir, ["txt"])
