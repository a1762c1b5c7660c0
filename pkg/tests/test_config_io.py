import json
import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tpx.config import RunConfig
from tpx.errors import ArgumentError
from tpx.io import atomic_write, csv_text, dumps, format_float, read_json, write_json


def test_defaults_and_precedence():
    assert RunConfig().seed == 0
    cfg = RunConfig.resolve(env={"TPX_SEED": "7", "TPX_THREADS": "3"})
    assert cfg.seed == 7 and cfg.threads == 3
    cfg = RunConfig.resolve(env={"TPX_SEED": "7"}, seed=11, threads="auto")
    assert cfg.seed == 11 and cfg.threads == "auto" and cfg.workers >= 1


def test_config_validation():
    with pytest.raises(ArgumentError):
        RunConfig(seed=-1)
    with pytest.raises(ArgumentError):
        RunConfig(threads=0)
    with pytest.raises(ArgumentError):
        RunConfig(format="xml")
    with pytest.raises(ArgumentError):
        RunConfig(tolerances={"nope": 1.0})
    assert RunConfig(tolerances={"power": 1e-6}).tol("power") == 1e-6
    assert RunConfig(tolerances={"power": 1e-6}).tol("oracle") == 1e-8


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert float(format_float(x)) == x
    assert json.loads(dumps({"v": x}))["v"] == x


def test_float_format_17_digits():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(2.0) == "2.0"
    assert format_float(math.nan) == "null"


def test_dumps_types():
    obj = {"a": np.float64(1.5), "b": np.int64(3), "c": [1, 2.5], "d": None, "e": "x", "f": True, "g": []}
    back = json.loads(dumps(obj))
    assert back == {"a": 1.5, "b": 3, "c": [1, 2.5], "d": None, "e": "x", "f": True, "g": []}
    with pytest.raises(TypeError):
        dumps({"s": {1, 2}})


def test_atomic_write(tmp_path):
    p = tmp_path / "sub" / "out.json"
    write_json(p, {"x": 1})
    assert read_json(p) == {"x": 1}
    atomic_write(p, "replaced")
    assert p.read_text() == "replaced"
    assert [f for f in os.listdir(p.parent) if f.endswith(".tmp")] == []


def test_csv_text():
    assert csv_text(("a", "b"), [(1, 0.5), (2, "x")]) == "a,b\n1,0.5\n2,x\n"
