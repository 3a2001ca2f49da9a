import json
import math

import numpy as np
from hypothesis import given, strategies as st

from hssnt.jsonio import dumps


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_roundtrip(x):
    assert json.loads(dumps({"x": x}))["x"] == x


def test_non_finite_as_strings():
    d = json.loads(dumps({"a": math.inf, "b": -math.inf, "c": math.nan}))
    assert d == {"a": "inf", "b": "-inf", "c": "nan"}


def test_numpy_types_and_nesting():
    doc = {"arr": np.array([1.0, 2.5]), "i": np.int64(3), "ok": np.bool_(True), "n": None,
           "nested": [{"k": []}, {}]}
    assert json.loads(dumps(doc)) == {"arr": [1.0, 2.5], "i": 3, "ok": True, "n": None,
                                      "nested": [{"k": []}, {}]}


def test_seventeen_digits():
    assert "0.10000000000000001" in dumps([0.1])
