"""Deterministic JSON/CSV serialization and object round-trips."""
import json
import math

import numpy as np
import pytest

from rtl.qcore import CompositeSpace, Observable, State
from rtl.channels import Channel, Implementation, apply
from rtl.jsonio import (
    channel_from_json,
    channel_to_json,
    csv_float,
    dumps,
    implementation_from_json,
    implementation_to_json,
    matrix_from_json,
    matrix_to_json,
    observable_from_json,
    observable_to_json,
    state_from_json,
    state_to_json,
)


def test_dumps_is_valid_json_and_deterministic():
    obj = {"b": 1.5, "a": [1, 2.25, "x"], "c": {"k": True, "n": None}}
    s1 = dumps(obj, indent=2)
    s2 = dumps(obj, indent=2)
    assert s1 == s2
    assert json.loads(s1) == obj


def test_float_formatting_17_digits():
    s = dumps({"v": 1 / 3})
    assert "0.33333333333333331" in s
    assert json.loads(s)["v"] == 1 / 3


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        dumps({"v": math.inf})
    with pytest.raises(ValueError):
        dumps({"v": math.nan})


def test_csv_float_roundtrip():
    for v in (0.1, 1 / 3, 123.0, 1e-17, -2.5):
        assert float(csv_float(v)) == v


def test_matrix_roundtrip():
    m = np.array([[1.0, 0.5j], [-0.5j, 2.0]])
    assert np.array_equal(matrix_from_json(matrix_to_json(m)), m)


def test_state_roundtrip():
    rho = State(np.diag([0.25, 0.25, 0.25, 0.25]), CompositeSpace((2, 2)))
    back = state_from_json(json.loads(dumps(state_to_json(rho))))
    assert back.space.dims == (2, 2)
    assert np.allclose(back.matrix, rho.matrix)


def test_observable_roundtrip():
    h = Observable(np.diag([0.0, 1.0, 2.0]), CompositeSpace((3,)))
    back = observable_from_json(json.loads(dumps(observable_to_json(h))))
    assert back.space.dims == (3,)
    assert np.allclose(back.matrix, h.matrix)


def test_channel_roundtrip():
    lam = Channel.from_unitary(np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    back = channel_from_json(json.loads(dumps(channel_to_json(lam))))
    rho = State.from_vector([1, 0])
    assert np.allclose(apply(back, rho).matrix, apply(lam, rho).matrix)


def test_implementation_roundtrip():
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                    dtype=complex)
    impl = Implementation(State.from_vector([1, 0]), cnot, (2,), (2,))
    back = implementation_from_json(
        json.loads(dumps(implementation_to_json(impl))))
    assert np.allclose(back.unitary, cnot)
    assert back.out_dims_a == (2,) and back.out_dims_b == (2,)
