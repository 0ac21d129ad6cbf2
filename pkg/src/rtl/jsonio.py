"""Deterministic JSON / CSV emission and object (de)serialization.

JSON floats are printed with 17 significant digits so output is
byte-identical across runs with the same inputs; CSV uses shortest
round-trip floats.
"""
from __future__ import annotations

import numpy as np

from .qcore import CompositeSpace, Observable, State
from .channels import Channel, Implementation


def _fmt_float(x: float) -> str:
    if x != x:
        raise ValueError("NaN is not representable in the output format")
    if x in (float("inf"), float("-inf")):
        raise ValueError("infinity is not representable; use 'divergent'")
    s = format(float(x), ".17g")
    # keep JSON-valid: "1e+20" is fine, bare "inf"/"nan" are not
    return s


def dumps(obj, indent: int = 0) -> str:
    """JSON text with deterministic key order and fixed float formatting."""
    return _emit(obj, indent, 0) + ("\n" if indent else "")


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1)) if indent else ""
    end_pad = " " * (indent * level) if indent else ""
    sep = ",\n" if indent else ","
    colon = ": " if indent else ":"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        return '"' + out + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + _emit(str(k), indent, level + 1) + colon
                 + _emit(v, indent, level + 1) for k, v in obj.items()]
        if indent:
            return "{\n" + sep.join(items) + "\n" + end_pad + "}"
        return "{" + sep.join(items) + "}"
    if isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        if indent:
            return "[\n" + sep.join(items) + "\n" + end_pad + "]"
        return "[" + sep.join(items) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_float(x: float) -> str:
    return repr(float(x))


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data],
                    dtype=complex)


def state_to_json(rho: State) -> dict:
    return {"dims": list(rho.space.dims), "matrix": matrix_to_json(rho.matrix)}


def state_from_json(data) -> State:
    return State(matrix_from_json(data["matrix"]),
                 CompositeSpace(tuple(data["dims"])))


def observable_to_json(h: Observable) -> dict:
    return {"dims": list(h.space.dims), "matrix": matrix_to_json(h.matrix)}


def observable_from_json(data) -> Observable:
    return Observable(matrix_from_json(data["matrix"]),
                      CompositeSpace(tuple(data["dims"])))


def channel_to_json(lam: Channel) -> dict:
    return {
        "in_dims": list(lam.in_space.dims),
        "out_dims": list(lam.out_space.dims),
        "kraus": [matrix_to_json(k) for k in lam.kraus],
    }


def channel_from_json(data) -> Channel:
    return Channel([matrix_from_json(k) for k in data["kraus"]],
                   CompositeSpace(tuple(data["in_dims"])),
                   CompositeSpace(tuple(data["out_dims"])))


def implementation_to_json(impl: Implementation) -> dict:
    return {
        "in_dims": [impl.in_dim_a],
        "ancilla": state_to_json(impl.ancilla),
        "unitary": matrix_to_json(impl.unitary),
        "out_partition": [list(impl.out_dims_a), list(impl.out_dims_b)],
    }


def implementation_from_json(data) -> Implementation:
    return Implementation(
        ancilla=state_from_json(data["ancilla"]),
        unitary=matrix_from_json(data["unitary"]),
        out_dims_a=tuple(data["out_partition"][0]),
        out_dims_b=tuple(data["out_partition"][1]),
    )
