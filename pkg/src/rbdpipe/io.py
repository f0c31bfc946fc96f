"""JSON-lines codecs for task states and results.

A state record holds ``q`` plus any of ``qd``, ``qdd``, ``tau``, ``f_ext``
(one 6-vector per link, angular part first) and ``minv``.  ``qdd`` and
``tau`` are alternatives; which one a function reads is fixed by the
function.  Every float is written with ``repr`` precision, so a result file
parses back to the exact values.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dynamics import DerivativeBlocks, FunctionId, RobotState, TaskError

_TAU_INPUT = (FunctionId.FD, FunctionId.DFD)


class InputError(ValueError):
    pass


def state_to_record(state: RobotState, function: FunctionId) -> dict:
    rec = {"q": np.asarray(state.q, float).tolist()}
    if state.qd is not None:
        rec["qd"] = np.asarray(state.qd, float).tolist()
    if state.qdd_or_tau is not None:
        rec["tau" if function in _TAU_INPUT else "qdd"] = np.asarray(state.qdd_or_tau, float).tolist()
    if state.f_ext is not None:
        rec["f_ext"] = np.asarray(state.f_ext, float).tolist()
    if state.minv is not None:
        rec["minv"] = np.asarray(state.minv, float).tolist()
    return rec


def record_to_state(rec: dict, function: FunctionId, where: str = "") -> RobotState:
    if not isinstance(rec, dict) or "q" not in rec:
        raise InputError(f"{where}state record needs a 'q' entry")
    key = "tau" if function in _TAU_INPUT else "qdd"
    other = "qdd" if key == "tau" else "tau"
    if other in rec and key not in rec and function not in (FunctionId.M, FunctionId.MINV):
        raise InputError(f"{where}{function.value} reads '{key}', but the record only has '{other}'")

    def arr(name):
        v = rec.get(name)
        if v is None:
            return None
        try:
            return np.asarray(v, dtype=float)
        except (TypeError, ValueError):
            raise InputError(f"{where}'{name}' is not numeric") from None

    return RobotState(arr("q"), arr("qd"), arr(key), arr("f_ext"), arr("minv"))


def read_states(path, function: FunctionId) -> list[RobotState]:
    out = []
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{lineno}: not valid JSON ({exc.msg})") from None
        out.append(record_to_state(rec, function, f"{path}:{lineno}: "))
    return out


def write_states(path, states, function: FunctionId):
    with open(path, "w") as fh:
        for st in states:
            fh.write(json.dumps(state_to_record(st, function)) + "\n")


_RESULT_KEY = {
    FunctionId.ID: "tau",
    FunctionId.FD: "qdd",
    FunctionId.M: "M",
    FunctionId.MINV: "Minv",
}


def result_to_record(index: int, function: FunctionId, result) -> dict:
    rec = {"task": index, "function": function.value}
    if isinstance(result, TaskError):
        rec["error"] = f"{type(result.error).__name__}: {result.error}"
    elif isinstance(result, DerivativeBlocks):
        rec["d_dq"] = result.d_dq.tolist()
        rec["d_dqd"] = result.d_dqd.tolist()
    elif isinstance(result, dict):
        rec.update({k: np.asarray(v).tolist() for k, v in result.items()})
    else:
        rec[_RESULT_KEY[function]] = np.asarray(result).tolist()
    return rec


def read_results(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
