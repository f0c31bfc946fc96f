"""Batched evaluation of one function over many states."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..model.robot import RobotModel
from .drnea import DerivativeBlocks
from .functions import FunctionId, RobotState, evaluate

THREADS_ENV = "RBDPIPE_THREADS"


@dataclass
class TaskError:
    """Stand-in result for a task that raised."""

    index: int
    error: Exception

    def __str__(self):
        return f"task {self.index}: {type(self.error).__name__}: {self.error}"


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def _stack(states: list[RobotState], n: int, n_bodies: int) -> RobotState:
    def col(attr, shape):
        vals = [getattr(s, attr) for s in states]
        if all(v is None for v in vals):
            return None
        return np.stack([np.zeros(shape) if v is None else np.asarray(v, float) for v in vals])

    if any(s.base is not None for s in states):
        raise ValueError("stacked evaluation does not carry per-task base motion")
    return RobotState(col("q", n), col("qd", n), col("qdd_or_tau", n), col("f_ext", (n_bodies, 6)),
                      col("minv", (n, n)))


def _split(result, count):
    if isinstance(result, DerivativeBlocks):
        return [DerivativeBlocks(result.d_dq[i], result.d_dqd[i]) for i in range(count)]
    return [result[i] for i in range(count)]


def _run_chunk(model, function, chunk, start):
    try:
        stacked = _stack(chunk, model.n_dof, model.n_bodies)
        return _split(evaluate(model, function, stacked), len(chunk))
    except Exception:
        # Fall back to one task at a time so a bad entry only fails itself.
        out = []
        for i, state in enumerate(chunk):
            try:
                out.append(evaluate(model, function, state))
            except Exception as exc:
                out.append(TaskError(start + i, exc))
        return out


def batch_evaluate(model: RobotModel, function: FunctionId | str, states: list[RobotState], *,
                   chunk: int = 64, threads: int | None = None) -> list:
    """Evaluate ``function`` on every state; results come back in input order.

    Tasks are vectorised in chunks, and chunks may run on a thread pool.  All
    arithmetic is elementwise, so a task's result does not depend on which
    chunk or thread computed it.  A task that raises yields a
    :class:`TaskError` at its index instead of aborting the batch.
    """
    function = function if isinstance(function, FunctionId) else FunctionId.parse(function)
    threads = default_threads() if threads is None else max(1, int(threads))
    chunks = [(states[i:i + chunk], i) for i in range(0, len(states), chunk)]
    if threads == 1 or len(chunks) <= 1:
        parts = [_run_chunk(model, function, c, i) for c, i in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ci: _run_chunk(model, function, *ci), chunks))
    return [r for part in parts for r in part]
