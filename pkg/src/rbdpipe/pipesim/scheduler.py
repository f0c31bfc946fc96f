"""Task sets with dependencies, and the issue order the entry stage uses."""
from __future__ import annotations

from dataclasses import dataclass, field


class TaskGraphError(ValueError):
    pass


@dataclass(frozen=True)
class Task:
    id: int
    deps: tuple[int, ...] = ()


@dataclass
class TaskSet:
    tasks: list[Task]
    _succ: dict = field(default=None, init=False, repr=False)

    @classmethod
    def independent(cls, count: int) -> "TaskSet":
        if count < 0:
            raise ValueError("task count must be non-negative")
        return cls([Task(i) for i in range(count)])

    @classmethod
    def rk4_chains(cls, points: int, steps: int = 4) -> "TaskSet":
        """``points`` independent chains of ``steps`` stages each; task
        ``p * steps + k`` waits for ``p * steps + k - 1``."""
        return cls([Task(p * steps + k, (p * steps + k - 1,) if k else ())
                    for p in range(points) for k in range(steps)])

    def __len__(self):
        return len(self.tasks)

    def successors(self, tid: int) -> list[int]:
        if self._succ is None:
            succ = {t.id: [] for t in self.tasks}
            for t in self.tasks:
                for d in t.deps:
                    succ[d].append(t.id)
            self._succ = succ
        return self._succ[tid]

    def validate(self) -> "TaskSet":
        ids = [t.id for t in self.tasks]
        if len(set(ids)) != len(ids):
            raise TaskGraphError("duplicate task ids")
        known = set(ids)
        for t in self.tasks:
            for d in t.deps:
                if d not in known:
                    raise TaskGraphError(f"task {t.id} depends on unknown task {d}")
        topological_order(self)
        return self


def topological_order(taskset: TaskSet) -> list[int]:
    """Lowest-id-first topological order; raises on a dependency cycle."""
    import heapq

    indeg = {t.id: len(t.deps) for t in taskset.tasks}
    succ = {t.id: [] for t in taskset.tasks}
    for t in taskset.tasks:
        for d in t.deps:
            succ[d].append(t.id)
    ready = [i for i, n in indeg.items() if n == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for s in succ[i]:
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(ready, s)
    if len(order) != len(indeg):
        stuck = sorted(i for i, n in indeg.items() if n > 0)
        raise TaskGraphError(f"dependency cycle among tasks {stuck[:10]}")
    return order


def schedule_tasks(taskset: TaskSet, graph, policy: str | None = None) -> list[int]:
    """Order in which the entry stage issues the tasks when run on ``graph``."""
    from .sim import simulate

    return simulate(graph, taskset, policy).issue_order
