"""Event-driven simulation of task streams through a :class:`PipelineGraph`.

Timing rules, per stage:

* a stage accepts a token once its initiation interval since the previous
  accept has elapsed, every input FIFO routed for the token's
  micro-instruction holds it at the head, and each output FIFO has room for
  what the stage will emit (space is reserved at accept time);
* output appears ``latency`` cycles after accept, in accept order;
* within a cycle stages are retried in id order until nothing changes.

A token is ``(seq, lane, task, pass)``.  ``seq`` counts accepts at the entry
stage (a fed-back pass gets a fresh one), so every FIFO is ordered by
``(seq, lane)`` and a join takes the smallest head.  The simulator carries no numerical payload.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

from .graph import PipelineGraph
from .scheduler import TaskSet, topological_order


class DeadlockError(RuntimeError):
    def __init__(self, cycle, fifos, blocked, unfinished=0):
        self.cycle, self.fifos, self.blocked, self.unfinished = cycle, fifos, blocked, unfinished
        lines = [f"pipeline deadlock at cycle {cycle} with {unfinished} tasks unfinished"]
        lines += [f"  stage {b}" for b in blocked[:20]]
        lines += [f"  fifo {name}: {occ}" for name, occ in fifos[:20]]
        super().__init__("\n".join(lines))


@dataclass
class TraceReport:
    makespan: int
    issue: dict[int, int]
    finish: dict[int, int]
    busy: dict[str, int]
    accepts: dict[str, int]
    fifo_high_water: dict[str, int]
    stage_ids: dict[str, int]
    issue_order: list[int]
    first_accept: dict[str, int] = field(default_factory=dict)
    last_accept: dict[str, int] = field(default_factory=dict)
    last_ii: dict[str, int] = field(default_factory=dict)

    @property
    def n_tasks(self) -> int:
        return len(self.finish)

    @property
    def latencies(self) -> list[int]:
        return [self.finish[t] - self.issue[t] for t in sorted(self.finish)]

    @property
    def steady_state_ii(self) -> float:
        """Mean spacing of completions."""
        ends = sorted(self.finish.values())
        if len(ends) < 2:
            return float("nan")
        return (ends[-1] - ends[0]) / (len(ends) - 1)

    def utilization(self, stage: str) -> float:
        return self.busy[stage] / self.makespan if self.makespan else 0.0

    def steady_utilization(self, stage: str) -> float:
        """Busy fraction between the stage's first accept and the end of its
        last initiation interval, leaving out pipeline fill and drain."""
        if stage not in self.first_accept:
            return 0.0
        window = self.last_accept[stage] + self.last_ii[stage] - self.first_accept[stage]
        return self.busy[stage] / window

    @property
    def throughput(self) -> float:
        """Tasks per kilocycle."""
        return 1000.0 * self.n_tasks / self.makespan if self.makespan else 0.0


def simulate(graph: PipelineGraph, taskset: TaskSet | int, policy: str | None = None,
             max_cycles: int = 10 ** 9) -> TraceReport:
    """Run ``taskset`` (or that many independent tasks) through ``graph``."""
    if isinstance(taskset, int):
        taskset = TaskSet.independent(taskset)
    taskset.validate()
    policy = policy or graph.config.policy
    if policy not in ("greedy", "in_order"):
        raise ValueError(f"unknown policy {policy!r}")
    return _Sim(graph, taskset, policy, max_cycles).run()


class _Sim:
    def __init__(self, graph, taskset, policy, max_cycles):
        self.g, self.ts, self.policy, self.max_cycles = graph, taskset, policy, max_cycles
        nS, nE = len(graph.stages), len(graph.edges)
        self.ins = [[i for i in graph.in_edges(s) if graph.edges[i].kind != "feedback"] for s in range(nS)]
        self.outs = [[i for i in graph.out_edges(s) if graph.edges[i].kind != "feedback"] for s in range(nS)]
        self.fb_out = [[i for i in graph.out_edges(s) if graph.edges[i].kind == "feedback"] for s in range(nS)]
        self.fifo = [deque() for _ in range(nE)]
        self.reserved = [0] * nE
        self.high = [0] * nE
        self.next_free = [0] * nS
        self.last_done = [0] * nS
        self.busy = [0] * nS
        self.acc = [0] * nS
        self.first = [None] * nS
        self.last = [None] * nS
        self.last_ii = [0] * nS
        self.n_pass = len(graph.insts)
        self.costs = [[s.cost(inst, graph.config) for inst in graph.insts] for s in graph.stages]
        # producers of each stage, for waking them when space frees up
        self.producers = [sorted({graph.edges[i].src for i in self.ins[s]}) for s in range(nS)]

    # -- source --------------------------------------------------------
    def _source_candidate(self):
        # Fed-back passes and new tasks take turns when both are waiting, so
        # the two passes stay interleaved instead of travelling in convoys.
        if self.feedback and (self.last_was_new or not self._has_new()):
            return self.feedback[0], True
        return self._new_candidate(), False

    def _has_new(self):
        return self._new_candidate() is not None

    def _new_candidate(self):
        if self.policy == "greedy":
            while self.ready and self.ready[0][1] in self.issued:
                heapq.heappop(self.ready)
            return (None, self.ready[0][1], 0) if self.ready else None
        while self.cursor < len(self.order) and self.order[self.cursor] in self.issued:
            self.cursor += 1
        if self.cursor < len(self.order):
            tid = self.order[self.cursor]
            if self.remaining_deps[tid] == 0:
                return (None, tid, 0)
        return None

    # -- one stage -----------------------------------------------------
    def _try(self, s, t):
        g = self.g
        if self.next_free[s] > t:
            return False
        entry = s == g.entry
        if entry:
            cand, from_fb = self._source_candidate()
            if cand is None:
                return False
            tid = cand[1]
            pas = cand[2] if from_fb else 0
            key = None
        else:
            # smallest head across inputs
            best = None
            for i in self.ins[s]:
                q = self.fifo[i]
                if q:
                    h = q[0]
                    if best is None or h[:2] < best[:2]:
                        best = h
            if best is None:
                return False
            key = best
            pas = key[3]
        inst = g.insts[pas]
        stage = g.stages[s]
        lanes = stage.lanes
        # check inputs routed for this inst
        take = []
        if not entry:
            seq, lane, tid, _ = key
            for i in self.ins[s]:
                e = g.edges[i]
                if inst not in e.insts:
                    continue
                q = self.fifo[i]
                if e.lanes == lanes:
                    if not q or q[0][:2] != (seq, lane):
                        return False
                    take.append((i, 1))
                else:  # several lanes reduce into one token
                    if len(q) < e.lanes:
                        return False
                    for k in range(e.lanes):
                        if q[k][0] != seq:
                            return False
                    take.append((i, e.lanes))
        # output space
        emit = []
        for i in self.outs[s]:
            e = g.edges[i]
            if inst not in e.insts:
                continue
            n = e.lanes if e.lanes > lanes else 1
            if len(self.fifo[i]) + self.reserved[i] + n > e.capacity:
                return False
            emit.append((i, n))
        # accept
        if entry:
            self.last_was_new = not from_fb
            if from_fb:
                self.feedback.popleft()
            else:
                self.issued.add(tid)
                if self.policy == "greedy":
                    heapq.heappop(self.ready)
                self.issue[tid] = t
                self.issue_order.append(tid)
            key = (self.next_seq, 0, tid, pas)
            self.next_seq += 1
        for i, n in take:
            for _ in range(n):
                self.fifo[i].popleft()
        for i, n in emit:
            self.reserved[i] += n
        cost = self.costs[s][pas]
        self.next_free[s] = t + cost.initiation_interval
        self.busy[s] += cost.initiation_interval
        self.acc[s] += 1
        if self.first[s] is None:
            self.first[s] = t
        self.last[s] = t
        self.last_ii[s] = cost.initiation_interval
        done = max(t + cost.latency, self.last_done[s])
        self.last_done[s] = done
        heapq.heappush(self.events, (done, self.counter, s, key, tuple(emit)))
        self.counter += 1
        heapq.heappush(self.timers, (self.next_free[s], s))
        for p in self.producers[s]:
            self._wake(p)
        return True

    def _wake(self, s):
        if s not in self.dirty_set:
            self.dirty_set.add(s)
            heapq.heappush(self.dirty, s)

    def _complete(self, t, s, key, emit):
        g = self.g
        seq, lane, tid, pas = key
        for i, n in emit:
            self.reserved[i] -= n
            q = self.fifo[i]
            if n == 1:
                q.append(key)
            else:
                for k in range(n):
                    q.append((seq, k, tid, pas))
            if len(q) > self.high[i]:
                self.high[i] = len(q)
            self._wake(g.edges[i].dst)
        if s == g.exit and pas == self.n_pass - 1:
            self.finish[tid] = t
            for succ in self.ts.successors(tid):
                self.remaining_deps[succ] -= 1
                if self.remaining_deps[succ] == 0:
                    heapq.heappush(self.ready, (-self.height[succ], succ))
            self._wake(g.entry)
        if self.fb_out[s]:
            self.feedback.append((None, tid, pas + 1))
            self._wake(g.entry)

    def run(self) -> TraceReport:
        g, ts = self.g, self.ts
        n_tasks = len(ts.tasks)
        self.events, self.timers, self.counter = [], [], 0
        self.dirty, self.dirty_set = [], set()
        self.feedback = deque()
        self.last_was_new = False
        self.issue, self.finish, self.issue_order = {}, {}, []
        self.next_seq, self.issued = 0, set()
        self.remaining_deps = {t.id: len(t.deps) for t in ts.tasks}
        self.order = sorted(self.remaining_deps)
        self.cursor = 0
        # greedy issues the eligible task with the longest chain still ahead of
        # it, lowest id first among equals
        self.height = {}
        for tid in reversed(topological_order(ts)):
            self.height[tid] = 1 + max((self.height[c] for c in ts.successors(tid)), default=0)
        self.ready = [(-self.height[tid], tid) for tid, d in self.remaining_deps.items() if d == 0]
        heapq.heapify(self.ready)
        t = 0
        self._wake(g.entry)
        while len(self.finish) < n_tasks:
            if t > self.max_cycles:
                raise RuntimeError(f"simulation exceeded {self.max_cycles} cycles")
            while self.events and self.events[0][0] == t:
                _, _, s, key, emit = heapq.heappop(self.events)
                self._complete(t, s, key, emit)
            while self.timers and self.timers[0][0] <= t:
                _, s = heapq.heappop(self.timers)
                self._wake(s)
            while self.dirty:
                s = heapq.heappop(self.dirty)
                self.dirty_set.discard(s)
                self._try(s, t)
            if len(self.finish) >= n_tasks:
                break
            nxt = []
            if self.events:
                nxt.append(self.events[0][0])
            if self.timers:
                nxt.append(self.timers[0][0])
            if not nxt:
                self._deadlock(t)
            t = min(nxt)
        names = [s.name for s in g.stages]
        return TraceReport(
            makespan=max(self.finish.values()) if self.finish else 0,
            issue=dict(self.issue),
            finish=dict(self.finish),
            busy={names[s]: self.busy[s] for s in range(len(names))},
            accepts={names[s]: self.acc[s] for s in range(len(names))},
            fifo_high_water={self._edge_name(i): self.high[i] for i in range(len(g.edges))},
            stage_ids={names[s]: s for s in range(len(names))},
            issue_order=list(self.issue_order),
            first_accept={names[s]: self.first[s] for s in range(len(names)) if self.first[s] is not None},
            last_accept={names[s]: self.last[s] for s in range(len(names)) if self.last[s] is not None},
            last_ii={names[s]: self.last_ii[s] for s in range(len(names)) if self.last[s] is not None},
        )

    def _edge_name(self, i):
        e = self.g.edges[i]
        return f"{self.g.stages[e.src].name}->{self.g.stages[e.dst].name}#{i}"

    def _deadlock(self, t):
        g = self.g
        fifos = [(self._edge_name(i), [tok[:2] for tok in q]) for i, q in enumerate(self.fifo) if q]
        blocked = []
        for s in range(len(g.stages)):
            waiting = any(self.fifo[i] for i in self.ins[s])
            if s == g.entry:
                waiting = waiting or bool(self.feedback) or self._has_new()
            if waiting:
                lanes = g.stages[s].lanes
                full = [self._edge_name(i) for i in self.outs[s]
                        if len(self.fifo[i]) + self.reserved[i] + (e.lanes if (e := g.edges[i]).lanes > lanes else 1)
                        > e.capacity]
                blocked.append(g.stages[s].name + (f" (output full: {', '.join(full)})" if full else ""))
        unfinished = len(self.ts.tasks) - len(self.finish)
        raise DeadlockError(t, fifos, blocked, unfinished)
