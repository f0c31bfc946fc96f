"""Stage graphs for the round-trip (forward-backward) and backward-forward modules."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from ..dynamics.functions import FunctionId
from ..model.robot import RobotModel
from ..model.topology import BranchLayout, branch_decompose
from .costs import PipelineConfig, StageCost, StageKind, cost_model, pass_cost


@dataclass
class StageSpec:
    """One submodule.  ``costs`` maps each micro-instruction to its cost;
    ``lanes`` is the number of limbs time-multiplexed through the stage."""

    id: int
    kind: StageKind
    joint_id: int
    latency: int
    initiation_interval: int
    name: str = ""
    lanes: int = 1
    costs: dict[str, StageCost] = field(default_factory=dict)
    links: tuple[int, ...] = ()
    array: int = -1

    def cost(self, inst: str, config: PipelineConfig) -> StageCost:
        return self.costs.get(inst) or pass_cost(config)


@dataclass
class Edge:
    """FIFO between two stages.  ``lanes`` tokens per task travel on it;
    ``insts`` lists the micro-instructions routed along it."""

    src: int
    dst: int
    capacity: int
    kind: str = "data"  # data | bypass | feedback
    lanes: int = 1
    insts: frozenset = frozenset()


# micro-instruction sequence per function
INSTS = {
    FunctionId.ID: ("id",),
    FunctionId.FD: ("fd",),
    FunctionId.M: ("m",),
    FunctionId.MINV: ("minv",),
    FunctionId.DID: ("did",),
    FunctionId.DFD: ("fd", "did"),
    FunctionId.DIFD: ("difd",),
}
_R_INSTS = {"id", "fd", "did", "difd"}
_D_INSTS = {"did", "difd"}
_M_INSTS = {"fd", "m", "minv"}


@dataclass
class PipelineGraph:
    stages: list[StageSpec]
    edges: list[Edge]
    function_id: FunctionId
    insts: tuple[str, ...]
    config: PipelineConfig
    layout: BranchLayout | None = None
    entry: int = 0
    exit: int = -1

    @property
    def multiplex(self) -> dict[int, int]:
        return dict(self.layout.multiplexed) if self.layout else {}

    @property
    def branch_map(self) -> dict[int, list[int]]:
        out = defaultdict(list)
        for s in self.stages:
            out[s.array].append(s.id)
        return dict(out)

    def in_edges(self, s: int) -> list[int]:
        return self._adj()[0][s]

    def out_edges(self, s: int) -> list[int]:
        return self._adj()[1][s]

    def _adj(self):
        key = (len(self.stages), len(self.edges))
        if getattr(self, "_adj_key", None) != key:
            ins = [[] for _ in self.stages]
            outs = [[] for _ in self.stages]
            for i, e in enumerate(self.edges):
                outs[e.src].append(i)
                ins[e.dst].append(i)
            self._adj_cache = (ins, outs)
            self._adj_key = key
        return self._adj_cache

    def count(self, *kinds) -> int:
        kinds = {StageKind(k) for k in kinds}
        return sum(1 for s in self.stages if s.kind in kinds)

    def task_ii(self, s: StageSpec) -> int:
        """Cycles one task occupies stage ``s`` across all its passes."""
        seen = set()
        for i in self.in_edges(s.id):
            seen |= self.edges[i].insts
        if s.id == self.entry:
            seen = set(self.insts)
        return sum(s.cost(inst, self.config).initiation_interval * s.lanes for inst in self.insts if inst in seen)

    def bottleneck_ii(self) -> int:
        return max(self.task_ii(s) for s in self.stages)

    def bottleneck_stage(self) -> StageSpec:
        return max(self.stages, key=lambda s: (self.task_ii(s), -s.id))

    def validate(self):
        for s in self.stages:
            for c in s.costs.values():
                if not c.latency >= c.initiation_interval >= 1:
                    raise ValueError(f"stage {s.name}: needs latency >= initiation_interval >= 1")
        for e in self.edges:
            if e.capacity < e.lanes and e.kind != "feedback":
                raise ValueError(f"edge {self.stages[e.src].name}->{self.stages[e.dst].name}: "
                                 f"capacity {e.capacity} cannot hold {e.lanes} lanes")
        # acyclic once feedback edges are removed
        indeg = [0] * len(self.stages)
        for e in self.edges:
            if e.kind != "feedback":
                indeg[e.dst] += 1
        ready = [s.id for s in self.stages if indeg[s.id] == 0]
        seen = 0
        while ready:
            s = ready.pop()
            seen += 1
            for i in self.out_edges(s):
                e = self.edges[i]
                if e.kind != "feedback":
                    indeg[e.dst] -= 1
                    if indeg[e.dst] == 0:
                        ready.append(e.dst)
        if seen != len(self.stages):
            raise ValueError("pipeline graph has a cycle outside feedback edges")
        return self


class _Builder:
    def __init__(self, model, layout, function, config):
        self.model, self.layout, self.function, self.config = model, layout, function, config
        self.insts = INSTS[function]
        self.stages: list[StageSpec] = []
        self.edges: list[Edge] = []

    def stage(self, kind, name, joint=None, depth=1, insts=(), link=-1, lanes=1, links=(), array=-1):
        kind = StageKind(kind)
        costs = {}
        for inst in insts:
            costs[inst] = cost_model(joint, depth, kind, self.config)
        if kind is StageKind.TRIG:
            for inst in insts:
                c = costs[inst]
                ii = max(c.initiation_interval, self.config.source_ii)
                costs[inst] = StageCost(max(c.latency, ii), ii)
        first = costs[insts[0]] if insts else pass_cost(self.config)
        s = StageSpec(len(self.stages), kind, link, first.latency, first.initiation_interval, name, lanes, costs,
                      tuple(links), array)
        self.stages.append(s)
        return s.id

    def edge(self, src, dst, insts, kind="data", capacity=None, lanes=None):
        lanes = lanes or max(self.stages[src].lanes, 1)
        cap = capacity if capacity is not None else self.config.fifo_capacity
        self.edges.append(Edge(src, dst, max(cap, lanes) if kind != "feedback" else cap, kind, lanes,
                               frozenset(insts)))

    # ------------------------------------------------------------------
    def arrays(self):
        """Root array first, then branches: (positions, lanes, attach, instance links)."""
        L = self.layout
        out = []
        if L.root_joints:
            out.append((list(L.root_joints), 1, -1, [list(L.root_joints)]))
        for b, seq in enumerate(L.branches):
            out.append((list(seq), L.multiplexed[b], L.attach[b], [list(s) for s in L.instances[b]]))
        return out

    def fb_module(self, trig, r_insts, d_insts):
        """Forward-backward arrays.  Returns the stage feeding Schedule per inst set."""
        model, L = self.model, self.layout
        arrays = self.arrays()
        children_of = defaultdict(list)  # attach link -> array ids
        for a, (seq, _, attach, _) in enumerate(arrays):
            if a == 0 and L.root_joints:
                continue
            children_of[attach].append(a)
        use_d = bool(d_insts)
        rf, rb, df, db = {}, {}, {}, {}
        for a, (seq, lanes, attach, inst) in enumerate(arrays):
            for j, link in enumerate(seq):
                joint = model.joint_of(link)
                links = tuple(s[j] for s in inst)
                nm = model.links[link].name + ("" if lanes == 1 else f"x{lanes}")
                rf[link] = self.stage("Rf", f"Rf[{nm}]", joint, j + 1, r_insts, link, lanes, links, a)
                if use_d:
                    df[link] = self.stage("Df", f"Df[{nm}]", joint, j + 1, d_insts, link, lanes, links, a)
                    db[link] = self.stage("Db", f"Db[{nm}]", joint, j + 1, d_insts, link, lanes, links, a)
                rb[link] = self.stage("Rb", f"Rb[{nm}]", joint, j + 1, r_insts, link, lanes, links, a)
        # fan-out points: world (-1) and every link with child arrays
        fan = {}
        for at, kids in children_of.items():
            if at == -1 and len(kids) == 1:
                continue
            nm = "world" if at < 0 else model.links[at].name
            fan[at] = {
                "bR": self.stage("Broadcast", f"Broadcast_R[{nm}]", insts=r_insts),
                "rR": self.stage("Reduce", f"Reduce_R[{nm}]", insts=r_insts),
            }
            if use_d:
                # At the world there is no parent Df to copy; each top Df reads its own Rf.
                if at != -1:
                    fan[at]["bD"] = self.stage("Broadcast", f"Broadcast_D[{nm}]", insts=d_insts)
                fan[at]["rD"] = self.stage("Reduce", f"Reduce_D[{nm}]", insts=d_insts)

        for a, (seq, lanes, attach, inst) in enumerate(arrays):
            first = seq[0]
            # entry of the array
            if attach == -1:
                if -1 in fan:
                    self.edge(fan[-1]["bR"], rf[first], r_insts, lanes=lanes)
                else:
                    self.edge(trig, rf[first], r_insts)
            else:
                at = attach
                self.edge(fan[at]["bR"] if at in fan else rf[at], rf[first], r_insts, lanes=lanes)
                if use_d:
                    self.edge(fan[at]["bD"] if at in fan else df[at], df[first], d_insts, lanes=lanes)
            for j, link in enumerate(seq):
                nxt = seq[j + 1] if j + 1 < len(seq) else None
                has_kids = link in children_of
                if nxt is not None:
                    self.edge(rf[link], rf[nxt], r_insts)
                    self.edge(rb[nxt], rb[link], r_insts)
                    if use_d:
                        self.edge(df[link], df[nxt], d_insts)
                        self.edge(db[nxt], db[link], d_insts)
                if nxt is None and not has_kids:
                    self.edge(rf[link], rb[link], r_insts)
                    if use_d:
                        self.edge(df[link], db[link], d_insts)
                else:
                    self.edge(rf[link], rb[link], r_insts, kind="bypass")
                    if use_d:
                        self.edge(df[link], db[link], d_insts, kind="bypass")
                if use_d:
                    self.edge(rf[link], df[link], d_insts)
                    self.edge(rb[link], db[link], d_insts)
                if has_kids:
                    kids = children_of[link]
                    if link in fan:
                        self.edge(rf[link], fan[link]["bR"], r_insts)
                        self.edge(fan[link]["rR"], rb[link], r_insts)
                        if use_d:
                            self.edge(df[link], fan[link]["bD"], d_insts)
                            self.edge(fan[link]["rD"], db[link], d_insts)
                    for k in kids:
                        kseq, klanes = arrays[k][0], arrays[k][1]
                        kfirst = kseq[0]
                        self.edge(rb[kfirst], fan[link]["rR"] if link in fan else rb[link], r_insts, lanes=klanes)
                        if use_d:
                            self.edge(db[kfirst], fan[link]["rD"] if link in fan else db[link], d_insts,
                                      lanes=klanes)
        # world-level fan-out
        tops = [a for a, arr in enumerate(arrays) if arr[2] == -1]
        if -1 in fan:
            self.edge(trig, fan[-1]["bR"], r_insts)
            for a in tops:
                self.edge(rb[arrays[a][0][0]], fan[-1]["rR"], r_insts, lanes=arrays[a][1])
                if use_d:
                    self.edge(db[arrays[a][0][0]], fan[-1]["rD"], d_insts, lanes=arrays[a][1])
            exit_r, exit_d = fan[-1]["rR"], fan[-1].get("rD")
        else:
            (a,) = tops
            first = arrays[a][0][0]
            exit_r, exit_d = rb[first], db.get(first)
        return exit_r, exit_d

    def bf_module(self, trig, insts):
        """Backward-forward arrays (Mb leaves-to-root, then Mf root-to-leaves)."""
        model = self.model
        arrays = self.arrays()
        children_of = defaultdict(list)
        for a, (seq, _, attach, _) in enumerate(arrays):
            if a == 0 and self.layout.root_joints:
                continue
            children_of[attach].append(a)
        mb, mf = {}, {}
        for a, (seq, lanes, attach, inst) in enumerate(arrays):
            for j, link in enumerate(seq):
                joint = model.joint_of(link)
                links = tuple(s[j] for s in inst)
                nm = model.links[link].name + ("" if lanes == 1 else f"x{lanes}")
                mb[link] = self.stage("Mb", f"Mb[{nm}]", joint, j + 1, insts, link, lanes, links, a)
                mf[link] = self.stage("Mf", f"Mf[{nm}]", joint, j + 1, insts, link, lanes, links, a)
        mb0 = self.stage("Mb", "Mb[0]", None, 1, insts)
        mf0 = self.stage("Mf", "Mf[0]", None, 1, insts)
        leaves = [a for a, (seq, _, _, _) in enumerate(arrays) if seq[-1] not in children_of]
        bcast = self.stage("Broadcast", "Broadcast_M[input]", insts=insts)
        gather = self.stage("Reduce", "Reduce_M[output]", insts=insts)
        self.edge(trig, bcast, insts)
        fan_b, fan_f = {}, {}
        for at, kids in children_of.items():
            if len(kids) > 1 or any(arrays[k][1] > 1 for k in kids):
                nm = "world" if at < 0 else model.links[at].name
                fan_b[at] = self.stage("Reduce", f"Reduce_M[{nm}]", insts=insts)
                fan_f[at] = self.stage("Broadcast", f"Broadcast_M[{nm}]", insts=insts)
        for a in leaves:
            seq, lanes = arrays[a][0], arrays[a][1]
            self.edge(bcast, mb[seq[-1]], insts, lanes=lanes)
            self.edge(mf[seq[-1]], gather, insts, lanes=lanes)
        for a, (seq, lanes, attach, _) in enumerate(arrays):
            for j in range(len(seq) - 1):
                self.edge(mb[seq[j + 1]], mb[seq[j]], insts)
                self.edge(mf[seq[j]], mf[seq[j + 1]], insts)
            for link in seq:
                self.edge(mb[link], mf[link], insts, kind="bypass")
        for at, kids in children_of.items():
            up_b = mb0 if at < 0 else mb[at]
            down_f = mf0 if at < 0 else mf[at]
            if at in fan_b:
                self.edge(fan_b[at], up_b, insts)
                self.edge(down_f, fan_f[at], insts)
            for k in kids:
                kfirst, klanes = arrays[k][0][0], arrays[k][1]
                self.edge(mb[kfirst], fan_b.get(at, up_b), insts, lanes=klanes)
                self.edge(fan_f.get(at, down_f), mf[kfirst], insts, lanes=klanes)
        if self.layout.root_joints:
            r = self.layout.root_joints[0]
            self.edge(mb[r], mb0, insts)
            self.edge(mf0, mf[r], insts)
        self.edge(mb0, mf0, insts)
        return gather

    def size_fifos(self):
        """Give every FIFO room for what its producer can emit while the
        consumer is still waiting on its other inputs.

        A plain edge must cover the producer's in-flight tokens, since space is
        reserved at accept.  A bypass must also cover every token produced
        while the skipped path is busy.
        """
        n = len(self.stages)
        outs = defaultdict(list)
        for e in self.edges:
            if e.kind != "feedback":
                outs[e.src].append(e)
        order = _topo(n, self.edges)
        lat = [max((c.latency for c in s.costs.values()), default=self.config.pass_latency) for s in self.stages]
        ii = [min((c.initiation_interval for c in s.costs.values()), default=self.config.pass_ii)
              for s in self.stages]
        for e in self.edges:
            if e.kind == "feedback":
                continue
            span = lat[e.src]
            if e.kind == "bypass":
                # longest latency from src to dst avoiding this edge
                best = {e.src: 0}
                for s in order:
                    if s not in best:
                        continue
                    for f in outs[s]:
                        if f is e:
                            continue
                        d = best[s] + lat[s]
                        if d > best.get(f.dst, -1):
                            best[f.dst] = d
                span = max(span, best.get(e.dst, span))
            need = (-(-span // ii[e.src]) + 1) * e.lanes
            e.capacity = max(e.capacity, need)


def _topo(n, edges):
    indeg = [0] * n
    outs = defaultdict(list)
    for e in edges:
        if e.kind != "feedback":
            indeg[e.dst] += 1
            outs[e.src].append(e.dst)
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    order = []
    while ready:
        s = ready.pop(0)
        order.append(s)
        for d in outs[s]:
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append(d)
    return order


def build_pipeline(model: RobotModel, layout: BranchLayout | None = None,
                   function: FunctionId | str = FunctionId.ID, config: PipelineConfig | None = None) -> PipelineGraph:
    """Stage graph for ``function`` laid out along ``layout``'s root and branch arrays."""
    try:
        function = function if isinstance(function, FunctionId) else FunctionId.parse(function)
    except ValueError as exc:
        raise ValueError(f"unsupported function: {exc}") from None
    config = config or PipelineConfig.load()
    layout = layout or branch_decompose(model)
    b = _Builder(model, layout, function, config)
    insts = INSTS[function]
    trig = b.stage("Trig", "Trig", insts=insts)
    sched = None
    feeds = []
    r_insts = tuple(i for i in insts if i in _R_INSTS)
    d_insts = tuple(i for i in insts if i in _D_INSTS)
    m_insts = tuple(i for i in insts if i in _M_INSTS)
    if r_insts:
        exit_r, exit_d = b.fb_module(trig, r_insts, d_insts)
        r_only = tuple(i for i in r_insts if i not in d_insts)
        if r_only:
            feeds.append((exit_r, r_only))
        if d_insts:
            feeds.append((exit_d, d_insts))
    if m_insts:
        feeds.append((b.bf_module(trig, m_insts), m_insts))
    sched = b.stage("Schedule", "Schedule", insts=insts)
    for src, ins in feeds:
        b.edge(src, sched, ins)
    if len(insts) > 1:
        fb = b.stage("Feedback", "Feedback", insts=insts[:-1])
        b.edge(sched, fb, insts[:-1])
        # Feedback writes back into the input stream; modelled as an unbounded queue.
        b.edge(fb, trig, insts[1:], kind="feedback", capacity=0)
    b.size_fifos()
    g = PipelineGraph(b.stages, b.edges, function, insts, config, layout, entry=trig, exit=sched)
    return g.validate()


def build_branch_pipeline(model: RobotModel, seq, function: FunctionId | str = FunctionId.DID,
                          config: PipelineConfig | None = None) -> PipelineGraph:
    """A lone serial array for the joints ``seq`` (one lane), for per-branch rate measurements."""
    function = function if isinstance(function, FunctionId) else FunctionId.parse(function)
    seq = tuple(seq)
    layout = BranchLayout(root_joints=(), branches=[seq], instances=[[seq]], multiplexed={0: 1}, attach=[-1])
    return build_pipeline(model, layout, function, config)


def chain_pipeline(costs, capacity: int = 2, config: PipelineConfig | None = None) -> PipelineGraph:
    """A bare serial chain with the given ``(latency, initiation_interval)``
    per stage; the first stage is the entry and the last the exit."""
    config = config or PipelineConfig()
    costs = [StageCost(int(lat), int(ii)) for lat, ii in costs]
    if not costs:
        raise ValueError("a chain needs at least one stage")
    n = len(costs)
    stages = []
    for i, c in enumerate(costs):
        kind = StageKind.TRIG if i == 0 else StageKind.SCHEDULE if i == n - 1 else StageKind.RF
        stages.append(StageSpec(i, kind, -1, c.latency, c.initiation_interval, f"S{i}", costs={"id": c}))
    edges = [Edge(i, i + 1, capacity, insts=frozenset({"id"})) for i in range(n - 1)]
    return PipelineGraph(stages, edges, FunctionId.ID, ("id",), config, None, entry=0, exit=n - 1).validate()
