"""``rbdpipe`` command line: compute, bench, simulate, check."""
from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

import numpy as np

from . import checks, io
from .dynamics import FunctionId, TaskError, batch_evaluate, dfd, evaluate, mminv_gen, random_states
from .dynamics.batch import _stack
from .model import ModelError, RootMode, load_model, reroot, split_root
from .pipesim import PipelineConfig, TaskSet, build_pipeline, simulate, summary_text, write_jsonl


class UsageError(Exception):
    pass


def _function(name) -> FunctionId:
    try:
        return FunctionId.parse(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _model(args):
    model = load_model(args.model)
    if getattr(args, "root_mode", None):
        model = model.with_root_mode(args.root_mode)
    return model


def _states(args, model, function):
    if args.states and args.seed_given:
        raise UsageError("give either --states or --seed, not both")
    if args.states:
        states = io.read_states(args.states, function)
        if not states:
            raise UsageError(f"{args.states}: no states")
        return states
    return random_states(model, args.batch, args.seed, function=function)


def _check_flags(function, out_m, out_minv):
    if out_minv and function not in (FunctionId.M, FunctionId.MINV, FunctionId.DFD):
        raise UsageError("--out-minv applies to M, Minv and dFD only")
    if out_m and function not in (FunctionId.M, FunctionId.MINV):
        raise UsageError("--out-m applies to M and Minv only")


def _evaluate(model, function, states, out_m, out_minv, threads=None):
    if function in (FunctionId.M, FunctionId.MINV) and (out_m or out_minv):
        want_m = out_m or function is FunctionId.M
        want_minv = out_minv or function is FunctionId.MINV
        q = _stack(states, model.n_dof, model.n_bodies).q
        M, Minv = mminv_gen(model, q, want_m, want_minv)
        out = []
        for i in range(len(states)):
            rec = {}
            if M is not None:
                rec["M"] = M[i]
            if Minv is not None:
                rec["Minv"] = Minv[i]
            out.append(rec)
        return out
    if function is FunctionId.DFD and out_minv:
        out = []
        for i, st in enumerate(states):
            try:
                blocks, Minv = dfd(model, st.q, st.qd, st.qdd_or_tau, st.f_ext, out_minv=True)
                out.append({"d_dq": blocks.d_dq, "d_dqd": blocks.d_dqd, "Minv": Minv})
            except Exception as exc:
                out.append(TaskError(i, exc))
        return out
    return batch_evaluate(model, function, states, threads=threads)


def cmd_compute(args) -> int:
    model = _model(args)
    function = args.function
    _check_flags(function, args.out_m, args.out_minv)
    states = _states(args, model, function)
    results = _evaluate(model, function, states, args.out_m, args.out_minv, args.threads)
    failed = 0
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for i, res in enumerate(results):
            failed += isinstance(res, TaskError)
            out.write(json.dumps(io.result_to_record(i, function, res)) + "\n")
    finally:
        if args.out:
            out.close()
    if failed:
        print(f"rbdpipe: {failed} of {len(results)} tasks failed", file=sys.stderr)
        return 1
    if args.out:
        print(f"wrote {len(results)} {function.value} results to {args.out}", file=sys.stderr)
    return 0


def _percentiles(xs):
    a = np.asarray(xs)
    return {"mean": float(a.mean()), "p50": float(np.percentile(a, 50)), "p90": float(np.percentile(a, 90)),
            "p99": float(np.percentile(a, 99))}


def cmd_bench(args) -> int:
    model = _model(args)
    function = args.function
    states = _states(args, model, function)
    batch = len(states)
    evaluate(model, function, states[0])  # warm caches
    single = []
    for _ in range(args.repeats):
        for st in states[: args.single]:
            t0 = time.perf_counter()
            evaluate(model, function, st)
            single.append(time.perf_counter() - t0)
    batched = []
    for _ in range(args.repeats):
        t0 = time.perf_counter()
        res = batch_evaluate(model, function, states, threads=args.threads)
        batched.append(time.perf_counter() - t0)
    errors = sum(isinstance(r, TaskError) for r in res)
    lat = _percentiles(single)
    mean_batch = statistics.fmean(batched)
    report = {
        "model": model.name,
        "function": function.value,
        "batch": batch,
        "repeats": args.repeats,
        "single_latency_s": lat,
        "single_throughput_per_s": 1.0 / lat["mean"],
        "batch_time_s": _percentiles(batched),
        "batch_throughput_per_s": batch / mean_batch,
        "errors": errors,
    }
    text = json.dumps(report, indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return 1 if errors else 0


def _layout_model(args, model):
    if args.reroot:
        model = reroot(model, args.reroot).model
    if args.split_root:
        model = split_root(model)
    return model


def cmd_simulate(args) -> int:
    model = _layout_model(args, _model(args))
    config = PipelineConfig.load(args.sim_config) if args.sim_config else PipelineConfig.load()
    graph = build_pipeline(model, function=args.function, config=config)
    if args.deps == "rk4":
        if args.batch % 4:
            raise UsageError("--deps rk4 needs --batch divisible by 4")
        taskset = TaskSet.rk4_chains(args.batch // 4)
    else:
        taskset = TaskSet.independent(args.batch)
    trace = simulate(graph, taskset, args.policy)
    print(f"model {model.name}  function {args.function.value}  stages {len(graph.stages)}  "
          f"bottleneck {graph.bottleneck_stage().name} (II {graph.bottleneck_ii()})")
    print(summary_text(trace))
    if args.out:
        with open(args.out, "w") as fh:
            write_jsonl(trace, fh)
    return 0


def cmd_check(args) -> int:
    model = _model(args)
    results = checks.run_checks(model, args.count, args.seed)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed" + (f"; failed: {', '.join(failed)}"
                                                                            if failed else ""))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rbdpipe", description="Rigid-body dynamics kernels and pipeline simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, function=True):
        sp.add_argument("--model", required=True, help="shipped model name or path to a model JSON file")
        sp.add_argument("--root-mode", choices=[m.value for m in RootMode], help="override the model's root mode")
        if function:
            sp.add_argument("--function", required=True, type=_function, help="ID, FD, M, Minv, dID, dFD or diFD")

    def states(sp):
        sp.add_argument("--batch", type=_positive, default=256, help="number of random states (default 256)")
        sp.add_argument("--seed", type=int, default=None, help="RNG seed for random states (default 0)")
        sp.add_argument("--states", help="JSON-lines state file instead of random states")
        sp.add_argument("--threads", type=_positive, default=None, help="worker threads (default from env)")

    c = sub.add_parser("compute", help="evaluate a function over a batch of states")
    common(c)
    states(c)
    c.add_argument("--out-m", action="store_true", help="also emit M (M / Minv)")
    c.add_argument("--out-minv", action="store_true", help="also emit Minv (M / Minv / dFD)")
    c.add_argument("--out", help="result file (JSON lines); stdout if omitted")
    c.set_defaults(run=cmd_compute)

    b = sub.add_parser("bench", help="time single-task latency and batch throughput")
    common(b)
    states(b)
    b.add_argument("--repeats", type=_positive, default=5)
    b.add_argument("--single", type=_positive, default=32, help="states timed one by one per repeat")
    b.add_argument("--out", help="write the timing report (JSON) here")
    b.set_defaults(run=cmd_bench)

    s = sub.add_parser("simulate", help="run a task stream through the pipeline model")
    common(s)
    s.add_argument("--batch", type=_positive, default=256)
    s.add_argument("--deps", choices=("none", "rk4"), default="none")
    s.add_argument("--policy", choices=("greedy", "in_order"), default=None)
    s.add_argument("--sim-config", help="pipeline config JSON (default: shipped calibration)")
    s.add_argument("--reroot", metavar="LINK", help="re-root the tree at LINK before laying out")
    s.add_argument("--split-root", action="store_true", help="split a 6-DOF root into single-axis joints")
    s.add_argument("--out", help="trace records (JSON lines)")
    s.set_defaults(run=cmd_simulate)

    k = sub.add_parser("check", help="run the invariant suite on a model")
    common(k, function=False)
    k.add_argument("--count", type=_positive, default=20, help="random states per check")
    k.add_argument("--seed", type=int, default=0)
    k.set_defaults(run=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "states"):
        args.seed_given = args.seed is not None
        args.seed = 0 if args.seed is None else args.seed
    try:
        return args.run(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ModelError, io.InputError, ValueError, OSError) as exc:
        print(f"rbdpipe: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
