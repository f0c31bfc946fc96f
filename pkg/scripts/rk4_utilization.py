"""Bottleneck utilization of RK4 dependency chains under greedy and strict in-order issue."""
from __future__ import annotations

import argparse

from rbdpipe.dynamics import FunctionId
from rbdpipe.model import load_model
from rbdpipe.pipesim import TaskSet, build_pipeline, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=64)
    args = ap.parse_args()

    ts = TaskSet.rk4_chains(args.points)
    print(f"{'model':<14} {'function':<6} {'bottleneck':<24} {'greedy':>7} {'steady':>7} {'in-order':>9} "
          f"{'makespan g/i':>15}")
    for name in ("iiwa", "quadruped_arm", "humanoid"):
        m = load_model(name)
        for f in FunctionId:
            g = build_pipeline(m, function=f)
            b = g.bottleneck_stage().name
            gr, io = simulate(g, ts, "greedy"), simulate(g, ts, "in_order")
            print(f"{name:<14} {f.value:<6} {b:<24} {gr.utilization(b):>7.3f} {gr.steady_utilization(b):>7.3f} "
                  f"{io.utilization(b):>9.3f} {gr.makespan:>7}/{io.makespan:<7}")


if __name__ == "__main__":
    main()
