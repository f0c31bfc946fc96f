"""Per-branch task rates on the quadruped-with-arm, with each branch array run in isolation,
plus the Df/Db cost ratio of a 6-deep versus a 3-deep chain straight from the cost model."""
from __future__ import annotations

import argparse

from rbdpipe.model import JointType, branch_decompose, load_model
from rbdpipe.pipesim import PipelineConfig, branch_task_rates, cost_model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="quadruped_arm")
    ap.add_argument("--function", default="dID")
    ap.add_argument("--batch", type=int, default=256)
    ap.add_argument("--sim-config", help="pipeline config JSON (default: shipped calibration)")
    args = ap.parse_args()

    cfg = PipelineConfig.load(args.sim_config)
    m = load_model(args.model)
    layout = branch_decompose(m)
    rates = branch_task_rates(m, args.function, layout, cfg, args.batch)
    slowest = min(r.rate for r in rates)
    print(f"{'branch':<22} {'depth':>5} {'lanes':>5} {'II':>7} {'rate /kcycle':>13} {'vs slowest':>11}")
    for r in rates:
        names = ",".join(m.links[j].name for j in r.joints[:1]) + ("..." if len(r.joints) > 1 else "")
        print(f"{names:<22} {len(r.joints):>5} {r.lanes:>5} {r.ii:>7.2f} {1000 * r.rate:>13.2f} "
              f"{r.rate / slowest:>11.2f}")
    rev = JointType("revolute")
    for depth in (3, 6):
        ii = max(cost_model(rev, d, "Df", cfg).initiation_interval for d in range(1, depth + 1))
        print(f"revolute chain of {depth}: deepest Df initiation interval {ii}")


if __name__ == "__main__":
    main()
