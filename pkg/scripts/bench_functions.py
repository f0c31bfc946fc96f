"""Wall-clock latency and batch throughput of every function on every shipped model."""
from __future__ import annotations

import argparse
import time

import numpy as np

from rbdpipe.dynamics import FunctionId, batch_evaluate, evaluate, random_states
from rbdpipe.model import load_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--batch", type=int, default=256)
    ap.add_argument("--single", type=int, default=64, help="states timed one at a time")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    print(f"{'model':<14} {'function':<6} {'latency us':>11} {'1/latency /s':>13} {'batch /s':>10} {'speedup':>8}")
    for name in ("iiwa", "quadruped_arm", "humanoid"):
        m = load_model(name)
        for f in FunctionId:
            states = random_states(m, args.batch, 0, function=f)
            evaluate(m, f, states[0])
            single = []
            for _ in range(args.repeats):
                for st in states[: args.single]:
                    t0 = time.perf_counter()
                    evaluate(m, f, st)
                    single.append(time.perf_counter() - t0)
            batched = []
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                batch_evaluate(m, f, states, threads=args.threads)
                batched.append(time.perf_counter() - t0)
            lat = float(np.mean(single))
            thr = args.batch / float(np.mean(batched))
            print(f"{name:<14} {f.value:<6} {lat * 1e6:>11.1f} {1 / lat:>13.0f} {thr:>10.0f} {thr * lat:>8.1f}")


if __name__ == "__main__":
    main()
