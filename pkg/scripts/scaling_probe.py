#!/usr/bin/env python3
"""Median per-request cost as the graph grows at fixed degree.

Example:
    python scripts/scaling_probe.py --d 30 --sizes 300 600 1200 --ops 300
"""

import argparse
import statistics
import sys
import time

from expander_routing.expanders import gen_random_regular_graph
from expander_routing.harness import gen_workload
from expander_routing.profiles import desk_profile
from expander_routing.router import RoutingEngine


def probe(n, d, ops, graph_seed, trace_seed):
    g = gen_random_regular_graph(n, d, seed=graph_seed)
    profile = desk_profile(n, d)
    commands = gen_workload(
        "churn", n, {"ops": ops, "live_target": profile.r // 2},
        trace_seed, profile.endpoint_cap, profile.r,
    )
    build_start = time.perf_counter()
    engine = RoutingEngine(g, profile)
    build = time.perf_counter() - build_start
    times = []
    for cmd in commands:
        t0 = time.perf_counter()
        if cmd.kind == "find":
            engine.find_path(cmd.a, cmd.b)
        else:
            engine.remove_path(cmd.ref)
        times.append(time.perf_counter() - t0)
    return build, statistics.median(times), max(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=30)
    ap.add_argument("--sizes", type=int, nargs="+", default=[300, 600, 1200])
    ap.add_argument("--ops", type=int, default=300)
    ap.add_argument("--graph-seed", type=int, default=11)
    ap.add_argument("--trace-seed", type=int, default=17)
    args = ap.parse_args()

    base = None
    for n in args.sizes:
        build, median, worst = probe(n, args.d, args.ops, args.graph_seed, args.trace_seed)
        ratio = "" if base is None else "  x%.2f vs n=%d" % (median / base[1], base[0])
        if base is None:
            base = (n, median)
        print(
            "n=%5d  build %6.2fs  median request %.6fs  max %.6fs%s"
            % (n, build, median, worst, ratio)
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
