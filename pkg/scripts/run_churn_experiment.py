#!/usr/bin/env python3
"""Generate a random regular expander, churn paths through it, report.

Example:
    python scripts/run_churn_experiment.py --n 600 --d 30 --ops 2000 --verify-every 1
"""

import argparse
import json
import sys

from expander_routing.expanders import gen_random_regular_graph
from expander_routing.harness import gen_workload, run_trace
from expander_routing.profiles import desk_profile
from expander_routing.router import RoutingEngine


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=600)
    ap.add_argument("--d", type=int, default=30)
    ap.add_argument("--graph-seed", type=int, default=11)
    ap.add_argument("--trace-seed", type=int, default=7)
    ap.add_argument("--ops", type=int, default=2000)
    ap.add_argument("--live-target", type=int, default=None)
    ap.add_argument("--verify-every", type=int, default=0)
    ap.add_argument("--json", help="dump the report as JSON here")
    ap.add_argument("--paths", action="store_true", help="print every found path")
    args = ap.parse_args()

    g = gen_random_regular_graph(args.n, args.d, seed=args.graph_seed)
    profile = desk_profile(args.n, args.d)
    live_target = args.live_target if args.live_target is not None else profile.r // 2
    commands = gen_workload(
        "churn",
        args.n,
        {"ops": args.ops, "live_target": live_target},
        args.trace_seed,
        profile.endpoint_cap,
        profile.r,
    )
    engine = RoutingEngine(g, profile)
    emit = print if args.paths else None
    report = run_trace(engine, commands, verify_every=args.verify_every, emit=emit)
    print(report.format_text(), end="")
    final = engine.verify()
    print("final verification:", "clean" if final.ok else final.findings[:3])
    if args.json:
        with open(args.json, "w", encoding="ascii") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if report.clean and final.ok else 1


if __name__ == "__main__":
    sys.exit(main())
