"""`route` command line: drive the whole pipeline from graph files and traces."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import RoutingError
from .expanders import (
    check_expansion_exhaustive,
    estimate_second_eigenvalue,
    gen_random_regular_digraph,
    gen_random_regular_graph,
)
from .graph import UndirectedGraph, format_graph, load_graph, save_graph
from .harness import format_trace, gen_workload, load_trace, parse_trace, run_trace
from .preprocess import pre_process
from .profiles import derive_profile, desk_profile, format_profile, load_profile
from .router import RoutingEngine


def _load_router_profile(args, g=None):
    if getattr(args, "profile", None):
        return load_profile(args.profile)
    if getattr(args, "desk", False):
        if g is None:
            raise RoutingError("--desk needs a graph to derive n and d from")
        d = g.regularity()
        if d is None:
            raise RoutingError("--desk needs a regular graph")
        return desk_profile(g.n, d)
    raise RoutingError("pass --profile FILE or --desk")


def cmd_run(args):
    g = load_graph(args.graph)
    if not isinstance(g, UndirectedGraph):
        raise RoutingError("run expects an undirected graph file")
    profile = _load_router_profile(args, g)
    if args.trace == "-":
        commands = parse_trace(sys.stdin.read())
    else:
        commands = load_trace(args.trace)
    engine = RoutingEngine(g, profile)
    emit = None if args.quiet else lambda line: print(line)
    report = run_trace(
        engine,
        commands,
        verify_every=args.verify_every,
        stop_on_failure=args.stop_on_failure,
        emit=emit,
    )
    if args.json:
        with open(args.json, "w", encoding="ascii") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(report.format_text(), end="")
    return 0 if report.clean else 1


def cmd_gen_workload(args):
    g = load_graph(args.graph)
    profile = _load_router_profile(args, g)
    params = {}
    if args.ops is not None:
        params["ops"] = args.ops
    if args.count is not None:
        params["count"] = args.count
    if args.live_target is not None:
        params["live_target"] = args.live_target
    commands = gen_workload(
        args.kind, g.n, params, args.seed, profile.endpoint_cap, profile.r
    )
    text = format_trace(commands)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    return 0


def cmd_preprocess(args):
    g = load_graph(args.graph)
    if not isinstance(g, UndirectedGraph):
        raise RoutingError("preprocess expects an undirected graph file")
    profile = None
    if args.profile or args.desk:
        profile = _load_router_profile(args, g)
    split = pre_process(g, profile)
    prefix = args.outprefix
    save_graph(prefix + ".host", split.host)
    save_graph(prefix + ".g1", split.g1)
    save_graph(prefix + ".g2", split.g2)
    save_graph(prefix + ".g3", split.g3)
    with open(prefix + ".header", "w", encoding="ascii") as fh:
        fh.write(
            "n=%d\nd=%d\nk=%d\nd_prime=%d\n" % (g.n, g.regularity(), split.k, split.d_prime)
        )
    print("wrote %s.{host,g1,g2,g3,header}" % prefix)
    return 0


def cmd_gen(args):
    if args.kind == "graph":
        g = gen_random_regular_graph(args.n, args.d, args.seed)
    else:
        g = gen_random_regular_digraph(args.n, args.d, args.seed)
    if args.out == "-":
        sys.stdout.write(format_graph(g))
    else:
        save_graph(args.out, g)
    return 0


def cmd_check_expansion(args):
    g = load_graph(args.graph)
    report = check_expansion_exhaustive(g, args.beta, args.gamma, args.max_subset_size)
    payload = report.to_dict()
    if args.json:
        with open(args.json, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(json.dumps(payload, sort_keys=True))
    return 0 if report.holds else 1


def cmd_spectrum(args):
    g = load_graph(args.graph)
    if not isinstance(g, UndirectedGraph):
        raise RoutingError("spectrum expects an undirected graph file")
    report = estimate_second_eigenvalue(g, max_iters=args.max_iters, tol=args.tol)
    payload = report.to_dict()
    if args.json:
        with open(args.json, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(json.dumps(payload, sort_keys=True))
    return 0 if report.converged else 1


def cmd_profile(args):
    if args.desk:
        profile = desk_profile(args.n, args.d)
    else:
        profile = derive_profile(args.n, args.d, args.beta, args.gamma, relaxed=args.relaxed)
    text = format_profile(profile)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="route", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a trace against a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--trace", required=True, help="trace file or - for stdin")
    p.add_argument("--profile")
    p.add_argument("--desk", action="store_true", help="use the tuned desk-scale profile")
    p.add_argument("--verify-every", type=int, default=0, metavar="K")
    p.add_argument("--stop-on-failure", action="store_true")
    p.add_argument("--json", help="write the report as JSON here")
    p.add_argument("--quiet", action="store_true", help="suppress per-path output")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen-workload", help="generate a rule-respecting trace")
    p.add_argument("--graph", required=True)
    p.add_argument("--profile")
    p.add_argument("--desk", action="store_true")
    p.add_argument("--kind", required=True, choices=["churn", "fill", "hotspot"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--ops", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--live-target", type=int)
    p.add_argument("--out", required=True, help="output file or -")
    p.set_defaults(func=cmd_gen_workload)

    p = sub.add_parser("preprocess", help="orient and split an undirected expander")
    p.add_argument("graph")
    p.add_argument("outprefix")
    p.add_argument("--profile")
    p.add_argument("--desk", action="store_true")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("gen", help="generate a random regular (di)graph")
    p.add_argument("--kind", choices=["graph", "digraph"], default="graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output file or -")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check-expansion", help="exhaustive small-subset density check")
    p.add_argument("--graph", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--max-subset-size", type=int, required=True)
    p.add_argument("--json")
    p.set_defaults(func=cmd_check_expansion)

    p = sub.add_parser("spectrum", help="estimate the second adjacency eigenvalue")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--json")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("profile", help="derive a constants profile")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--beta", default="1/100")
    p.add_argument("--gamma", default="1/2000")
    p.add_argument("--relaxed", action="store_true")
    p.add_argument("--desk", action="store_true")
    p.add_argument("--out", required=True, help="output file or -")
    p.set_defaults(func=cmd_profile)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RoutingError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
