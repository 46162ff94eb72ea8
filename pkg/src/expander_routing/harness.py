"""Trace format, workload generators and the sequential game driver.

Traces are line oriented: `find <a> <b>`, `remove <ref>`, `verify`,
`stats`; blank lines and `#` comments are skipped. A remove ref is a
path id, or a negative index counting back through the currently live
paths (-1 = most recent). Commands run strictly in order; find/remove
failures are recorded per command with their class (caller-error vs
expansion-violation) and the run keeps going unless asked to stop.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .errors import CallerError, ExpansionViolation, FormatError
from .router import RoutingEngine


@dataclass(frozen=True)
class TraceCommand:
    kind: str           # "find" | "remove" | "verify" | "stats"
    a: int = -1
    b: int = -1
    ref: int = 0
    line: int = 0

    def text(self):
        if self.kind == "find":
            return "find %d %d" % (self.a, self.b)
        if self.kind == "remove":
            return "remove %d" % self.ref
        return self.kind


def parse_trace(text):
    commands = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        word = parts[0].lower()
        try:
            if word == "find":
                if len(parts) != 3:
                    raise ValueError("find takes two vertex arguments")
                commands.append(
                    TraceCommand("find", a=int(parts[1]), b=int(parts[2]), line=lineno)
                )
            elif word == "remove":
                if len(parts) != 2:
                    raise ValueError("remove takes one reference argument")
                commands.append(TraceCommand("remove", ref=int(parts[1]), line=lineno))
            elif word in ("verify", "stats"):
                if len(parts) != 1:
                    raise ValueError("%s takes no arguments" % word)
                commands.append(TraceCommand(word, line=lineno))
            else:
                raise ValueError("unknown command %r" % word)
        except ValueError as exc:
            raise FormatError("trace line %d: %s" % (lineno, exc)) from None
    return commands


def format_trace(commands):
    return "\n".join(c.text() for c in commands) + ("\n" if commands else "")


def load_trace(path):
    with open(path, "r", encoding="ascii") as fh:
        return parse_trace(fh.read())


def save_trace(path, commands):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_trace(commands))


@dataclass
class RunReport:
    requests_served: int = 0
    failures: list = field(default_factory=list)   # (line, error class, message)
    path_length_histogram: dict = field(default_factory=dict)
    oracle_call_counts: dict = field(default_factory=dict)
    wall_clock: dict = field(default_factory=dict)  # percentiles over request seconds
    verify_findings: int = 0
    verifies_run: int = 0

    @property
    def clean(self):
        return not self.failures and self.verify_findings == 0

    def to_dict(self):
        return {
            "requests_served": self.requests_served,
            "failures": [list(f) for f in self.failures],
            "path_length_histogram": {str(k): v for k, v in sorted(self.path_length_histogram.items())},
            "oracle_call_counts": self.oracle_call_counts,
            "wall_clock": self.wall_clock,
            "verify_findings": self.verify_findings,
            "verifies_run": self.verifies_run,
        }

    def format_text(self):
        lines = [
            "requests served: %d" % self.requests_served,
            "failures: %d" % len(self.failures),
        ]
        for line, cls, msg in self.failures[:10]:
            lines.append("  line %d [%s] %s" % (line, cls, msg))
        if self.path_length_histogram:
            hist = " ".join(
                "%d:%d" % (k, v) for k, v in sorted(self.path_length_histogram.items())
            )
            lines.append("path lengths: %s" % hist)
        if self.wall_clock:
            lines.append(
                "per-request seconds: p50=%.6f p90=%.6f p99=%.6f max=%.6f"
                % (
                    self.wall_clock["p50"],
                    self.wall_clock["p90"],
                    self.wall_clock["p99"],
                    self.wall_clock["max"],
                )
            )
        lines.append("oracle calls: %s" % self.oracle_call_counts)
        lines.append("verifies: %d run, %d findings" % (self.verifies_run, self.verify_findings))
        return "\n".join(lines) + "\n"


def _percentile(sorted_values, q):
    if not sorted_values:
        return 0.0
    idx = min(len(sorted_values) - 1, int(q * len(sorted_values)))
    return sorted_values[idx]


def resolve_ref(engine: RoutingEngine, ref):
    """Path id, or negative index from the most recent live path."""
    if ref >= 0:
        return ref
    live = engine.live_ids()
    if len(live) + ref < 0:
        raise CallerError("negative ref %d with only %d live paths" % (ref, len(live)))
    return live[ref]


def run_trace(engine, commands, verify_every=0, stop_on_failure=False, emit=None):
    """Drive the engine through a command list; returns a RunReport.

    `emit` receives one line per served find (`PATH <id> <a> <b> <len> :
    v0 v1 ...`), per verify and per stats command.
    """
    report = RunReport()
    timings = []
    since_verify = 0
    for cmd in commands:
        if cmd.kind == "verify":
            rep = engine.verify()
            report.verifies_run += 1
            report.verify_findings += len(rep.findings)
            if emit:
                emit("VERIFY %s" % ("clean" if rep.ok else "%d findings" % len(rep.findings)))
            if not rep.ok and stop_on_failure:
                break
            continue
        if cmd.kind == "stats":
            if emit:
                emit(
                    "STATS live=%d served=%d failures=%d"
                    % (len(engine.registry), report.requests_served, len(report.failures))
                )
            continue
        start = time.perf_counter()
        try:
            if cmd.kind == "find":
                rec = engine.find_path(cmd.a, cmd.b)
                verts = engine.path_vertices(rec)
                if emit:
                    emit(
                        "PATH %d %d %d %d : %s"
                        % (rec.id, rec.a, rec.b, rec.length, " ".join(map(str, verts)))
                    )
                report.path_length_histogram[rec.length] = (
                    report.path_length_histogram.get(rec.length, 0) + 1
                )
            else:
                engine.remove_path(resolve_ref(engine, cmd.ref))
            report.requests_served += 1
        except (CallerError, ExpansionViolation) as exc:
            cls = "caller-error" if isinstance(exc, CallerError) else "expansion-violation"
            report.failures.append((cmd.line, cls, str(exc)))
            if emit:
                emit("FAIL line %d [%s] %s" % (cmd.line, cls, exc))
            if stop_on_failure:
                break
        finally:
            timings.append(time.perf_counter() - start)
        since_verify += 1
        if verify_every and since_verify >= verify_every:
            since_verify = 0
            rep = engine.verify()
            report.verifies_run += 1
            report.verify_findings += len(rep.findings)
            if not rep.ok:
                if emit:
                    emit("VERIFY %d findings" % len(rep.findings))
                if stop_on_failure:
                    break
    timings.sort()
    if timings:
        report.wall_clock = {
            "p50": _percentile(timings, 0.50),
            "p90": _percentile(timings, 0.90),
            "p99": _percentile(timings, 0.99),
            "max": timings[-1],
        }
    report.oracle_call_counts = engine.oracle_call_counts()
    return report


# --- workload generation --------------------------------------------------------


class _RuleTracker:
    """Replays the game rules so generators never emit a forbidden request."""

    def __init__(self, n, endpoint_cap, r):
        self.n = n
        self.endpoint_cap = endpoint_cap
        self.r = r
        self.ps = [0] * n
        self.pe = [0] * n
        self.live = []          # ids in creation order
        self.ends = {}          # id -> (a, b)
        self.next_id = 0

    def can_find(self, a, b):
        return (
            a != b
            and self.ps[a] < self.endpoint_cap
            and self.pe[b] < self.endpoint_cap
            and len(self.live) < self.r
        )

    def find(self, a, b):
        self.ps[a] += 1
        self.pe[b] += 1
        pid = self.next_id
        self.next_id += 1
        self.live.append(pid)
        self.ends[pid] = (a, b)
        return pid

    def remove(self, pid):
        a, b = self.ends.pop(pid)
        self.ps[a] -= 1
        self.pe[b] -= 1
        self.live.remove(pid)


def validate_trace(commands, n, endpoint_cap, r):
    """Check every prefix against the game rules; returns violations."""
    tracker = _RuleTracker(n, endpoint_cap, r)
    problems = []
    for cmd in commands:
        if cmd.kind == "find":
            if not (0 <= cmd.a < n and 0 <= cmd.b < n):
                problems.append("line %d: endpoint out of range" % cmd.line)
            elif not tracker.can_find(cmd.a, cmd.b):
                problems.append("line %d: find violates the game rules" % cmd.line)
            else:
                tracker.find(cmd.a, cmd.b)
        elif cmd.kind == "remove":
            ref = cmd.ref
            if ref < 0:
                if len(tracker.live) + ref < 0:
                    problems.append("line %d: negative ref beyond live paths" % cmd.line)
                    continue
                ref = tracker.live[ref]
            if ref not in tracker.ends:
                problems.append("line %d: remove of a dead path" % cmd.line)
            else:
                tracker.remove(ref)
    return problems


def _pick_pair(rng, tracker):
    for _ in range(200):
        a = rng.randrange(tracker.n)
        b = rng.randrange(tracker.n)
        if tracker.can_find(a, b):
            return a, b
    return None


def gen_workload(kind, n, params, seed, endpoint_cap, r):
    """Deterministic request streams: churn, fill, or hotspot.

    churn: `ops` commands holding roughly `live_target` live paths.
    fill:  `count` finds and nothing else (count must stay below r).
    hotspot: `ops` commands whose starts rotate through hot vertices,
             each used up to endpoint_cap - 1 times in a row.
    """
    rng = random.Random(seed)
    tracker = _RuleTracker(n, endpoint_cap, r)
    out = []
    line = 0

    def emit_find(a, b):
        nonlocal line
        line += 1
        out.append(TraceCommand("find", a=a, b=b, line=line))
        return tracker.find(a, b)

    def emit_remove(pid):
        nonlocal line
        line += 1
        tracker.remove(pid)
        out.append(TraceCommand("remove", ref=pid, line=line))

    if kind == "fill":
        count = int(params.get("count", 0))
        if count >= r:
            raise CallerError("fill of %d paths needs count < r=%d" % (count, r))
        while tracker.next_id < count:
            pair = _pick_pair(rng, tracker)
            if pair is None:
                raise CallerError("fill target unreachable under the endpoint caps")
            emit_find(*pair)
    elif kind == "churn":
        ops = int(params.get("ops", 0))
        live_target = int(params.get("live_target", max(1, r // 2)))
        if live_target >= r:
            raise CallerError("churn live_target must stay below r=%d" % r)
        attempts = 0
        while len(out) < ops:
            attempts += 1
            if attempts > 20 * ops + 100:
                raise CallerError("churn parameters starve the generator")
            want_find = len(tracker.live) < live_target or (
                len(tracker.live) < r - 1 and rng.random() < 0.5
            )
            if want_find:
                pair = _pick_pair(rng, tracker)
                if pair is None:
                    want_find = False
                else:
                    emit_find(*pair)
            if not want_find:
                if not tracker.live:
                    continue
                emit_remove(tracker.live[rng.randrange(len(tracker.live))])
    elif kind == "hotspot":
        ops = int(params.get("ops", 0))
        live_cap = int(params.get("live_target", max(1, r // 2)))
        burst = max(1, endpoint_cap - 1)
        hot = 0
        used = 0
        attempts = 0
        while len(out) < ops:
            attempts += 1
            if attempts > 20 * ops + 10 * n + 100:
                raise CallerError("hotspot parameters starve the generator")
            if len(tracker.live) >= min(live_cap, r - 1):
                emit_remove(tracker.live[0])
                continue
            if used >= burst or tracker.ps[hot] >= endpoint_cap:
                hot = (hot + 1) % n
                used = 0
                continue
            b = rng.randrange(n)
            if not tracker.can_find(hot, b):
                hot = (hot + 1) % n
                used = 0
                continue
            emit_find(hot, b)
            used += 1
    else:
        raise CallerError("unknown workload kind %r" % kind)
    return out
