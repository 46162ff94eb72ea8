"""Online out-edge dispenser over a fixed regular digraph.

The structure hands out edges whose heads are lightly loaded and absorbs
removals. It maintains:

  H    the active set (everything ever returned and not yet removed),
  B    buffered edges pre-reserved for vertices that are running out of
       safe choices,
  Sat  heads whose in-degree in F = H u B reached the saturation
       threshold (these are never handed out as new heads),
  Low  vertices most of whose out-neighbourhood saturated; their future
       requests are served from B stock.

When a vertex joins Low its buffer is topped up to the out-degree cap by
alternating walks: chains that alternate free host edges (traversed
forward) with buffered edges (traversed against their direction).
Toggling the buffer membership of every walk edge re-routes reservations
so that the walk's start gains one reserved out-edge and only the walk's
final head pays one unit of in-degree. All choices (edge picks, vertex
scans, walk search order) follow host adjacency order or ascending
vertex ids, so runs are deterministic.

A request either completes or raises; requests that raise
ExpansionViolation first rewind every mutation they made (an undo log of
membership deltas), so a failed add leaves the structure exactly as it
was.
"""

from __future__ import annotations

from .errors import CallerError, ExpansionViolation, RoutingError
from .graph import Digraph, EdgeSubset
from .profiles import OracleProfile


class AuditReport:
    """Findings from a from-scratch recount; empty means clean.

    `low_claim_ok` tracks the buffered-set size bound |Low| < beta*n/12
    separately: it is a consequence of the host's promised edge-density
    hypothesis, so it counts as a finding only under strict profiles
    (relaxed profiles run hosts that do not meet the hypothesis).
    """

    def __init__(self, findings, low_claim_ok=True, low_count=0):
        self.findings = list(findings)
        self.low_claim_ok = low_claim_ok
        self.low_count = low_count

    @property
    def ok(self):
        return not self.findings

    def __str__(self):
        if self.ok:
            return "audit: clean"
        return "audit: %d finding(s)\n  " % len(self.findings) + "\n  ".join(self.findings)


class EdgeOracle:
    def __init__(self, host: Digraph, profile: OracleProfile):
        if host.n != profile.n:
            raise CallerError("host has n=%d, profile says n=%d" % (host.n, profile.n))
        if host.regularity() != profile.d:
            raise CallerError("host is not %d-regular" % profile.d)
        self.host = host
        self.profile = profile
        self.h = EdgeSubset(host)
        self.b = EdgeSubset(host)
        self.sat = [False] * host.n
        self.low = [False] * host.n
        # sat_out[v] = number of host out-edges of v whose head is saturated
        self.sat_out = [0] * host.n
        # integer cross-multiplied thresholds: in_f >= sat_threshold etc.
        self._sat_n = profile.sat_threshold.numerator
        self._sat_d = profile.sat_threshold.denominator
        self._low_n = profile.low_threshold.numerator
        self._low_d = profile.low_threshold.denominator
        # vertices whose sat_out crossed a threshold and await (de)promotion
        self._low_pending = set()
        self._drop_pending = set()
        self._undo = None
        self.add_calls = 0
        self.remove_calls = 0
        self.walk_searches = 0
        self.low_additions = 0
        self.record_walks = False
        self.walk_records = []
        # debug mode re-audits mid-request (the continuous invariants only)
        self.debug = False

    # --- degree helpers ----------------------------------------------------

    def in_f(self, v):
        return self.h.in_deg[v] + self.b.in_deg[v]

    def out_f(self, v):
        return self.h.out_deg[v] + self.b.out_deg[v]

    def _sat_reached(self, v):
        return self.in_f(v) * self._sat_d >= self._sat_n

    def _low_reached(self, v):
        return self.sat_out[v] * self._low_d >= self._low_n

    # --- logged mutation primitives -----------------------------------------

    def _log(self, op, arg):
        if self._undo is not None:
            self._undo.append((op, arg))

    def _h_add(self, e):
        self.h.add(e)
        self._log("h+", e)

    def _h_remove(self, e):
        self.h.remove(e)
        self._log("h-", e)

    def _b_add(self, e):
        self.b.add(e)
        self._log("b+", e)

    def _b_remove(self, e):
        self.b.remove(e)
        self._log("b-", e)

    def _sat_add(self, w):
        self.sat[w] = True
        for e in self.host.in_adj[w]:
            u = self.host.tails[e]
            self.sat_out[u] += 1
            if not self.low[u] and self._low_reached(u):
                self._low_pending.add(u)
        self._log("s+", w)

    def _sat_remove(self, w):
        self.sat[w] = False
        for e in self.host.in_adj[w]:
            u = self.host.tails[e]
            self.sat_out[u] -= 1
            if self.low[u] and not self._low_reached(u):
                self._drop_pending.add(u)
        self._log("s-", w)

    def _low_add(self, x):
        self.low[x] = True
        self._log("l+", x)

    def _low_remove(self, x):
        self.low[x] = False

    def _rollback(self):
        log = self._undo
        self._undo = None
        for op, arg in reversed(log):
            if op == "h+":
                self.h.remove(arg)
            elif op == "h-":
                self.h.add(arg)
            elif op == "b+":
                self.b.remove(arg)
            elif op == "b-":
                self.b.add(arg)
            elif op == "s+":
                self._sat_remove(arg)
            elif op == "s-":
                self._sat_add(arg)
            else:  # "l+"
                self.low[arg] = False

    # --- requests ------------------------------------------------------------

    def add_edge(self, v):
        """Return a fresh out-edge of v with a lightly loaded head; add it to H."""
        prof = self.profile
        if not (0 <= v < self.host.n):
            raise CallerError("vertex %d out of range" % v)
        if self.h.out_deg[v] >= prof.out_cap:
            raise CallerError("add_edge(%d): out-degree cap %d reached" % (v, prof.out_cap))
        if len(self.h) >= prof.capacity:
            raise CallerError("add_edge: active set is at capacity %d" % prof.capacity)
        self.add_calls += 1
        if self.low[v]:
            # serve from the buffered stock
            for e in self.host.out_adj[v]:
                if self.b.member[e]:
                    self.b.remove(e)
                    self.h.add(e)
                    return e
            raise ExpansionViolation("add_edge(%d): buffered vertex has no stock" % v)
        self._undo = []
        try:
            picked = -1
            for e in self.host.out_adj[v]:
                if self.h.member[e] or self.b.member[e]:
                    continue
                if not self.sat[self.host.heads[e]]:
                    picked = e
                    break
            if picked == -1:
                raise ExpansionViolation("add_edge(%d): all free out-edges saturated" % v)
            self._h_add(picked)
            w = self.host.heads[picked]
            if not self.sat[w] and self._sat_reached(w):
                self._sat_add(w)
            self._rebalance()
        except ExpansionViolation:
            self._rollback()
            raise
        self._undo = None
        if self.debug:
            self._debug_audit(quiescent=True)
        return picked

    def remove_edge(self, e):
        """Remove an active edge; buffered tails keep it as stock."""
        if not (0 <= e < self.host.m) or not self.h.member[e]:
            raise CallerError("remove_edge: edge %d is not active" % e)
        self.remove_calls += 1
        v = self.host.tails[e]
        w = self.host.heads[e]
        self.h.remove(e)
        if self.low[v]:
            self.b.add(e)
        elif self.sat[w] and not self._sat_reached(w):
            self._sat_remove(w)
            self._cascade()
        if self.debug:
            self._debug_audit(quiescent=True)

    # --- rebalancing ---------------------------------------------------------

    def _rebalance(self):
        """Promote every vertex that ran out of safe choices and top up its stock."""
        out_cap = self.profile.out_cap
        while self._low_pending:
            ready = [u for u in self._low_pending if not self.low[u] and self._low_reached(u)]
            if not ready:
                self._low_pending.clear()
                return
            x = min(ready)
            self._low_pending.discard(x)
            self._low_add(x)
            self.low_additions += 1
            while self.out_f(x) < out_cap:
                found = self.find_alternating_walk(x)
                if found is None:
                    raise ExpansionViolation(
                        "rebalance(%d): no alternating walk to a free head" % x
                    )
                self.walk_searches += 1
                edges, y, verts = found
                record = None
                if self.record_walks:
                    record = {
                        "x": x,
                        "y": y,
                        "vertices": list(verts),
                        "before": {u: (self.out_f(u), self.in_f(u)) for u in set(verts)},
                    }
                for e, forward in edges:
                    if forward:
                        self._b_add(e)
                    else:
                        self._b_remove(e)
                if record is not None:
                    record["after"] = {u: (self.out_f(u), self.in_f(u)) for u in set(verts)}
                    self.walk_records.append(record)
                if not self.sat[y] and self._sat_reached(y):
                    self._sat_add(y)
                if self.debug:
                    self._debug_audit()

    def find_alternating_walk(self, x):
        """Layered search for a walk from x to a head below the in-cap.

        Forward steps use free host edges (not in H u B), backward steps
        use buffered edges against their direction. Within a layer,
        endpoints whose in-degree stays below the saturation threshold
        after the toggle are preferred (any qualifying head is valid;
        picking a non-saturating one stops buffering from feeding the
        saturation it is trying to escape). Returns (edges as
        (id, forward) in walk order, endpoint, vertex sequence) or None
        when no such walk exists.
        """
        host = self.host
        h_mem = self.h.member
        b_mem = self.b.member
        in_cap = self.profile.in_cap
        sat_n = self._sat_n
        sat_d = self._sat_d
        head_parent = {}
        tail_parent = {}
        seen_tails = {x}
        tails = [x]
        while tails:
            new_heads = []
            fallback = -1
            for t in tails:
                for e in host.out_adj[t]:
                    if h_mem[e] or b_mem[e]:
                        continue
                    w = host.heads[e]
                    if w in head_parent:
                        continue
                    head_parent[w] = (t, e)
                    in_w = self.in_f(w)
                    if in_w < in_cap:
                        if (in_w + 1) * sat_d < sat_n:
                            return self._build_walk(x, w, head_parent, tail_parent)
                        if fallback < 0:
                            fallback = w
                    new_heads.append(w)
            if fallback >= 0:
                return self._build_walk(x, fallback, head_parent, tail_parent)
            tails = []
            for hd in new_heads:
                for e in host.in_adj[hd]:
                    if not b_mem[e]:
                        continue
                    u = host.tails[e]
                    if u in seen_tails:
                        continue
                    seen_tails.add(u)
                    tail_parent[u] = (hd, e)
                    tails.append(u)
        return None

    @staticmethod
    def _build_walk(x, y, head_parent, tail_parent):
        rev = []
        verts = [y]
        cur = y
        while True:
            t, e = head_parent[cur]
            rev.append((e, True))
            verts.append(t)
            if t == x:
                break
            hd, eb = tail_parent[t]
            rev.append((eb, False))
            verts.append(hd)
            cur = hd
        rev.reverse()
        verts.reverse()
        return rev, y, verts

    # --- cascading cleanup after removals -------------------------------------

    def _cascade(self):
        """Demote buffered vertices whose saturated out-neighbourhood shrank."""
        while self._drop_pending:
            ready = [u for u in self._drop_pending if self.low[u] and not self._low_reached(u)]
            if not ready:
                self._drop_pending.clear()
                return
            x = min(ready)
            self._drop_pending.discard(x)
            touched = set()
            for e in self.host.out_adj[x]:
                if self.b.member[e]:
                    self.b.remove(e)
                    touched.add(self.host.heads[e])
            self._low_remove(x)
            for y in sorted(touched):
                if self.sat[y] and not self._sat_reached(y):
                    self._sat_remove(y)

    def _debug_audit(self, quiescent=False):
        report = self.audit(quiescent=quiescent)
        if not report.ok:
            raise RoutingError("debug audit failed: %s" % report.findings[0])

    # --- verification ----------------------------------------------------------

    def audit(self, quiescent=True):
        """Recompute all state from memberships and report every violation."""
        findings = []
        host = self.host
        n = host.n
        prof = self.profile
        for name, sub in (("H", self.h), ("B", self.b)):
            out_deg, in_deg, size = sub.recount()
            if out_deg != sub.out_deg:
                findings.append("%s out-degree counters disagree with recount" % name)
            if in_deg != sub.in_deg:
                findings.append("%s in-degree counters disagree with recount" % name)
            if size != len(sub):
                findings.append("%s size %d != recounted %d" % (name, len(sub), size))
        both = [e for e in range(host.m) if self.h.member[e] and self.b.member[e]]
        if both:
            findings.append("H and B overlap on edges %s" % both[:5])
        in_f = [self.h.in_deg[v] + self.b.in_deg[v] for v in range(n)]
        out_f = [self.h.out_deg[v] + self.b.out_deg[v] for v in range(n)]
        sat_expected = [in_f[v] * self._sat_d >= self._sat_n for v in range(n)]
        sat_out_expected = [0] * n
        for e in range(host.m):
            if sat_expected[host.heads[e]]:
                sat_out_expected[host.tails[e]] += 1
        low_expected = [
            sat_out_expected[v] * self._low_d >= self._low_n for v in range(n)
        ]
        if quiescent:
            for v in range(n):
                if self.sat[v] != sat_expected[v]:
                    findings.append(
                        "Sat mismatch at %d: maintained=%s recomputed=%s (in_F=%d)"
                        % (v, self.sat[v], sat_expected[v], in_f[v])
                    )
            for v in range(n):
                if self.low[v] != low_expected[v]:
                    findings.append(
                        "Low mismatch at %d: maintained=%s recomputed=%s (sat_out=%d)"
                        % (v, self.low[v], low_expected[v], sat_out_expected[v])
                    )
            for v in range(n):
                if self.low[v] and out_f[v] != prof.out_cap:
                    findings.append(
                        "buffered vertex %d has out_F=%d, expected the cap %d"
                        % (v, out_f[v], prof.out_cap)
                    )
        sat_out_maintained = [0] * n
        for e in range(host.m):
            if self.sat[host.heads[e]]:
                sat_out_maintained[host.tails[e]] += 1
        if sat_out_maintained != self.sat_out:
            bad = next(v for v in range(n) if sat_out_maintained[v] != self.sat_out[v])
            findings.append(
                "sat_out counter at %d: maintained=%d recomputed=%d"
                % (bad, self.sat_out[bad], sat_out_maintained[bad])
            )
        for v in range(n):
            if self.sat[v] and not (in_f[v] * self._sat_d >= self._sat_n):
                findings.append("saturated vertex %d has in_F=%d below threshold" % (v, in_f[v]))
            if self.low[v] and not (self.sat_out[v] * self._low_d >= self._low_n):
                findings.append("buffered vertex %d has sat_out=%d below threshold" % (v, self.sat_out[v]))
            if not self.low[v] and self.b.out_deg[v] != 0:
                findings.append("vertex %d holds buffer stock without being buffered" % v)
            if out_f[v] > prof.out_cap:
                findings.append("out_F(%d)=%d exceeds cap %d" % (v, out_f[v], prof.out_cap))
            if in_f[v] > prof.in_cap:
                findings.append("in_F(%d)=%d exceeds cap %d" % (v, in_f[v], prof.in_cap))
        low_count = sum(self.low)
        low_claim_ok = low_count * 12 < prof.beta * n
        if not low_claim_ok and not prof.relaxed:
            findings.append(
                "|Low|=%d is not below beta*n/12=%s" % (low_count, prof.beta * n / 12)
            )
        if len(self.h) > prof.capacity:
            findings.append("|H|=%d exceeds capacity %d" % (len(self.h), prof.capacity))
        return AuditReport(findings, low_claim_ok=low_claim_ok, low_count=low_count)

    def dump(self):
        """Stable text listing of the four state sets, for golden tests."""
        sets = [
            ("H", self.h.members()),
            ("B", self.b.members()),
            ("Sat", [v for v in range(self.host.n) if self.sat[v]]),
            ("Low", [v for v in range(self.host.n) if self.low[v]]),
        ]
        lines = []
        for name, ids in sets:
            lines.append("%s:%s" % (name, "".join(" %d" % i for i in ids)))
        return "\n".join(lines) + "\n"
