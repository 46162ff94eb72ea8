"""Serve interleaved connect/disconnect requests with edge-disjoint paths.

A request for a path from a to b grows two trees with oracle-supplied
edges: one out of a inside the first split subgraph, one out of b inside
the reversed second subgraph (so its arcs point towards b in the
original orientation). The trees are large enough that the third
subgraph, minus the middle segments already spoken for, connects them by
a short directed path. The path is assembled from the two tree branches
plus the connector, every unused tree edge is handed back to its oracle,
and the registry updated. Removal returns the path's edges the same way.

Failures keep the two-class contract: precondition violations raise
before any mutation; mid-request failures of steps that expansion
guarantees (tree growth, the connector search) unwind every oracle edge
added so far and raise ExpansionViolation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import CallerError, ExpansionViolation
from .graph import EdgeSubset, UndirectedGraph, reverse
from .oracle import EdgeOracle
from .preprocess import pre_process
from .profiles import RouterProfile


@dataclass(frozen=True)
class PathRecord:
    """One routed path: tree segment, connector segment, reversed tree segment.

    seg_a holds edge ids of the first subgraph (directed a -> a'),
    seg_mid of the third (a' -> b'), seg_b of the second in original
    orientation (b' -> b); seg_b ids equally index the reversed host the
    in-oracle runs on.
    """

    id: int
    a: int
    b: int
    seg_a: tuple
    seg_mid: tuple
    seg_b: tuple

    @property
    def length(self):
        return len(self.seg_a) + len(self.seg_mid) + len(self.seg_b)


class VerifyReport:
    def __init__(self, findings):
        self.findings = list(findings)

    @property
    def ok(self):
        return not self.findings

    def __str__(self):
        if self.ok:
            return "verify: clean"
        return "verify: %d finding(s)\n  " % len(self.findings) + "\n  ".join(self.findings)


class RoutingEngine:
    def __init__(self, g: UndirectedGraph, profile: RouterProfile):
        if not profile.relaxed and 20 * profile.gamma > Fraction(1, 50):
            raise CallerError("20*gamma must be at most 1/50 unless the profile is relaxed")
        self.profile = profile
        self.split = pre_process(g, profile)
        oprof = profile.oracle_profile()
        self.out_oracle = EdgeOracle(self.split.g1, oprof)
        self.g2_rev = reverse(self.split.g2)
        self.in_oracle = EdgeOracle(self.g2_rev, oprof)
        self.h3 = EdgeSubset(self.split.g3)
        self.registry = {}
        self.ps = [0] * g.n
        self.pe = [0] * g.n
        self._next_id = 0
        self.bfs_runs = 0
        self.finds_served = 0
        self.removes_served = 0

    @property
    def n(self):
        return self.split.host.n

    def live_ids(self):
        """Live path ids in creation order."""
        return list(self.registry)

    def oracle_call_counts(self):
        return {
            "out_add": self.out_oracle.add_calls,
            "out_remove": self.out_oracle.remove_calls,
            "in_add": self.in_oracle.add_calls,
            "in_remove": self.in_oracle.remove_calls,
            "walk_searches": self.out_oracle.walk_searches + self.in_oracle.walk_searches,
        }

    # --- requests ---------------------------------------------------------

    def find_path(self, a, b) -> PathRecord:
        prof = self.profile
        n = self.n
        if not (0 <= a < n and 0 <= b < n):
            raise CallerError("endpoint out of range")
        if a == b:
            raise CallerError("find_path(%d, %d): endpoints must differ" % (a, b))
        if self.ps[a] >= prof.endpoint_cap:
            raise CallerError("vertex %d already starts %d paths" % (a, self.ps[a]))
        if self.pe[b] >= prof.endpoint_cap:
            raise CallerError("vertex %d already ends %d paths" % (b, self.pe[b]))
        if len(self.registry) >= prof.r:
            raise CallerError("live path count is at the volume cap r=%d" % prof.r)
        edges_a, va, par_a, _ = self._oracle_bfs(self.out_oracle, a)
        try:
            edges_b, vb, par_b, _ = self._oracle_bfs(self.in_oracle, b)
        except ExpansionViolation:
            self._unwind(self.out_oracle, edges_a)
            raise
        try:
            connector = self._g3_connect(va, vb)
            if connector is None:
                raise ExpansionViolation(
                    "no connector between the two trees in the third subgraph"
                )
            ap, bp, seg_mid = connector
            if len(seg_mid) > prof.g3_path_cap:
                raise ExpansionViolation(
                    "connector length %d exceeds cap %d" % (len(seg_mid), prof.g3_path_cap)
                )
        except ExpansionViolation:
            self._unwind(self.in_oracle, edges_b)
            self._unwind(self.out_oracle, edges_a)
            raise
        seg_a = self._tree_path(par_a, ap)
        seg_b_tree = self._tree_path(par_b, bp)
        keep_a = set(seg_a)
        keep_b = set(seg_b_tree)
        for e in edges_a:
            if e not in keep_a:
                self.out_oracle.remove_edge(e)
        for e in edges_b:
            if e not in keep_b:
                self.in_oracle.remove_edge(e)
        for e in seg_mid:
            self.h3.add(e)
        rec = PathRecord(
            id=self._next_id,
            a=a,
            b=b,
            seg_a=tuple(seg_a),
            seg_mid=tuple(seg_mid),
            seg_b=tuple(reversed(seg_b_tree)),
        )
        self._next_id += 1
        self.registry[rec.id] = rec
        self.ps[a] += 1
        self.pe[b] += 1
        self.finds_served += 1
        return rec

    def remove_path(self, path_id):
        rec = self.registry.get(path_id)
        if rec is None:
            raise CallerError("unknown path id %s" % path_id)
        for e in rec.seg_a:
            self.out_oracle.remove_edge(e)
        for e in rec.seg_b:
            self.in_oracle.remove_edge(e)
        for e in rec.seg_mid:
            self.h3.remove(e)
        del self.registry[path_id]
        self.ps[rec.a] -= 1
        self.pe[rec.b] -= 1
        self.removes_served += 1

    # --- tree growth --------------------------------------------------------

    def _oracle_bfs(self, oracle, root):
        """Grow a tree of oracle edges out of root; see module docstring.

        Each dequeued vertex asks its oracle for up to `fanout` edges,
        skipping requests its remaining out-capacity cannot take (inside
        the proved regime the capacity always suffices, so nothing is
        skipped there). Returns (edges in insertion order, vertex set,
        parent links, depths); on failure every added edge is handed
        back before re-raising.
        """
        prof = self.profile
        self.bfs_runs += 1
        vset = {root}
        parent = {root: None}
        depth = {root: 0}
        edges = []
        q = deque([root])
        try:
            while q and len(vset) <= prof.bfs_vertex_cap and len(edges) < prof.bfs_edge_cap:
                u = q.popleft()
                for _ in range(prof.fanout):
                    if oracle.h.out_deg[u] >= oracle.profile.out_cap:
                        break
                    if len(oracle.h) >= oracle.profile.capacity:
                        raise ExpansionViolation("oracle hit capacity during tree growth")
                    e = oracle.add_edge(u)
                    edges.append(e)
                    w = oracle.host.heads[e]
                    if w not in vset:
                        vset.add(w)
                        parent[w] = (u, e)
                        depth[w] = depth[u] + 1
                        q.append(w)
        except ExpansionViolation:
            self._unwind(oracle, edges)
            raise
        if len(vset) < prof.bfs_vertex_cap:
            self._unwind(oracle, edges)
            raise ExpansionViolation(
                "tree growth stalled at %d of %d vertices" % (len(vset), prof.bfs_vertex_cap)
            )
        if max(depth.values()) > prof.depth_cap:
            self._unwind(oracle, edges)
            raise ExpansionViolation(
                "tree depth %d exceeds budget %d" % (max(depth.values()), prof.depth_cap)
            )
        return edges, vset, parent, depth

    @staticmethod
    def _unwind(oracle, edges):
        for e in reversed(edges):
            oracle.remove_edge(e)

    @staticmethod
    def _tree_path(parent, target):
        edges = []
        v = target
        while parent[v] is not None:
            u, e = parent[v]
            edges.append(e)
            v = u
        edges.reverse()
        return edges

    def probe_bfs(self, side, root):
        """Grow one tree, measure it, hand all edges back. Test instrumentation."""
        oracle = self.out_oracle if side == "out" else self.in_oracle
        edges, vset, parent, depth = self._oracle_bfs(oracle, root)
        result = {
            "vertices": set(vset),
            "parent": dict(parent),
            "depth": dict(depth),
            "edge_count": len(edges),
            "edges": list(edges),
        }
        self._unwind(oracle, edges)
        return result

    # --- connector search -----------------------------------------------------

    def _g3_connect(self, va, vb):
        """Shortest directed path from va to vb in the third subgraph minus
        the middle segments of live paths. Returns (entry, exit, edges)."""
        g3 = self.split.g3
        h3m = self.h3.member
        targets = vb if isinstance(vb, set) else set(vb)
        sources = sorted(va)
        for s in sources:
            if s in targets:
                return s, s, []
        parent = {}
        seen = set(sources)
        q = deque(sources)
        while q:
            u = q.popleft()
            for e in g3.out_adj[u]:
                if h3m[e]:
                    continue
                w = g3.heads[e]
                if w in seen:
                    continue
                seen.add(w)
                parent[w] = (u, e)
                if w in targets:
                    edges = []
                    v = w
                    while v in parent:
                        pu, pe = parent[v]
                        edges.append(pe)
                        v = pu
                    edges.reverse()
                    return v, w, edges
                q.append(w)
        return None

    # --- reconstruction and verification ----------------------------------------

    def path_vertices(self, rec: PathRecord):
        """Vertex sequence a .. b of a stored path; raises on corruption."""
        problems = []
        verts = self._walk_vertices(rec, problems)
        if problems:
            raise CallerError("path %d is not a consistent walk: %s" % (rec.id, problems[0]))
        return verts

    def _walk_vertices(self, rec, problems):
        g1 = self.split.g1
        g2 = self.split.g2
        g3 = self.split.g3
        verts = [rec.a]
        for e in rec.seg_a:
            if g1.tails[e] != verts[-1]:
                problems.append("first segment breaks at edge %d" % e)
                return verts
            verts.append(g1.heads[e])
        for e in rec.seg_mid:
            if g3.tails[e] != verts[-1]:
                problems.append("middle segment breaks at edge %d" % e)
                return verts
            verts.append(g3.heads[e])
        for e in rec.seg_b:
            if g2.tails[e] != verts[-1]:
                problems.append("last segment breaks at edge %d" % e)
                return verts
            verts.append(g2.heads[e])
        if verts[-1] != rec.b:
            problems.append("walk ends at %d, not at b=%d" % (verts[-1], rec.b))
        return verts

    def verify(self) -> VerifyReport:
        """From-scratch recount of everything the registry implies."""
        findings = []
        prof = self.profile
        recs = list(self.registry.values())

        for name, seg, oracle in (
            ("H1", "seg_a", self.out_oracle),
            ("H2", "seg_b", self.in_oracle),
        ):
            union = []
            for rec in recs:
                union.extend(getattr(rec, seg))
            if len(union) != len(set(union)):
                findings.append("%s: an edge appears in two stored paths" % name)
            elif sorted(union) != oracle.h.members():
                findings.append("%s differs from the union of stored segments" % name)
        union3 = []
        for rec in recs:
            union3.extend(rec.seg_mid)
        if len(union3) != len(set(union3)):
            findings.append("H3: an edge appears in two stored paths")
        elif sorted(union3) != self.h3.members():
            findings.append("H3 differs from the union of stored middle segments")

        host_ids = []
        for rec in recs:
            host_ids.extend(self.split.g1_host[e] for e in rec.seg_a)
            host_ids.extend(self.split.g3_host[e] for e in rec.seg_mid)
            host_ids.extend(self.split.g2_host[e] for e in rec.seg_b)
        if len(host_ids) != len(set(host_ids)):
            findings.append("paths are not pairwise edge-disjoint over the host")

        for rec in recs:
            problems = []
            self._walk_vertices(rec, problems)
            findings.extend("path %d: %s" % (rec.id, p) for p in problems)
            if len(rec.seg_a) > prof.depth_cap:
                findings.append("path %d: first segment length %d over cap" % (rec.id, len(rec.seg_a)))
            if len(rec.seg_b) > prof.depth_cap:
                findings.append("path %d: last segment length %d over cap" % (rec.id, len(rec.seg_b)))
            if len(rec.seg_mid) > prof.g3_path_cap:
                findings.append("path %d: middle segment length %d over cap" % (rec.id, len(rec.seg_mid)))
            if rec.length > prof.path_len_cap:
                findings.append("path %d: length %d over cap %d" % (rec.id, rec.length, prof.path_len_cap))

        count = len(recs)
        for name, oracle in (("H1", self.out_oracle), ("H2", self.in_oracle)):
            size = len(oracle.h)
            if size > count * prof.depth_cap:
                findings.append("%s size %d exceeds %d paths x depth budget" % (name, size, count))
            if size > prof.h_size_cap:
                findings.append("%s size %d exceeds cap %d" % (name, size, prof.h_size_cap))
        if len(self.h3) * prof.beta > 300 * count:
            findings.append("H3 size %d exceeds 300|P|/beta" % len(self.h3))

        for v in range(self.n):
            if self.out_oracle.h.out_deg[v] > self.out_oracle.h.in_deg[v] + self.ps[v]:
                findings.append("H1 out/in imbalance at vertex %d" % v)
            if self.in_oracle.h.out_deg[v] > self.in_oracle.h.in_deg[v] + self.pe[v]:
                findings.append("H2 out/in imbalance at vertex %d" % v)
            if self.out_oracle.h.in_deg[v] > prof.oracle_in_cap:
                findings.append("H1 in-degree %d over cap at vertex %d" % (self.out_oracle.h.in_deg[v], v))
            if self.in_oracle.h.in_deg[v] > prof.oracle_in_cap:
                findings.append("H2 in-degree %d over cap at vertex %d" % (self.in_oracle.h.in_deg[v], v))

        ps_expected = [0] * self.n
        pe_expected = [0] * self.n
        for rec in recs:
            ps_expected[rec.a] += 1
            pe_expected[rec.b] += 1
        if ps_expected != self.ps:
            findings.append("start counters disagree with the registry")
        if pe_expected != self.pe:
            findings.append("end counters disagree with the registry")

        for name, oracle in (("out-oracle", self.out_oracle), ("in-oracle", self.in_oracle)):
            findings.extend("%s: %s" % (name, f) for f in oracle.audit().findings)
        return VerifyReport(findings)
