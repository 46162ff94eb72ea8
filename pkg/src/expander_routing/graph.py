"""Immutable multigraph storage and dynamic edge subsets.

Edge identifiers are assigned in construction order and are stable for
the lifetime of a graph; adjacency lists keep that order, which is the
deterministic tie-break source for everything built on top. Graphs are
never mutated after construction: all dynamic state lives in EdgeSubset
overlays keyed by edge id.
"""

from __future__ import annotations

from .errors import CallerError, FormatError


class Digraph:
    """Directed multigraph with per-vertex in/out adjacency.

    Parallel edges are first class; each occurrence gets its own edge id.
    """

    __slots__ = ("n", "tails", "heads", "out_adj", "in_adj")

    def __init__(self, n, edges):
        if n < 0:
            raise CallerError("vertex count must be non-negative")
        tails = []
        heads = []
        out_adj = [[] for _ in range(n)]
        in_adj = [[] for _ in range(n)]
        for e, (t, h) in enumerate(edges):
            if not (0 <= t < n and 0 <= h < n):
                raise CallerError("edge (%d, %d) out of range for n=%d" % (t, h, n))
            tails.append(t)
            heads.append(h)
            out_adj[t].append(e)
            in_adj[h].append(e)
        self.n = n
        self.tails = tails
        self.heads = heads
        self.out_adj = out_adj
        self.in_adj = in_adj

    @property
    def m(self):
        return len(self.tails)

    def endpoints(self, e):
        return self.tails[e], self.heads[e]

    def out_degree(self, v):
        return len(self.out_adj[v])

    def in_degree(self, v):
        return len(self.in_adj[v])

    def edges(self):
        """Edge list in id order."""
        return list(zip(self.tails, self.heads))

    def regularity(self):
        """Return k if the graph is k-regular in both directions, else None."""
        if self.n == 0:
            return 0
        k = len(self.out_adj[0])
        for v in range(self.n):
            if len(self.out_adj[v]) != k or len(self.in_adj[v]) != k:
                return None
        return k

    def __eq__(self, other):
        return (
            isinstance(other, Digraph)
            and self.n == other.n
            and self.tails == other.tails
            and self.heads == other.heads
        )

    def __repr__(self):
        return "Digraph(n=%d, m=%d)" % (self.n, self.m)


def reverse(d: Digraph) -> Digraph:
    """Reverse every edge, keeping edge ids; an involution."""
    return Digraph(d.n, list(zip(d.heads, d.tails)))


def edges_within(d: Digraph, s) -> int:
    """Number of edges with both endpoints in s (parallels counted)."""
    inside = set(s)
    tails = d.tails
    heads = d.heads
    return sum(1 for e in range(len(tails)) if tails[e] in inside and heads[e] in inside)


def boundary_counts(d: Digraph, s1, s2):
    """(edges tail in s1 / head in s2, edges tail in s2 / head in s1)."""
    a = set(s1)
    b = set(s2)
    out_n = 0
    in_n = 0
    for e in range(d.m):
        t = d.tails[e]
        h = d.heads[e]
        if t in a and h in b:
            out_n += 1
        if t in b and h in a:
            in_n += 1
    return out_n, in_n


class UndirectedGraph:
    """Undirected multigraph; incidence lists hold edge ids."""

    __slots__ = ("n", "us", "vs", "inc")

    def __init__(self, n, edges):
        if n < 0:
            raise CallerError("vertex count must be non-negative")
        us = []
        vs = []
        inc = [[] for _ in range(n)]
        for e, (a, b) in enumerate(edges):
            if not (0 <= a < n and 0 <= b < n):
                raise CallerError("edge (%d, %d) out of range for n=%d" % (a, b, n))
            us.append(a)
            vs.append(b)
            inc[a].append(e)
            if b != a:
                inc[b].append(e)
        self.n = n
        self.us = us
        self.vs = vs
        self.inc = inc

    @property
    def m(self):
        return len(self.us)

    def endpoints(self, e):
        return self.us[e], self.vs[e]

    def other_end(self, e, v):
        u = self.us[e]
        return self.vs[e] if u == v else u

    def degree(self, v):
        return len(self.inc[v])

    def edges(self):
        return list(zip(self.us, self.vs))

    def regularity(self):
        if self.n == 0:
            return 0
        k = len(self.inc[0])
        for v in range(self.n):
            if len(self.inc[v]) != k:
                return None
        return k

    def __eq__(self, other):
        return (
            isinstance(other, UndirectedGraph)
            and self.n == other.n
            and self.us == other.us
            and self.vs == other.vs
        )

    def __repr__(self):
        return "UndirectedGraph(n=%d, m=%d)" % (self.n, self.m)


class EdgeSubset:
    """Dynamic subset of a fixed digraph's edges.

    O(1) membership plus per-vertex in/out counters that stay consistent
    with the member set; `recount` rebuilds them from scratch for audits.
    Double insert and absent removal raise, which catches bookkeeping bugs
    early instead of corrupting counters.
    """

    __slots__ = ("owner", "member", "out_deg", "in_deg", "_size")

    def __init__(self, owner: Digraph):
        self.owner = owner
        self.member = [False] * owner.m
        self.out_deg = [0] * owner.n
        self.in_deg = [0] * owner.n
        self._size = 0

    def add(self, e):
        if self.member[e]:
            raise CallerError("edge %d already in subset" % e)
        self.member[e] = True
        self.out_deg[self.owner.tails[e]] += 1
        self.in_deg[self.owner.heads[e]] += 1
        self._size += 1

    def remove(self, e):
        if not self.member[e]:
            raise CallerError("edge %d not in subset" % e)
        self.member[e] = False
        self.out_deg[self.owner.tails[e]] -= 1
        self.in_deg[self.owner.heads[e]] -= 1
        self._size -= 1

    def __contains__(self, e):
        return self.member[e]

    def __len__(self):
        return self._size

    def members(self):
        """Member edge ids in ascending order."""
        return [e for e, inside in enumerate(self.member) if inside]

    def recount(self):
        """Recompute (out_deg, in_deg, size) from the membership alone."""
        out_deg = [0] * self.owner.n
        in_deg = [0] * self.owner.n
        size = 0
        for e, inside in enumerate(self.member):
            if inside:
                out_deg[self.owner.tails[e]] += 1
                in_deg[self.owner.heads[e]] += 1
                size += 1
        return out_deg, in_deg, size


# --- text format -----------------------------------------------------------
#
# line 1: "<n> <m> directed|undirected", then m lines "<tail> <head>", 0-based.


def format_graph(g) -> str:
    if isinstance(g, Digraph):
        kind = "directed"
        pairs = zip(g.tails, g.heads)
    elif isinstance(g, UndirectedGraph):
        kind = "undirected"
        pairs = zip(g.us, g.vs)
    else:
        raise CallerError("unsupported graph type: %r" % type(g))
    lines = ["%d %d %s" % (g.n, g.m, kind)]
    lines.extend("%d %d" % (a, b) for a, b in pairs)
    return "\n".join(lines) + "\n"


def parse_graph(text: str):
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty graph text")
    head = lines[0].split()
    if len(head) != 3 or head[2] not in ("directed", "undirected"):
        raise FormatError("line 1: expected '<n> <m> directed|undirected'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError("line 1: bad vertex/edge count") from None
    edges = []
    for i, line in enumerate(lines[1 : m + 1], start=2):
        parts = line.split()
        if len(parts) != 2:
            raise FormatError("line %d: expected '<tail> <head>'" % i)
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise FormatError("line %d: bad endpoint" % i) from None
    if len(edges) != m:
        raise FormatError("expected %d edge lines, found %d" % (m, len(edges)))
    try:
        if head[2] == "directed":
            return Digraph(n, edges)
        return UndirectedGraph(n, edges)
    except CallerError as exc:
        raise FormatError(str(exc)) from None


def load_graph(path):
    with open(path, "r", encoding="ascii") as fh:
        return parse_graph(fh.read())


def save_graph(path, g):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_graph(g))
