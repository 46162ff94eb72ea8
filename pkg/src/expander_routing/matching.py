"""Matching routines used by preprocessing.

`maximum_matching` is the classic O(V^3) augmenting search for general
graphs with blossom contraction tracked through `base` pointers; it is
deterministic because neighbours are scanned in adjacency order.
`one_factor` extracts a spanning 1-regular subdigraph from a regular
digraph, treating tails and heads as the two sides of a bipartite graph
(greedy pass, then BFS augmentation).
"""

from __future__ import annotations

from collections import deque

from .errors import CallerError, RoutingError


def maximum_matching(n, adj):
    """Maximum matching of a simple graph given as neighbour lists.

    Returns `match` with match[v] = partner or -1. Neighbour lists must
    not contain self loops; parallel edges should be collapsed first.
    """
    match = [-1] * n
    p = [-1] * n
    base = list(range(n))

    def lca(a, b):
        used = [False] * n
        while True:
            a = base[a]
            used[a] = True
            if match[a] == -1:
                break
            a = p[match[a]]
        while True:
            b = base[b]
            if used[b]:
                return b
            b = p[match[b]]

    def mark_path(v, b, child, blossom):
        while base[v] != b:
            blossom[base[v]] = True
            blossom[base[match[v]]] = True
            p[v] = child
            child = match[v]
            v = p[match[v]]

    def find_path(root):
        nonlocal p, base
        used = [False] * n
        p = [-1] * n
        base = list(range(n))
        used[root] = True
        q = deque([root])
        while q:
            v = q.popleft()
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and p[match[to]] != -1):
                    # odd cycle found; contract the blossom
                    curbase = lca(v, to)
                    blossom = [False] * n
                    mark_path(v, curbase, to, blossom)
                    mark_path(to, curbase, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = curbase
                            if not used[i]:
                                used[i] = True
                                q.append(i)
                elif p[to] == -1:
                    p[to] = v
                    if match[to] == -1:
                        # augmenting path reached a free vertex
                        u = to
                        while u != -1:
                            pv = p[u]
                            w = match[pv]
                            match[pv] = u
                            match[u] = pv
                            u = w
                        return True
                    used[match[to]] = True
                    q.append(match[to])
        return False

    for v in range(n):
        if match[v] == -1:
            find_path(v)
    return match


def perfect_matching_edges(g):
    """Perfect matching of an UndirectedGraph as a sorted list of edge ids.

    Raises CallerError when none exists, which for a regular input means
    the graph violated the connectivity promise it came with.
    """
    n = g.n
    adj = [[] for _ in range(n)]
    seen = [set() for _ in range(n)]
    first_edge = {}
    for e in range(g.m):
        a, b = g.endpoints(e)
        if a == b:
            continue
        key = (a, b) if a < b else (b, a)
        if key not in first_edge:
            first_edge[key] = e
        if b not in seen[a]:
            seen[a].add(b)
            adj[a].append(b)
        if a not in seen[b]:
            seen[b].add(a)
            adj[b].append(a)
    match = maximum_matching(n, adj)
    unmatched = [v for v in range(n) if match[v] == -1]
    if unmatched:
        raise CallerError(
            "no perfect matching (vertex %d unmatched); input is not the promised expander"
            % unmatched[0]
        )
    edge_ids = set()
    for v in range(n):
        u = match[v]
        key = (v, u) if v < u else (u, v)
        edge_ids.add(first_edge[key])
    return sorted(edge_ids)


def one_factor(host, alive):
    """One live out-edge per tail with pairwise distinct heads.

    `alive` is a per-edge boolean; the live subgraph must be regular with
    equal positive degree on both sides, which guarantees the factor
    exists. Returns edge ids indexed by tail.
    """
    n = host.n
    heads = host.heads
    tails = host.tails
    match_of_head = [-1] * n
    match_of_tail = [-1] * n
    for t in range(n):
        for e in host.out_adj[t]:
            if alive[e] and match_of_head[heads[e]] == -1:
                match_of_head[heads[e]] = e
                match_of_tail[t] = e
                break
    for t0 in range(n):
        if match_of_tail[t0] != -1:
            continue
        parent_edge = [-1] * n
        seen_head = [False] * n
        q = deque([t0])
        found = -1
        while q and found == -1:
            t = q.popleft()
            for e in host.out_adj[t]:
                if not alive[e]:
                    continue
                h = heads[e]
                if seen_head[h]:
                    continue
                seen_head[h] = True
                parent_edge[h] = e
                if match_of_head[h] == -1:
                    found = h
                    break
                q.append(tails[match_of_head[h]])
        if found == -1:
            raise RoutingError("internal: regular bipartite layer has no perfect matching")
        h = found
        while h != -1:
            e = parent_edge[h]
            t = tails[e]
            prev = match_of_tail[t]
            match_of_tail[t] = e
            match_of_head[h] = e
            h = heads[prev] if prev != -1 else -1
    return match_of_tail
