"""Exact isomorphism machinery for small graphs, used as a ground-truth oracle.

Canonical forms are the minimum upper-triangle adjacency bitstring over node
orderings. By default only orderings that sort nodes by their colour-refinement
class are tried; the classes are an isomorphism invariant, so the minimum is
still a canonical form. ``exhaustive=True`` searches all ``n!`` orderings.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np

from .graph import AttributedGraph, build_graph

MAX_NODES = 11
CENSUS_GUARD = 10**7
_CHUNK = 200_000


class OracleBoundError(ValueError):
    """Input exceeds the size the brute-force oracle accepts."""


def _check_size(g: AttributedGraph, limit: int = MAX_NODES) -> None:
    if g.n > limit:
        raise OracleBoundError(f"graph has {g.n} nodes, oracle bound is {limit}")


def refinement_classes(g: AttributedGraph) -> list[int]:
    """Stable colour-refinement colours, numbered canonically from 0."""
    adj = g.adjacency
    colors = [0] * g.n
    while True:
        sigs = [(colors[v], tuple(sorted(colors[w] for w in adj[v]))) for v in range(g.n)]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == len(set(colors)):
            return new
        colors = new


def _orderings(cells: list[list[int]]) -> np.ndarray:
    """All node orderings that keep ``cells`` in sequence, as a (P, n) array."""
    blocks = [np.array(list(itertools.permutations(c)), dtype=np.int64) for c in cells]
    out = blocks[0]
    for b in blocks[1:]:
        out = np.hstack([np.repeat(out, len(b), axis=0), np.tile(b, (len(out), 1))])
    return out


def _min_code(adj: np.ndarray, perms: np.ndarray) -> int:
    n = adj.shape[0]
    iu, ju = np.triu_indices(n, 1)
    weights = (1 << np.arange(len(iu) - 1, -1, -1, dtype=np.uint64)).astype(np.uint64)
    best = None
    for start in range(0, len(perms), _CHUNK):
        p = perms[start : start + _CHUNK]
        bits = adj[p[:, iu], p[:, ju]].astype(np.uint64)
        codes = bits @ weights if len(iu) else np.zeros(len(p), dtype=np.uint64)
        m = int(codes.min())
        best = m if best is None else min(best, m)
    return best or 0


def canonical_form(g: AttributedGraph, exhaustive: bool = False) -> bytes:
    """Canonical byte string: node count, edge count, then the minimal adjacency code."""
    _check_size(g)
    n = g.n
    header = bytes([n, g.num_edges])
    if n < 2:
        return header
    adj = np.zeros((n, n), dtype=bool)
    for u, v in g.edges:
        adj[u, v] = adj[v, u] = True
    if exhaustive:
        cells = [list(range(n))]
    else:
        colors = refinement_classes(g)
        cells = [[v for v in range(n) if colors[v] == c] for c in sorted(set(colors))]
    code = _min_code(adj, _orderings(cells))
    nbytes = (n * (n - 1) // 2 + 7) // 8
    return header + code.to_bytes(nbytes, "big")


def are_isomorphic(g1: AttributedGraph, g2: AttributedGraph) -> bool:
    """Backtracking search for an edge-preserving node bijection (labels ignored)."""
    _check_size(g1)
    _check_size(g2)
    if g1.n != g2.n or g1.num_edges != g2.num_edges:
        return False
    deg1 = [len(a) for a in g1.adjacency]
    deg2 = [len(a) for a in g2.adjacency]
    if sorted(deg1) != sorted(deg2):
        return False
    n = g1.n
    adj1 = [set(a) for a in g1.adjacency]
    adj2 = [set(a) for a in g2.adjacency]

    # visit g1 nodes so each one after the first tends to touch an already mapped node
    order: list[int] = []
    seen: set[int] = set()
    for s in sorted(range(n), key=lambda v: -deg1[v]):
        if s in seen:
            continue
        queue = [s]
        seen.add(s)
        while queue:
            u = queue.pop(0)
            order.append(u)
            for w in sorted(adj1[u], key=lambda v: -deg1[v]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def extend(k: int) -> bool:
        if k == n:
            return True
        u = order[k]
        for cand in range(n):
            if cand in used or deg2[cand] != deg1[u]:
                continue
            ok = True
            for w, img in mapping.items():
                if (w in adj1[u]) != (img in adj2[cand]):
                    ok = False
                    break
            if not ok:
                continue
            mapping[u] = cand
            used.add(cand)
            if extend(k + 1):
                return True
            del mapping[u]
            used.discard(cand)
        return False

    return extend(0)


def _connected_edge_set(edges: list[tuple[int, int]]) -> bool:
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(x) for x in parent}) <= 1


def edge_subset_graph(g: AttributedGraph, edge_ids: tuple[int, ...]) -> AttributedGraph:
    edges = [g.edges[i] for i in edge_ids]
    nodes = sorted({x for e in edges for x in e})
    pos = {v: i for i, v in enumerate(nodes)}
    return build_graph(len(nodes), [(pos[u], pos[v]) for u, v in edges])


def connected_edge_subsets(g: AttributedGraph, t: int):
    """Yield every t-edge subset (as sorted edge-id tuples) whose edges form a connected graph."""
    if t < 1:
        raise ValueError("t must be at least 1")
    total = math.comb(g.num_edges, t)
    if total > CENSUS_GUARD:
        raise OracleBoundError(f"C({g.num_edges}, {t}) = {total} subsets exceeds {CENSUS_GUARD}")
    for ids in itertools.combinations(range(g.num_edges), t):
        if _connected_edge_set([g.edges[i] for i in ids]):
            yield ids


def exact_graphlet_census(g: AttributedGraph, t: int) -> dict[bytes, int]:
    """Count every connected t-edge subgraph of ``g`` by isomorphism class."""
    counts: Counter[bytes] = Counter()
    for ids in connected_edge_subsets(g, t):
        counts[canonical_form(edge_subset_graph(g, ids))] += 1
    return dict(counts)
