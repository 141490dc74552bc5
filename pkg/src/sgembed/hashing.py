"""Topological hash codes for graphlets.

Each hash function computes one structural measure per node (degree,
betweenness centrality, core number or local clustering coefficient), sorts the
values and prefixes the edge count. A t-edge code always has t + 1 value slots
(the most nodes a connected t-edge graph can have); graphs with fewer nodes are
padded with trailing zeros. All measures are exact, integers or
:class:`fractions.Fraction`, so codes compare bit-for-bit across platforms.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import NamedTuple, Sequence

from .graph import AttributedGraph, Graphlet, build_graph, induced_edge_subgraph, is_connected
from .iso import canonical_form

#: number of connected graphs with exactly t edges (OEIS A002905), t = 1..10
GRAPH_COUNTS = (1, 1, 3, 5, 12, 30, 79, 227, 710, 2322)
MAX_ENUMERATION_EDGES = 10


class HashFunction(str, enum.Enum):
    BETWEENNESS = "betweenness"
    DEGREE = "degree"
    CORE = "core"
    CLUSTERING = "clustering"

    @property
    def short(self) -> str:
        return _SHORT[self]

    @classmethod
    def parse(cls, name: str | HashFunction) -> HashFunction:
        if isinstance(name, HashFunction):
            return name
        for f in cls:
            if name in (f.value, f.short):
                return f
        raise ValueError(f"unknown hash function {name!r}")


_SHORT = {
    HashFunction.BETWEENNESS: "b",
    HashFunction.DEGREE: "d",
    HashFunction.CORE: "c",
    HashFunction.CLUSTERING: "cc",
}

# tie-break order for select_best_hash
PREFERENCE = (
    HashFunction.BETWEENNESS,
    HashFunction.DEGREE,
    HashFunction.CORE,
    HashFunction.CLUSTERING,
)


class NotConnectedError(ValueError):
    pass


def _adjacency(g: AttributedGraph | Graphlet) -> list[set[int]]:
    if isinstance(g, Graphlet):
        g = g.to_graph() if g.edge_ids else AttributedGraph(n=1 if g.root is not None else 0, edges=())
    return [set(a) for a in g.adjacency]


def degree_values(g: AttributedGraph | Graphlet) -> list[int]:
    return sorted(len(a) for a in _adjacency(g))


def betweenness_values(g: AttributedGraph | Graphlet, ordered_pairs: bool = True) -> list[Fraction]:
    """Sorted exact betweenness centralities.

    With ``ordered_pairs`` (the default) both ``(s, t)`` and ``(t, s)`` are
    counted, which is twice the usual undirected score.
    """
    adj = _adjacency(g)
    n = len(adj)
    if not _connected(adj):
        raise NotConnectedError("betweenness needs a connected graph")
    totals = [Fraction(0)] * n
    for s in range(n):
        sigma = [0] * n
        dist = [-1] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma[s] = 1
        dist[s] = 0
        stack = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        # scale dependencies by the lcm of path counts so accumulation stays integral
        scale = reduce(math.lcm, sigma, 1)
        dep = [0] * n
        while stack:
            w = stack.pop()
            share = (scale + dep[w]) // sigma[w]
            for v in preds[w]:
                dep[v] += sigma[v] * share
            if w != s and dep[w]:
                totals[w] += Fraction(dep[w], scale)
    if not ordered_pairs:
        totals = [x / 2 for x in totals]
    return sorted(totals)


def core_values(g: AttributedGraph | Graphlet) -> list[int]:
    """Sorted core numbers by repeated removal of a minimum-degree node."""
    adj = _adjacency(g)
    deg = {v: len(a) for v, a in enumerate(adj)}
    alive = set(deg)
    core = [0] * len(adj)
    level = 0
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        level = max(level, deg[v])
        core[v] = level
        alive.remove(v)
        for w in adj[v]:
            if w in alive:
                deg[w] -= 1
    return sorted(core)


def clustering_values(g: AttributedGraph | Graphlet) -> list[Fraction]:
    """Sorted local clustering coefficients; nodes of degree < 2 score 0."""
    adj = _adjacency(g)
    out = []
    for v, nb in enumerate(adj):
        k = len(nb)
        if k < 2:
            out.append(Fraction(0))
            continue
        tri = sum(len(adj[w] & nb) for w in nb) // 2
        out.append(Fraction(tri, k * (k - 1) // 2))
    return sorted(out)


def _connected(adj: list[set[int]]) -> bool:
    if len(adj) <= 1:
        return True
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(adj)


_MEASURES = {
    HashFunction.DEGREE: degree_values,
    HashFunction.BETWEENNESS: betweenness_values,
    HashFunction.CORE: core_values,
    HashFunction.CLUSTERING: clustering_values,
}


def measure_values(g: AttributedGraph | Graphlet, f: HashFunction | str) -> list[Fraction]:
    return [Fraction(x) for x in _MEASURES[HashFunction.parse(f)](g)]


@dataclass(frozen=True, order=False)
class HashCode:
    edge_count: int
    function: HashFunction
    values: tuple[Fraction, ...]
    node_labels: tuple[int, ...] | None = None
    edge_labels: tuple[int, ...] | None = None

    def key(self) -> str:
        """Canonical text form, also used as the vocabulary key."""
        vals = ",".join(f"{v.numerator}/{v.denominator}" for v in self.values)
        s = f"{self.edge_count}|{self.function.short}|{vals}"
        if self.node_labels is not None or self.edge_labels is not None:
            s += "|L:" + ",".join(map(str, self.node_labels or ()))
            s += "|E:" + ",".join(map(str, self.edge_labels or ()))
        return s

    __str__ = key

    def __lt__(self, other: HashCode) -> bool:
        return self.key() < other.key()


def parse_code_key(key: str) -> HashCode:
    parts = key.split("|")
    if len(parts) not in (3, 5):
        raise ValueError(f"malformed hash code {key!r}")
    t = int(parts[0])
    f = HashFunction.parse(parts[1])
    values = tuple(Fraction(int(a), int(b)) for a, b in (x.split("/") for x in parts[2].split(",") if x))
    nl = el = None
    if len(parts) == 5:
        nl = tuple(int(x) for x in parts[3][2:].split(",") if x)
        el = tuple(int(x) for x in parts[4][2:].split(",") if x)
    return HashCode(t, f, values, nl, el)


def _code(sub: AttributedGraph, f: HashFunction, use_labels: bool) -> HashCode:
    values = [Fraction(x) for x in _MEASURES[f](sub)]
    values += [Fraction(0)] * (sub.num_edges + 1 - len(values))
    nl = el = None
    if use_labels:
        nl = tuple(sorted(sub.node_labels)) if sub.node_labels is not None else ()
        el = tuple(sorted(sub.edge_labels)) if sub.edge_labels is not None else ()
    return HashCode(sub.num_edges, f, tuple(values), nl, el)


def hash_code(
    g: AttributedGraph | Graphlet, f: HashFunction | str, use_labels: bool = False
) -> HashCode:
    """Permutation-invariant code of a connected graphlet.

    >>> hash_code(build_graph(2, [(0, 1)]), "degree").key()
    '1|d|1/1,1/1'
    """
    f = HashFunction.parse(f)
    if isinstance(g, Graphlet):
        sub = g.to_graph() if g.edge_ids else _singleton(g)
    else:
        sub = g
    if not is_connected(sub):
        raise NotConnectedError("hash codes are defined for connected graphlets only")
    return _code(sub, f, use_labels)


def _singleton(g: Graphlet) -> AttributedGraph:
    p = g.parent
    nl = (p.node_labels[g.root],) if p.node_labels is not None else None
    return AttributedGraph(n=1, edges=(), node_labels=nl,
                           edge_labels=() if p.edge_labels is not None else None)


def edge_subset_code(
    g: AttributedGraph, edge_ids, f: HashFunction | str, use_labels: bool = False
) -> HashCode:
    """Code of the subgraph formed by ``edge_ids`` of ``g``; connectivity is not re-checked."""
    return _code(induced_edge_subgraph(g, edge_ids), HashFunction.parse(f), use_labels)


# -- enumeration and collision analysis --------------------------------------

_enum_cache: dict[int, list[AttributedGraph]] = {}


def graph_count_with_edges(t: int) -> int:
    if not 1 <= t <= len(GRAPH_COUNTS):
        raise ValueError(f"graph counts are tabulated for 1 <= t <= {len(GRAPH_COUNTS)}, got {t}")
    return GRAPH_COUNTS[t - 1]


def enumerate_connected_graphs(t: int, max_edges: int = MAX_ENUMERATION_EDGES) -> list[AttributedGraph]:
    """One representative per isomorphism class of connected graphs with ``t`` edges.

    Built level by level: every (t-1)-edge representative is extended by one
    edge, either between two existing non-adjacent nodes or to a fresh node,
    and duplicates are removed by canonical form.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    if t > max_edges:
        raise ValueError(f"enumeration is bounded to t <= {max_edges}")
    if t in _enum_cache:
        return list(_enum_cache[t])
    if t == 1:
        level = [AttributedGraph(n=2, edges=((0, 1),))]
    else:
        seen: dict[bytes, AttributedGraph] = {}
        for parent in enumerate_connected_graphs(t - 1, max_edges):
            n = parent.n
            present = set(parent.edges)
            candidates = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in present]
            candidates += [(u, n) for u in range(n)]
            for u, v in candidates:
                child_n = max(n, v + 1)
                child = AttributedGraph(n=child_n, edges=tuple(sorted(parent.edges + ((u, v),))))
                key = canonical_form(child)
                if key not in seen:
                    seen[key] = child
        level = [seen[k] for k in sorted(seen)]
    _enum_cache[t] = level
    return list(level)


class CollisionStats(NamedTuple):
    collisions: int
    pairs: int
    rate: float


def collision_rate(t: int, f: HashFunction | str, max_edges: int = MAX_ENUMERATION_EDGES) -> CollisionStats:
    """Collisions among the non-isomorphic t-edge graphs, normalised by C(a, 2).

    Representatives are inserted into a hash table one at a time; a collision
    is counted whenever a code is already occupied, i.e. ``a - #distinct codes``.
    """
    f = HashFunction.parse(f)
    reps = enumerate_connected_graphs(t, max_edges)
    codes = {hash_code(g, f).key() for g in reps}
    collisions = len(reps) - len(codes)
    pairs = math.comb(len(reps), 2)
    return CollisionStats(collisions, pairs, collisions / pairs if pairs else 0.0)


def conditional_collision_terms(
    t: int, f: HashFunction | str, max_edges: int = MAX_ENUMERATION_EDGES
) -> tuple[int, int]:
    """Numerator and denominator of ``1 - P(isomorphic | equal code)`` over the representatives.

    Returns ``(isomorphic_equal_pairs, equal_code_pairs)``. Because the
    representatives are pairwise non-isomorphic the first term is always 0.
    """
    f = HashFunction.parse(f)
    reps = enumerate_connected_graphs(t, max_edges)
    codes = [hash_code(g, f).key() for g in reps]
    forms = [canonical_form(g) for g in reps]
    equal = iso = 0
    for i, j in combinations(range(len(reps)), 2):
        if codes[i] == codes[j]:
            equal += 1
            iso += forms[i] == forms[j]
    return iso, equal


def select_best_hash(
    fs: Sequence[HashFunction | str], t: int, max_edges: int = MAX_ENUMERATION_EDGES
) -> HashFunction:
    """Hash function with the lowest collision rate at order ``t``."""
    if not fs:
        raise ValueError("need at least one hash function")
    parsed = sorted({HashFunction.parse(f) for f in fs}, key=PREFERENCE.index)
    return min(parsed, key=lambda f: collision_rate(t, f, max_edges).rate)
