"""Attributed undirected graphs and the connected edge-subgraphs sampled from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

Edge = tuple[int, int]

#: label given to edges inserted by :func:`perturb_edges` on edge-labelled graphs
ADDED_EDGE_LABEL = -1


class GraphError(ValueError):
    """Raised when a graph fails validation."""


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """Undirected simple graph on nodes ``0..n-1`` with optional discrete labels.

    Use :func:`build_graph` to construct one; the constructor trusts its inputs.
    Edges are stored as sorted ``(u, v)`` pairs with ``u < v`` and are addressed
    by their position in :attr:`edges` (the *edge id*).
    """

    n: int
    edges: tuple[Edge, ...]
    node_labels: tuple[int, ...] | None = None
    edge_labels: tuple[int, ...] | None = None

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @cached_property
    def incidence(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per node, the ``(edge_id, other_endpoint)`` pairs, ordered by edge id."""
        inc: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for eid, (u, v) in enumerate(self.edges):
            inc[u].append((eid, v))
            inc[v].append((eid, u))
        return tuple(tuple(x) for x in inc)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edge_index

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edge_label(self, u: int, v: int) -> int | None:
        if self.edge_labels is None:
            return None
        return self.edge_labels[self.edge_index[_norm(u, v)]]

    def relabel(self, perm: Sequence[int]) -> AttributedGraph:
        """Return the isomorphic copy in which node ``i`` becomes ``perm[i]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabel needs a permutation of 0..n-1")
        node_labels = None
        if self.node_labels is not None:
            nl = [0] * self.n
            for i, lab in enumerate(self.node_labels):
                nl[perm[i]] = lab
            node_labels = nl
        edges = [(perm[u], perm[v]) for u, v in self.edges]
        return build_graph(self.n, edges, node_labels, self.edge_labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttributedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edges == other.edges
            and self.node_labels == other.node_labels
            and self.edge_labels == other.edge_labels
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.node_labels, self.edge_labels))

    def __repr__(self) -> str:
        return f"AttributedGraph(n={self.n}, m={len(self.edges)})"


def build_graph(
    n: int,
    edges: Iterable[Sequence[int]],
    node_labels: Sequence[int] | Mapping[int, int] | None = None,
    edge_labels: Sequence[int] | Mapping[Edge, int] | None = None,
) -> AttributedGraph:
    """Validate and build an :class:`AttributedGraph`.

    ``edge_labels`` is either aligned with ``edges`` or a mapping keyed by
    node pair (either orientation). Edges are sorted canonically; labels follow
    their edge.
    """
    if n < 0:
        raise GraphError(f"negative node count {n}")
    pairs: list[Edge] = []
    seen: set[Edge] = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise GraphError(f"self-loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for {n} nodes")
        key = _norm(u, v)
        if key in seen:
            raise GraphError(f"duplicate edge {key}")
        seen.add(key)
        pairs.append(key)

    nl = None
    if node_labels is not None:
        if isinstance(node_labels, Mapping):
            missing = [v for v in range(n) if v not in node_labels]
            if missing or len(node_labels) != n:
                raise GraphError("node_labels must label every node exactly once")
            nl = tuple(int(node_labels[v]) for v in range(n))
        else:
            if len(node_labels) != n:
                raise GraphError(f"expected {n} node labels, got {len(node_labels)}")
            nl = tuple(int(x) for x in node_labels)

    el_by_edge: dict[Edge, int] | None = None
    if edge_labels is not None:
        if isinstance(edge_labels, Mapping):
            el_by_edge = {}
            for (a, b), lab in edge_labels.items():
                el_by_edge[_norm(int(a), int(b))] = int(lab)
            if set(el_by_edge) != seen:
                raise GraphError("edge_labels must label every edge exactly once")
        else:
            if len(edge_labels) != len(pairs):
                raise GraphError(f"expected {len(pairs)} edge labels, got {len(edge_labels)}")
            el_by_edge = {p: int(lab) for p, lab in zip(pairs, edge_labels)}

    order = sorted(pairs)
    el = tuple(el_by_edge[p] for p in order) if el_by_edge is not None else None
    return AttributedGraph(n=n, edges=tuple(order), node_labels=nl, edge_labels=el)


@dataclass(frozen=True)
class Graphlet:
    """Connected edge-subgraph of ``parent`` given by a set of parent edge ids.

    The zero-edge singleton is represented by ``edge_ids=()`` and ``root``.
    """

    parent: AttributedGraph = field(repr=False, compare=False)
    edge_ids: frozenset[int]
    root: int | None = None

    @property
    def num_edges(self) -> int:
        return len(self.edge_ids)

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.parent.edges[i] for i in self.edge_ids))

    @cached_property
    def nodes(self) -> tuple[int, ...]:
        if not self.edge_ids:
            return () if self.root is None else (self.root,)
        return tuple(sorted({x for e in self.edges for x in e}))

    def to_graph(self) -> AttributedGraph:
        """Standalone copy with nodes renumbered ``0..k-1`` in parent order."""
        return induced_edge_subgraph(self.parent, self.edge_ids, self.nodes)


def induced_edge_subgraph(
    g: AttributedGraph, edge_ids: Iterable[int], nodes: Sequence[int] | None = None
) -> AttributedGraph:
    ids = sorted(edge_ids)
    if nodes is None:
        nodes = sorted({x for i in ids for x in g.edges[i]})
    pos = {v: i for i, v in enumerate(nodes)}
    edges = [(pos[g.edges[i][0]], pos[g.edges[i][1]]) for i in ids]
    nl = [g.node_labels[v] for v in nodes] if g.node_labels is not None else None
    el = [g.edge_labels[i] for i in ids] if g.edge_labels is not None else None
    return build_graph(len(nodes), edges, nl, el)


def is_connected(g: AttributedGraph | Graphlet) -> bool:
    """True iff a single component covers every node; the empty graph counts as connected."""
    if isinstance(g, Graphlet):
        g = g.to_graph() if g.edge_ids else build_graph(1 if g.root is not None else 0, [])
    if g.n <= 1:
        return True
    adj = g.adjacency
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.n


def degree_sequence(g: AttributedGraph | Graphlet) -> list[int]:
    if isinstance(g, Graphlet):
        g = g.to_graph()
    return sorted(len(a) for a in g.adjacency)


def components(g: AttributedGraph) -> list[list[int]]:
    adj = g.adjacency
    comp = [-1] * g.n
    out: list[list[int]] = []
    for s in range(g.n):
        if comp[s] >= 0:
            continue
        members = [s]
        comp[s] = len(out)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if comp[w] < 0:
                    comp[w] = comp[s]
                    members.append(w)
                    stack.append(w)
        out.append(sorted(members))
    return out


def _round_half_up(x: float) -> int:
    # guard against 0.1-style representation error before flooring
    return int(np.floor(x + 0.5 + 1e-9))


def perturb_edges(
    g: AttributedGraph, tau: float, rng: np.random.Generator | int
) -> AttributedGraph:
    """Delete or add edges uniformly so the result has ``round(tau * |E|)`` edges.

    ``tau < 1`` removes edges, ``tau > 1`` inserts absent node pairs and
    ``tau == 1`` returns an unchanged copy. Node labels are kept; inserted
    edges on an edge-labelled graph get :data:`ADDED_EDGE_LABEL`.
    """
    if not tau > 0:
        raise GraphError(f"tau must be positive, got {tau}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    m = g.num_edges
    if tau == 1:
        return build_graph(g.n, g.edges, g.node_labels, g.edge_labels)

    if tau < 1:
        k = _round_half_up((1 - tau) * m)
        drop = set(rng.choice(m, size=k, replace=False).tolist()) if k else set()
        keep = [i for i in range(m) if i not in drop]
        el = [g.edge_labels[i] for i in keep] if g.edge_labels is not None else None
        return build_graph(g.n, [g.edges[i] for i in keep], g.node_labels, el)

    k = _round_half_up((tau - 1) * m)
    present = set(g.edges)
    absent = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if (u, v) not in present]
    if k > len(absent):
        raise GraphError(f"cannot add {k} edges: only {len(absent)} node pairs are free")
    picks = rng.choice(len(absent), size=k, replace=False) if k else []
    new_edges = list(g.edges) + [absent[i] for i in sorted(picks)]
    el = None
    if g.edge_labels is not None:
        el = list(g.edge_labels) + [ADDED_EDGE_LABEL] * k
    return build_graph(g.n, new_edges, g.node_labels, el)
