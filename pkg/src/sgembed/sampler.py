"""Stochastic graphlet parsing by random walk with restart.

Every run starts from a uniformly chosen non-isolated node and grows a
connected edge set one edge at a time for ``T`` steps. Before each step the
expansion node is either the node reached by the previous step (probability
``alpha``) or a uniform draw from the nodes collected so far. The new edge is
drawn among the expansion node's unused edges. After step ``t`` the current
edge set is recorded as an order-``t`` graphlet.

Randomness is counter-addressed: run ``i`` of a graph always reads the same
block of a Philox stream, so the result does not depend on how runs are split
across workers.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Iterator

import numpy as np

from .graph import AttributedGraph, Graphlet
from .hashing import graph_count_with_edges

# uniforms drawn per step: walk/restart coin, restart node, edge, fallback node
_DRAWS_PER_STEP = 4


def sample_complexity(a: int, epsilon: float, delta: float) -> int:
    """Runs needed so the empirical distribution over ``a`` classes is within
    ``epsilon`` (L1) of the truth with probability at least ``1 - delta``.

    >>> sample_complexity(5, 0.1, 0.1)
    1154
    """
    if a < 1:
        raise ValueError(f"class count must be >= 1, got {a}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return math.ceil(2 * (a * math.log(2) + math.log(1 / delta)) / epsilon**2)


def runs_for_order(t: int, epsilon: float, delta: float) -> int:
    return sample_complexity(graph_count_with_edges(t), epsilon, delta)


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters of a parsing job.

    ``label_mismatch_weight`` scales the probability of stepping onto a
    neighbour whose node label differs from the expansion node's; 1 means
    labels do not bias the walk.
    """

    M: int
    T: int
    alpha: float = 0.5
    seed: int = 0
    label_mismatch_weight: float = 1.0
    singletons: bool = False

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0 < self.label_mismatch_weight <= 1:
            raise ValueError("label_mismatch_weight must lie in (0, 1]")

    @classmethod
    def from_bounds(cls, T: int, epsilon: float, delta: float, **kw) -> SamplerConfig:
        """Config whose M satisfies the sample bound for every order up to T."""
        M = max(runs_for_order(t, epsilon, delta) for t in range(1, T + 1))
        return cls(M=M, T=T, **kw)


@dataclass
class GraphletSample:
    """Per-order bags of sampled graphlets, in run order."""

    T: int
    bags: dict[int, list[Graphlet]] = field(default_factory=dict)

    @property
    def run_count_completed(self) -> dict[int, int]:
        return {t: len(b) for t, b in self.bags.items()}


def _key(seed: int, stream: int = 0) -> np.ndarray:
    return np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, stream]).generate_state(2, np.uint64)


def run_uniforms(cfg: SamplerConfig, start: int, stop: int, stream: int = 0) -> np.ndarray:
    """Uniforms for runs ``start..stop-1``, one row per run."""
    blocks = cfg.T + 1  # Philox yields 4 doubles per counter step
    bitgen = np.random.Philox(
        key=_key(cfg.seed, stream), counter=np.array([start * blocks, 0, 0, 0], dtype=np.uint64)
    )
    return np.random.Generator(bitgen).random((stop - start, blocks * _DRAWS_PER_STEP))


class _Walker:
    """Per-graph lookup tables shared by all runs."""

    def __init__(self, g: AttributedGraph, cfg: SamplerConfig):
        self.g = g
        self.cfg = cfg
        self.inc = g.incidence
        self.starts = [v for v in range(g.n) if self.inc[v]]
        self.weighted = g.node_labels is not None and cfg.label_mismatch_weight != 1.0

    def _pick_edge(self, u: int, free: list[tuple[int, int]], r: float) -> tuple[int, int]:
        if not self.weighted:
            return free[int(r * len(free))]
        labels = self.g.node_labels
        w = self.cfg.label_mismatch_weight
        cum = list(accumulate(1.0 if labels[v] == labels[u] else w for _, v in free))
        return free[min(bisect_right(cum, r * cum[-1]), len(free) - 1)]

    def run(self, r: np.ndarray) -> tuple[int, list[tuple[int, ...]]]:
        """One run; returns the start node and the edge-id prefix after each step."""
        cfg = self.cfg
        inc = self.inc
        start = self.starts[int(r[0] * len(self.starts))]
        nodes = [start]
        in_nodes = {start}
        used: set[int] = set()
        order: list[int] = []
        last = start
        out: list[tuple[int, ...]] = []
        for t in range(cfg.T):
            base = _DRAWS_PER_STEP * (t + 1)
            if r[base] < cfg.alpha:
                u = last
            else:
                u = nodes[int(r[base + 1] * len(nodes))]
            free = [(e, v) for e, v in inc[u] if e not in used]
            if not free:
                open_nodes = [x for x in nodes if any(e not in used for e, _ in inc[x])]
                if not open_nodes:
                    break
                u = open_nodes[int(r[base + 3] * len(open_nodes))]
                free = [(e, v) for e, v in inc[u] if e not in used]
            eid, v = self._pick_edge(u, free, r[base + 2])
            used.add(eid)
            order.append(eid)
            if v not in in_nodes:
                in_nodes.add(v)
                nodes.append(v)
            last = v
            out.append(tuple(order))
        return start, out


def iter_runs(
    g: AttributedGraph, cfg: SamplerConfig, start: int = 0, stop: int | None = None, stream: int = 0
) -> Iterator[tuple[int, list[tuple[int, ...]]]]:
    """Yield ``(start_node, prefixes)`` for runs ``start..stop-1``; nothing for edgeless graphs."""
    stop = cfg.M if stop is None else stop
    if g.num_edges == 0:
        return
    walker = _Walker(g, cfg)
    uniforms = run_uniforms(cfg, start, stop, stream)
    for row in uniforms:
        yield walker.run(row)


def _chunk_bounds(M: int, jobs: int) -> list[tuple[int, int]]:
    step = math.ceil(M / jobs)
    return [(a, min(a + step, M)) for a in range(0, M, step)]


def _collect(args) -> list[tuple[int, list[tuple[int, ...]]]]:
    g, cfg, a, b, stream = args
    return list(iter_runs(g, cfg, a, b, stream))


def parse_graphlets(
    g: AttributedGraph, cfg: SamplerConfig, jobs: int = 1, stream: int = 0
) -> GraphletSample:
    """Sample ``cfg.M`` runs of up to ``cfg.T`` edges each.

    Runs that exhaust their component stop early, so an order-t bag may hold
    fewer than M graphlets. With ``cfg.singletons`` the start nodes form the
    order-0 bag.
    """
    sample = GraphletSample(T=cfg.T, bags={t: [] for t in range(0 if cfg.singletons else 1, cfg.T + 1)})
    if g.num_edges == 0:
        return sample
    if jobs > 1 and cfg.M > 1:
        chunks = [(g, cfg, a, b, stream) for a, b in _chunk_bounds(cfg.M, jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = [r for part in pool.map(_collect, chunks) for r in part]
    else:
        runs = list(iter_runs(g, cfg, stream=stream))
    for root, prefixes in runs:
        if cfg.singletons:
            sample.bags[0].append(Graphlet(g, frozenset(), root))
        for t, ids in enumerate(prefixes, start=1):
            sample.bags[t].append(Graphlet(g, frozenset(ids)))
    return sample

