"""Hashed graphlet histograms: the stochastic graphlet embedding of a graph."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import AttributedGraph, Graphlet
from .hashing import HashFunction, edge_subset_code, hash_code
from .sampler import SamplerConfig, iter_runs

RAW = "raw"
L1 = "per-order-L1"


class VocabularyMismatch(ValueError):
    pass


def code_order(key: str) -> int:
    return int(key.split("|", 1)[0])


@dataclass(frozen=True)
class Vocabulary:
    """Sorted, duplicate-free list of hash-code keys defining embedding dimensions."""

    codes: tuple[str, ...] = ()
    hash_function: HashFunction | None = None
    t_max: int | None = None
    use_labels: bool | None = None

    def __post_init__(self) -> None:
        if list(self.codes) != sorted(set(self.codes)):
            raise ValueError("vocabulary codes must be sorted and unique")

    def __len__(self) -> int:
        return len(self.codes)

    def index(self, code: str) -> int:
        return self._index[code]

    @property
    def _index(self) -> dict[str, int]:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {c: i for i, c in enumerate(self.codes)}
            object.__setattr__(self, "_idx", idx)
        return idx

    def block(self, t: int) -> tuple[str, ...]:
        """Codes of order ``t`` in vocabulary order."""
        blocks = self.__dict__.get("_blocks")
        if blocks is None:
            blocks = {}
            for c in self.codes:
                blocks.setdefault(code_order(c), []).append(c)
            blocks = {k: tuple(v) for k, v in blocks.items()}
            object.__setattr__(self, "_blocks", blocks)
        return blocks.get(t, ())

    def check(self, cfg: SamplerConfig, f: HashFunction, use_labels: bool) -> None:
        if self.hash_function is not None and self.hash_function != f:
            raise VocabularyMismatch(f"vocabulary built for {self.hash_function.value}, not {f.value}")
        if self.t_max is not None and cfg.T > self.t_max:
            raise VocabularyMismatch(f"vocabulary covers orders up to {self.t_max}, config asks for {cfg.T}")
        if self.use_labels is not None and self.use_labels != use_labels:
            raise VocabularyMismatch("vocabulary and config disagree on label use")


def build_vocabulary(
    code_bags: Iterable[Iterable[str]],
    hash_function: HashFunction | str | None = None,
    t_max: int | None = None,
    use_labels: bool | None = None,
) -> Vocabulary:
    """Union of all codes seen, sorted; independent of the order bags are visited."""
    seen: set[str] = set()
    for bag in code_bags:
        seen.update(bag)
    f = HashFunction.parse(hash_function) if hash_function is not None else None
    return Vocabulary(tuple(sorted(seen)), f, t_max, use_labels)


@dataclass
class GraphletEmbedding:
    """Per-order histograms over the vocabulary blocks of a single graph.

    ``overflow[t]`` counts order-t graphlets whose code is missing from the
    vocabulary; ``runs[t]`` is how many runs reached order t.
    """

    histograms: dict[int, np.ndarray]
    overflow: dict[int, int] = field(default_factory=dict)
    runs: dict[int, int] = field(default_factory=dict)
    normalization: str = RAW

    @property
    def orders(self) -> list[int]:
        return sorted(self.histograms)

    def normalized(self) -> GraphletEmbedding:
        if self.normalization == L1:
            return self
        hists = {}
        for t, h in self.histograms.items():
            s = h.sum()
            hists[t] = h / s if s > 0 else h.astype(float)
        return GraphletEmbedding(hists, dict(self.overflow), dict(self.runs), L1)


def graph_code_counts(
    g: AttributedGraph,
    cfg: SamplerConfig,
    f: HashFunction | str,
    use_labels: bool = False,
    stream: int = 0,
) -> dict[int, Counter[str]]:
    """Sample ``g`` and count hash-code keys per order.

    Codes are memoised per distinct edge set, which is exact because a code
    depends only on the subgraph.
    """
    f = HashFunction.parse(f)
    counts: dict[int, Counter[str]] = {t: Counter() for t in range(0 if cfg.singletons else 1, cfg.T + 1)}
    memo: dict[frozenset[int], str] = {}
    roots: Counter[int] = Counter()
    for root, prefixes in iter_runs(g, cfg, stream=stream):
        roots[root] += 1
        for t, ids in enumerate(prefixes, start=1):
            key = frozenset(ids)
            code = memo.get(key)
            if code is None:
                code = edge_subset_code(g, ids, f, use_labels).key()
                memo[key] = code
            counts[t][code] += 1
    if cfg.singletons:
        for root, k in roots.items():
            counts[0][hash_code(Graphlet(g, frozenset(), root), f, use_labels).key()] += k
    return counts


def histogram(counts: Mapping[int, Counter[str]], vocab: Vocabulary) -> GraphletEmbedding:
    hists: dict[int, np.ndarray] = {}
    overflow: dict[int, int] = {}
    runs: dict[int, int] = {}
    for t in sorted(counts):
        block = vocab.block(t)
        pos = {c: i for i, c in enumerate(block)}
        h = np.zeros(len(block), dtype=np.int64)
        extra = 0
        for code, k in counts[t].items():
            i = pos.get(code)
            if i is None:
                extra += k
            else:
                h[i] += k
        hists[t] = h
        overflow[t] = extra
        runs[t] = int(h.sum()) + extra
    return GraphletEmbedding(hists, overflow, runs, RAW)


def embed_graph(
    g: AttributedGraph,
    cfg: SamplerConfig,
    f: HashFunction | str,
    vocab: Vocabulary,
    use_labels: bool = False,
    stream: int = 0,
) -> GraphletEmbedding:
    """Raw per-order histogram of ``g`` against a fixed vocabulary."""
    f = HashFunction.parse(f)
    vocab.check(cfg, f, use_labels)
    return histogram(graph_code_counts(g, cfg, f, use_labels, stream), vocab)


def combine_orders(
    e: GraphletEmbedding, orders: Sequence[int] | None = None, normalization: str = L1
) -> np.ndarray:
    """Concatenate the requested per-order blocks in ascending order."""
    orders = e.orders if orders is None else sorted(set(orders))
    if not orders:
        raise ValueError("need at least one order")
    missing = [t for t in orders if t not in e.histograms]
    if missing:
        raise KeyError(f"orders {missing} not present in embedding")
    if normalization == L1:
        e = e.normalized()
    elif normalization != RAW:
        raise ValueError(f"unknown normalization {normalization!r}")
    return np.concatenate([np.asarray(e.histograms[t], dtype=float) for t in orders])


def _dataset_worker(args):
    g, cfg, f, use_labels, stream = args
    return graph_code_counts(g, cfg, f, use_labels, stream)


def embed_dataset(
    graphs: Sequence[AttributedGraph],
    cfg: SamplerConfig,
    f: HashFunction | str,
    use_labels: bool = False,
    jobs: int = 1,
) -> tuple[list[GraphletEmbedding], Vocabulary]:
    """Embed every graph and build the shared vocabulary.

    Graph ``i`` samples from random stream ``i`` of ``cfg.seed``, so results
    are independent of ``jobs`` and of the order graphs are processed.
    """
    f = HashFunction.parse(f)
    tasks = [(g, cfg, f, use_labels, i) for i, g in enumerate(graphs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            all_counts = list(pool.map(_dataset_worker, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        all_counts = [_dataset_worker(t) for t in tasks]
    vocab = build_vocabulary(
        (c for counts in all_counts for c in counts.values()), f, cfg.T, use_labels
    )
    return [histogram(c, vocab) for c in all_counts], vocab


def embedding_matrix(
    embeddings: Sequence[GraphletEmbedding], orders: Sequence[int] | None = None, normalization: str = L1
) -> np.ndarray:
    if not embeddings:
        return np.zeros((0, 0))
    return np.vstack([combine_orders(e, orders, normalization) for e in embeddings])
