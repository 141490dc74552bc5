"""Reading TU benchmark datasets and persisting embeddings and Gram matrices."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embedding import RAW, GraphletEmbedding, Vocabulary
from .graph import AttributedGraph, build_graph
from .hashing import HashFunction

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


class DatasetError(ValueError):
    pass


class EmbeddingFileError(ValueError):
    pass


class CorruptFileError(EmbeddingFileError):
    pass


class VersionMismatchError(EmbeddingFileError):
    pass


@dataclass
class GraphDataset:
    graphs: list[AttributedGraph]
    class_labels: list[int]
    name: str = ""
    raw_class_labels: list[int] | None = None
    raw_edge_lines: int = 0

    def __post_init__(self) -> None:
        if len(self.graphs) != len(self.class_labels):
            raise DatasetError("one class label per graph is required")

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def num_classes(self) -> int:
        return len(set(self.class_labels))

    def subset(self, indices: Sequence[int]) -> GraphDataset:
        return GraphDataset(
            [self.graphs[i] for i in indices], [self.class_labels[i] for i in indices], self.name
        )


def _read_ints(path: Path) -> list[int]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            try:
                out.append(int(s.split(",")[0]))
            except ValueError:
                raise DatasetError(f"{path.name}:{lineno}: expected an integer, got {s!r}") from None
    return out


def _read_pairs(path: Path) -> list[tuple[int, int]]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            parts = s.split(",")
            if len(parts) != 2:
                raise DatasetError(f"{path.name}:{lineno}: expected 'i, j', got {s!r}")
            try:
                out.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise DatasetError(f"{path.name}:{lineno}: bad node id in {s!r}") from None
    return out


def load_tu_dataset(directory: str | Path, name: str) -> GraphDataset:
    """Load a dataset in the TU benchmark text format.

    Both directions of an edge are merged into one undirected edge. An edge
    listed in one direction only is kept and counted in a warning.
    """
    d = Path(directory)

    def f(suffix: str) -> Path:
        return d / f"{name}_{suffix}.txt"

    for suffix in ("A", "graph_indicator", "graph_labels"):
        if not f(suffix).is_file():
            raise FileNotFoundError(f"missing mandatory file {f(suffix)}")

    indicator = _read_ints(f("graph_indicator"))
    raw_classes = _read_ints(f("graph_labels"))
    pairs = _read_pairs(f("A"))
    n_total = len(indicator)
    graph_ids = sorted(set(indicator))
    if graph_ids != list(range(1, len(graph_ids) + 1)):
        raise DatasetError("graph indicator values must be 1..N without gaps")
    if len(raw_classes) != len(graph_ids):
        raise DatasetError(f"{len(raw_classes)} graph labels for {len(graph_ids)} graphs")

    node_labels = _read_ints(f("node_labels")) if f("node_labels").is_file() else None
    if node_labels is not None and len(node_labels) != n_total:
        raise DatasetError(f"{len(node_labels)} node labels for {n_total} nodes")
    edge_labels = _read_ints(f("edge_labels")) if f("edge_labels").is_file() else None
    if edge_labels is not None and len(edge_labels) != len(pairs):
        raise DatasetError(f"{len(edge_labels)} edge labels for {len(pairs)} edge lines")

    # global node id -> (graph, local id)
    local = [0] * n_total
    first = {}
    for i, gid in enumerate(indicator):
        first.setdefault(gid, i)
        local[i] = i - first[gid]
        if i and indicator[i - 1] > gid:
            raise DatasetError("graph indicator must be non-decreasing")
    sizes = {gid: 0 for gid in graph_ids}
    for gid in indicator:
        sizes[gid] += 1

    directed: list[dict[tuple[int, int], int | None]] = [{} for _ in graph_ids]
    for k, (i, j) in enumerate(pairs):
        if not (1 <= i <= n_total and 1 <= j <= n_total):
            raise DatasetError(f"edge line {k + 1} references unknown node")
        gi, gj = indicator[i - 1], indicator[j - 1]
        if gi != gj:
            raise DatasetError(f"edge line {k + 1} joins graphs {gi} and {gj}")
        if i == j:
            raise DatasetError(f"edge line {k + 1} is a self-loop")
        directed[gi - 1][(local[i - 1], local[j - 1])] = edge_labels[k] if edge_labels else None

    graphs = []
    asymmetric = 0
    for gid, arcs in zip(graph_ids, directed):
        und: dict[tuple[int, int], int | None] = {}
        for (u, v), lab in arcs.items():
            if (v, u) not in arcs:
                asymmetric += 1
            key = (u, v) if u < v else (v, u)
            if key in und and und[key] != lab:
                raise DatasetError(f"graph {gid}: edge {key} has conflicting labels")
            und[key] = lab
        nl = None
        if node_labels is not None:
            start = first[gid]
            nl = node_labels[start : start + sizes[gid]]
        el = [und[e] for e in und] if edge_labels is not None else None
        graphs.append(build_graph(sizes[gid], list(und), nl, el))
    if asymmetric:
        log.warning("%s: %d edges listed in one direction only, treated as undirected", name, asymmetric)

    remap = {c: i for i, c in enumerate(sorted(set(raw_classes)))}
    return GraphDataset(
        graphs, [remap[c] for c in raw_classes], name, raw_class_labels=raw_classes, raw_edge_lines=len(pairs)
    )


def save_embeddings(
    embeddings: Sequence[GraphletEmbedding],
    vocab: Vocabulary,
    path: str | Path,
    class_labels: Sequence[int] | None = None,
    dataset: str = "",
    extra: dict | None = None,
) -> None:
    """Write a versioned JSON-lines file: one header line, then one line per graph."""
    header = {
        "format_version": FORMAT_VERSION,
        "dataset": dataset,
        "t_max": vocab.t_max,
        "hash_function": vocab.hash_function.value if vocab.hash_function else None,
        "use_labels": vocab.use_labels,
        "n_graphs": len(embeddings),
        "vocabulary": list(vocab.codes),
    }
    if extra:
        header["extra"] = extra
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for i, e in enumerate(embeddings):
            if e.normalization != RAW:
                raise EmbeddingFileError("only raw count embeddings can be saved")
            rec = {
                "graph_index": i,
                "class": None if class_labels is None else int(class_labels[i]),
                "histograms": {str(t): [int(x) for x in h] for t, h in sorted(e.histograms.items())},
                "overflow": {str(t): int(x) for t, x in sorted(e.overflow.items())},
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_embeddings(path: str | Path) -> tuple[list[GraphletEmbedding], Vocabulary, list[int | None], dict]:
    """Inverse of :func:`save_embeddings`; returns embeddings, vocabulary, classes and header."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise CorruptFileError(f"{path}: missing final newline, file looks truncated")
    try:
        header = json.loads(lines[0])
    except (json.JSONDecodeError, IndexError) as exc:
        raise CorruptFileError(f"{path}: unreadable header") from exc
    if not isinstance(header, dict) or "format_version" not in header:
        raise CorruptFileError(f"{path}: header lacks format_version")
    if header["format_version"] != FORMAT_VERSION:
        raise VersionMismatchError(f"{path}: format version {header['format_version']}, expected {FORMAT_VERSION}")
    try:
        hf = header["hash_function"]
        vocab = Vocabulary(
            tuple(header["vocabulary"]),
            HashFunction.parse(hf) if hf else None,
            header["t_max"],
            header.get("use_labels"),
        )
        n = header["n_graphs"]
    except (KeyError, ValueError, TypeError) as exc:
        raise CorruptFileError(f"{path}: malformed header") from exc
    if len(lines) - 1 != n:
        raise CorruptFileError(f"{path}: header promises {n} graphs, found {len(lines) - 1}")

    embeddings, classes = [], []
    for k, line in enumerate(lines[1:]):
        try:
            rec = json.loads(line)
            if rec["graph_index"] != k:
                raise CorruptFileError(f"{path}: record {k} has graph_index {rec['graph_index']}")
            hists = {int(t): np.array(v, dtype=np.int64) for t, v in rec["histograms"].items()}
            over = {int(t): int(v) for t, v in rec["overflow"].items()}
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptFileError(f"{path}: bad record {k}") from exc
        for t, h in hists.items():
            if len(h) != len(vocab.block(t)):
                raise CorruptFileError(f"{path}: record {k} order {t} does not match the vocabulary")
        runs = {t: int(h.sum()) + over.get(t, 0) for t, h in hists.items()}
        embeddings.append(GraphletEmbedding(hists, over, runs, RAW))
        classes.append(rec.get("class"))
    return embeddings, vocab, classes, header


def save_gram(matrix, labels: Sequence[int], path: str | Path, tol: float = 1e-9) -> None:
    """Write ``label k_1 ... k_n`` per row with round-trip precision."""
    K = np.asarray(matrix, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"Gram matrix must be square, got shape {K.shape}")
    if len(labels) != K.shape[0]:
        raise ValueError("one label per row is required")
    if not np.allclose(K, K.T, rtol=0, atol=tol):
        raise ValueError(f"Gram matrix is not symmetric within {tol}")
    with open(path, "w") as fh:
        for lab, row in zip(labels, K):
            fh.write(" ".join([str(int(lab))] + ["%.17g" % x for x in row]) + "\n")


def load_gram(path: str | Path) -> tuple[np.ndarray, list[int]]:
    rows = np.loadtxt(path, ndmin=2)
    if rows.size == 0:
        return np.zeros((0, 0)), []
    labels = [int(x) for x in rows[:, 0]]
    K = rows[:, 1:]
    if K.shape[0] != K.shape[1]:
        raise ValueError(f"{path}: not a square Gram matrix")
    return K, labels
