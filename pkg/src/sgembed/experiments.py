"""End-to-end pipelines: embed a dataset, build a Gram matrix, cross-validate."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .embedding import L1, embed_dataset, embedding_matrix
from .graph import perturb_edges
from .hashing import HashFunction
from .io import GraphDataset
from .kernels import gram_matrix
from .sampler import SamplerConfig
from .svm import C_GRID, CvResult, cross_validate

TAU_GRID = (0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0)


@dataclass
class PipelineConfig:
    sampler: SamplerConfig
    hash_function: HashFunction | str = HashFunction.BETWEENNESS
    use_labels: bool = False
    orders: Sequence[int] | None = None
    normalization: str = L1
    kernel: str = "hi"
    folds: int = 10
    C_grid: Sequence[float] = field(default_factory=lambda: C_GRID)
    cv_seed: int = 0
    jobs: int = 1


def dataset_gram(ds: GraphDataset, cfg: PipelineConfig) -> np.ndarray:
    embs, _ = embed_dataset(ds.graphs, cfg.sampler, cfg.hash_function, cfg.use_labels, cfg.jobs)
    X = embedding_matrix(embs, cfg.orders, cfg.normalization)
    return gram_matrix(X, cfg.kernel)


def evaluate(ds: GraphDataset, cfg: PipelineConfig) -> CvResult:
    K = dataset_gram(ds, cfg)
    return cross_validate(K, ds.class_labels, cfg.folds, cfg.C_grid, cfg.cv_seed)


def perturb_dataset(ds: GraphDataset, tau: float, seed: int = 0) -> GraphDataset:
    """Perturb every graph with its own generator, keyed by graph index."""
    graphs = [
        perturb_edges(g, tau, np.random.default_rng([seed, i])) for i, g in enumerate(ds.graphs)
    ]
    return GraphDataset(graphs, list(ds.class_labels), f"{ds.name}@tau={tau:g}")


def robustness_sweep(
    ds: GraphDataset,
    taus: Sequence[float],
    cfg: PipelineConfig,
    perturb_seed: int = 0,
    cache: dict[float, CvResult] | None = None,
) -> list[tuple[float, float, float]]:
    """Accuracy (mean, std) for each edge ratio ``tau``, in the order given."""
    rows = []
    for tau in taus:
        if cache is not None and tau in cache:
            res = cache[tau]
        else:
            res = evaluate(perturb_dataset(ds, tau, perturb_seed), cfg)
            if cache is not None:
                cache[tau] = res
        rows.append((float(tau), res.mean, res.std))
    return rows


def write_sweep_csv(rows, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau", "mean", "std"])
        for tau, mean, std in rows:
            w.writerow([f"{tau:g}", f"{mean:.6f}", f"{std:.6f}"])
