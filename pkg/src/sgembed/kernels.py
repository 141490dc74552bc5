"""Kernels between embedding vectors, Gram matrices and ranking scores."""

from __future__ import annotations

from typing import Callable, Hashable, Sequence

import numpy as np


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return x, y


def hi_kernel(x, y) -> float:
    """Histogram intersection ``sum(min(x_i, y_i))`` of two non-negative vectors.

    >>> hi_kernel([1, 2, 3], [2, 1, 3])
    5.0
    """
    x, y = _pair(x, y)
    if (x < 0).any() or (y < 0).any():
        raise ValueError("histogram intersection needs non-negative entries")
    return float(np.minimum(x, y).sum())


def cosine_sim(x, y) -> float:
    x, y = _pair(x, y)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(np.clip(x @ y / (nx * ny), -1.0, 1.0))


def _hi_block(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.empty((len(A), len(B)))
    for i, a in enumerate(A):
        out[i] = np.minimum(a, B).sum(axis=1)
    return out


def _cos_block(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    na = np.linalg.norm(A, axis=1)
    nb = np.linalg.norm(B, axis=1)
    if (na == 0).any() or (nb == 0).any():
        raise ValueError("cosine similarity is undefined for a zero vector")
    return np.clip((A / na[:, None]) @ (B / nb[:, None]).T, -1.0, 1.0)


KERNELS: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "hi": _hi_block,
    "cosine": _cos_block,
}


def _as_matrix(vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        X = vectors.astype(float, copy=False)
    else:
        rows = [np.asarray(v, dtype=float) for v in vectors]
        if len({r.shape for r in rows}) > 1:
            raise ValueError("all vectors must have the same dimension")
        X = np.vstack(rows) if rows else np.zeros((0, 0))
    if X.ndim != 2:
        raise ValueError("expected a 2-d array of vectors")
    return X


def cross_kernel(A, B, kernel: str = "hi") -> np.ndarray:
    """Kernel values between every row of ``A`` and every row of ``B``."""
    A, B = _as_matrix(A), _as_matrix(B)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if kernel == "hi" and ((A < 0).any() or (B < 0).any()):
        raise ValueError("histogram intersection needs non-negative entries")
    return KERNELS[kernel](A, B)


def gram_matrix(vectors, kernel: str = "hi") -> np.ndarray:
    """Symmetric matrix of pairwise kernel values."""
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; choose from {sorted(KERNELS)}")
    X = _as_matrix(vectors)
    K = cross_kernel(X, X, kernel)
    # exact symmetry regardless of floating-point summation order
    iu = np.triu_indices(len(K), 1)
    K[(iu[1], iu[0])] = K[iu]
    return K


def retrieval_rho(classifier_ranking: Sequence[Hashable], truth_ranking: Sequence[Hashable]) -> float:
    """Agreement of two best-first rankings over the same models.

    Averages the reciprocal rank of each ranking's top model in the other.
    """
    if not classifier_ranking or not truth_ranking:
        raise ValueError("rankings must be non-empty")
    if set(classifier_ranking) != set(truth_ranking):
        raise ValueError("rankings must cover the same models")
    r_cg = list(truth_ranking).index(classifier_ranking[0]) + 1
    r_gc = list(classifier_ranking).index(truth_ranking[0]) + 1
    return rho_from_ranks(r_cg, r_gc)


def rho_from_ranks(r_cg: int, r_gc: int) -> float:
    """
    >>> rho_from_ranks(2, 1)
    0.75
    """
    if r_cg < 1 or r_gc < 1:
        raise ValueError("ranks start at 1")
    return 0.5 * (1.0 / r_cg + 1.0 / r_gc)


def rank_models(query, models, ids: Sequence[Hashable] | None = None, kernel: str = "cosine") -> list:
    """Model ids sorted by decreasing similarity to ``query``; ties keep model order."""
    sims = cross_kernel([query], models, kernel)[0]
    ids = list(range(len(sims))) if ids is None else list(ids)
    order = np.argsort(-sims, kind="stable")
    return [ids[i] for i in order]
