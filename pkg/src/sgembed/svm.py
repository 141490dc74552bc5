"""Support vector classification on precomputed kernels.

The binary solver is sequential minimal optimisation with second-order working
set selection; multiclass problems are solved one-vs-all.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.model_selection import StratifiedKFold

log = logging.getLogger(__name__)

C_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)
_TAU = 1e-12


@dataclass
class SvmModel:
    alpha: np.ndarray
    y: np.ndarray
    b: float
    C: float
    converged: bool = True
    iterations: int = 0
    kkt_gap: float = 0.0
    positive_class: int | None = None

    def decision(self, K_rows) -> np.ndarray:
        """Scores for kernel rows against the training set (shape (k, n_train))."""
        K_rows = np.atleast_2d(np.asarray(K_rows, dtype=float))
        return K_rows @ (self.alpha * self.y) + self.b


def svm_train(K, labels, C: float = 1.0, tol: float = 1e-3, max_iter: int = 100_000) -> SvmModel:
    """Solve the C-SVM dual for labels in {-1, +1}.

    Stops when the maximal KKT violation drops below ``tol``. If ``max_iter``
    is reached first, the current iterate is returned with ``converged=False``.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(labels, dtype=float)
    n = len(y)
    if K.shape != (n, n):
        raise ValueError(f"kernel shape {K.shape} does not match {n} labels")
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise ValueError("labels must be -1 or +1")
    if C <= 0:
        raise ValueError("C must be positive")

    alpha = np.zeros(n)
    if len(np.unique(y)) < 2:
        return SvmModel(alpha, y, float(y[0]) if n else 0.0, C)

    Q = K * np.outer(y, y)
    diag = np.diag(Q).copy()
    grad = -np.ones(n)
    it = 0
    gap = np.inf
    while it < max_iter:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        score = -y * grad
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        m_up = score[i]
        m_low = score[low].min()
        gap = m_up - m_low
        if gap < tol:
            break

        cand = low & (score < m_up)
        idx = np.flatnonzero(cand)
        b = m_up - score[idx]
        a = diag[i] + diag[idx] - 2 * y[i] * y[idx] * Q[i, idx]
        a = np.where(a > 0, a, _TAU)
        j = int(idx[np.argmin(-(b * b) / a)])

        # two-variable update, clipped to the box
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(Q[i, i] + Q[j, j] + 2 * Q[i, j], _TAU)
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            ai, aj = old_i + delta, old_j + delta
            if diff > 0 and aj < 0:
                aj, ai = 0.0, diff
            elif diff <= 0 and ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0 and ai > C:
                ai, aj = C, C - diff
            elif diff <= 0 and aj > C:
                aj, ai = C, C + diff
        else:
            quad = max(Q[i, i] + Q[j, j] - 2 * Q[i, j], _TAU)
            delta = (grad[i] - grad[j]) / quad
            s = old_i + old_j
            ai, aj = old_i - delta, old_j + delta
            if s > C and ai > C:
                ai, aj = C, s - C
            elif s <= C and aj < 0:
                aj, ai = 0.0, s
            if s > C and aj > C:
                aj, ai = C, s - C
            elif s <= C and ai < 0:
                ai, aj = 0.0, s
        alpha[i], alpha[j] = ai, aj
        grad += Q[:, i] * (ai - old_i) + Q[:, j] * (aj - old_j)
        it += 1

    converged = gap < tol
    if not converged:
        log.warning("SMO stopped after %d iterations with KKT gap %.3g", it, gap)

    # bias from free vectors, else the midpoint of the feasible interval
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = yg[free].mean()
    else:
        ub, lb = np.inf, -np.inf
        for t in range(n):
            at_upper = alpha[t] >= C
            at_lower = alpha[t] <= 0
            if (y[t] > 0 and at_upper) or (y[t] < 0 and at_lower):
                lb = max(lb, yg[t])
            else:
                ub = min(ub, yg[t])
        rho = (ub + lb) / 2 if np.isfinite(ub) and np.isfinite(lb) else (ub if np.isfinite(ub) else lb)
    return SvmModel(np.clip(alpha, 0, C), y, float(-rho), C, converged, it, float(gap))


def svm_predict(model: SvmModel, K_rows) -> np.ndarray:
    return model.decision(K_rows)


@dataclass
class MulticlassSvm:
    classes: np.ndarray
    models: list[SvmModel]

    def decision(self, K_rows) -> np.ndarray:
        return np.column_stack([m.decision(K_rows) for m in self.models])

    def predict(self, K_rows) -> np.ndarray:
        scores = self.decision(K_rows)
        if len(self.classes) == 2:
            return np.where(scores[:, 0] >= 0, self.classes[1], self.classes[0])
        return self.classes[np.argmax(scores, axis=1)]


def train_multiclass(K, labels, C: float = 1.0, tol: float = 1e-3) -> MulticlassSvm:
    """One binary machine for two classes, else one machine per class against the rest."""
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if len(classes) < 2:
        raise ValueError("need at least two classes")
    targets = classes[1:] if len(classes) == 2 else classes
    models = []
    for c in targets:
        m = svm_train(K, np.where(labels == c, 1.0, -1.0), C, tol)
        m.positive_class = int(c)
        models.append(m)
    return MulticlassSvm(classes, models)


def _accuracy(K, labels, train, test, C) -> float:
    model = train_multiclass(K[np.ix_(train, train)], labels[train], C)
    pred = model.predict(K[np.ix_(test, train)])
    return float(np.mean(pred == labels[test]))


def select_C(K, labels, C_grid: Sequence[float] = C_GRID, inner_folds: int = 3, seed: int = 0) -> float:
    """C with the best inner cross-validated accuracy; ties go to the smaller C."""
    labels = np.asarray(labels)
    k = min(inner_folds, int(np.bincount(np.unique(labels, return_inverse=True)[1]).min()))
    grid = sorted(C_grid)
    if k < 2 or len(grid) == 1:
        return grid[0] if len(grid) == 1 else 1.0
    splits = list(StratifiedKFold(k, shuffle=True, random_state=seed).split(np.zeros(len(labels)), labels))
    best, best_acc = grid[0], -1.0
    for C in grid:
        acc = np.mean([_accuracy(K, labels, tr, te, C) for tr, te in splits])
        if acc > best_acc + 1e-12:
            best, best_acc = C, acc
    return best


@dataclass
class CvResult:
    mean: float
    std: float
    fold_accuracies: list[float]
    chosen_C: list[float]

    def __str__(self) -> str:
        return f"{100 * self.mean:.2f} +/- {100 * self.std:.2f}"


def cross_validate(
    K,
    labels,
    folds: int = 10,
    C_grid: Sequence[float] = C_GRID,
    seed: int = 0,
    inner_folds: int = 3,
) -> CvResult:
    """Stratified k-fold accuracy of the precomputed-kernel classifier.

    Each outer fold picks C by an inner stratified split of its training part.
    """
    K = np.asarray(K, dtype=float)
    labels = np.asarray(labels)
    if folds < 2:
        raise ValueError("folds must be at least 2")
    if K.shape != (len(labels), len(labels)):
        raise ValueError("kernel and labels disagree in size")
    counts = np.unique(labels, return_counts=True)[1]
    if counts.min() < folds:
        raise ValueError(f"smallest class has {counts.min()} members, fewer than {folds} folds")
    skf = StratifiedKFold(folds, shuffle=True, random_state=seed)
    accs, Cs = [], []
    for k, (tr, te) in enumerate(skf.split(np.zeros(len(labels)), labels)):
        C = select_C(K[np.ix_(tr, tr)], labels[tr], C_grid, inner_folds, seed + k + 1)
        Cs.append(C)
        accs.append(_accuracy(K, labels, tr, te, C))
    return CvResult(float(np.mean(accs)), float(np.std(accs)), accs, Cs)
