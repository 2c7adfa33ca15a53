"""Independent reference implementations used only to check the package.

These deliberately avoid the production code paths: the optimizer
oracle is an accelerated fixed-step first-order method with the step
size taken from an eigenvalue bound, the kNN oracle is a per-query
python-sorted brute force, and the tree audit replays the training
partition through the stored node structure.
"""

from __future__ import annotations

import numpy as np


def lipschitz_bound(X_with_bias: np.ndarray) -> float:
    gram = X_with_bias.T @ X_with_bias
    return float(np.linalg.eigvalsh(gram)[-1])


def fista(smooth_grad, prox, x0: np.ndarray, lipschitz: float, iters: int) -> np.ndarray:
    """Accelerated proximal gradient with fixed step 1/L."""
    x = np.array(x0, dtype=np.float64)
    z = x.copy()
    t = 1.0
    step = 1.0 / lipschitz
    for _ in range(iters):
        _, g = smooth_grad(z)
        x_new = prox(z - step * g, step)
        t_new = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        z = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t = x_new, t_new
    return x


def central_difference_grad(fun, theta: np.ndarray, h: float = 1e-6) -> np.ndarray:
    grad = np.empty_like(theta)
    for i in range(theta.size):
        plus = theta.copy()
        minus = theta.copy()
        plus[i] += h
        minus[i] -= h
        grad[i] = (fun(plus) - fun(minus)) / (2.0 * h)
    return grad


def standardize_like_training(X_train: np.ndarray, X_other: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X_train.mean(axis=0)
    scale = X_train.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    return (X_train - mean) / scale, (X_other - mean) / scale


def brute_knn_predict(X_train: np.ndarray, y_train: np.ndarray,
                      X_query: np.ndarray, k: int) -> np.ndarray:
    """O(n*d) per query: full sort of (distance, index) pairs, majority
    vote over the first k, ties to -1."""
    Xt, Xq = standardize_like_training(X_train, X_query)
    out = np.empty(Xq.shape[0], dtype=np.int64)
    for qi, q in enumerate(Xq):
        d2 = ((Xt - q) ** 2).sum(axis=1)
        order = sorted(range(Xt.shape[0]), key=lambda i: (d2[i], i))
        vote = int(sum(y_train[i] for i in order[:k]))
        out[qi] = 1 if vote > 0 else -1
    return out


def gini_from_counts(pos: int, total: int) -> float:
    if total == 0:
        return 0.0
    p = pos / total
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def audit_tree(model, X: np.ndarray, y: np.ndarray, min_split: int) -> list[str]:
    """Replay the training set through the stored tree; returns one
    message per structural violation (empty list when clean)."""
    problems: list[str] = []
    pos01 = (np.asarray(y) > 0).astype(np.int64)
    stack = [(0, np.arange(X.shape[0]))]
    while stack:
        nid, idx = stack.pop()
        if model.feature_[nid] == -1:
            continue
        if idx.size < min_split:
            problems.append(f"node {nid}: split with only {idx.size} samples")
        n = idx.size
        pos = int(pos01[idx].sum())
        parent = gini_from_counts(pos, n)
        mask = X[idx, model.feature_[nid]] <= model.threshold_[nid]
        left_idx = idx[mask]
        right_idx = idx[~mask]
        if left_idx.size == 0 or right_idx.size == 0:
            problems.append(f"node {nid}: degenerate split")
            continue
        g_l = gini_from_counts(int(pos01[left_idx].sum()), left_idx.size)
        g_r = gini_from_counts(int(pos01[right_idx].sum()), right_idx.size)
        weighted = (left_idx.size * g_l + right_idx.size * g_r) / n
        if not weighted < parent:
            problems.append(f"node {nid}: split does not reduce weighted impurity")
        stack.append((int(model.children_left_[nid]), left_idx))
        stack.append((int(model.children_right_[nid]), right_idx))
    return problems
