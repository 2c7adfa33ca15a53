"""CART-style classification tree with Gini impurity on raw features.

Greedy induction with an exhaustive threshold search at midpoints of
sorted distinct values.  A node becomes a leaf when it holds fewer than
min_split samples, is pure, or no candidate split strictly reduces the
weighted Gini impurity.  Gain ties break toward the lowest feature
index, then the lowest threshold; leaf-label ties break to -1
(nontarget), so induction is fully deterministic.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .linear import check_binary_labels

_LEAF = -1
_MIN_GAIN = 1e-12


def gini(pos: float, total: float) -> float:
    if total == 0:
        return 0.0
    p = pos / total
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _best_split(X: np.ndarray, pos01: np.ndarray, idx: np.ndarray):
    """Return (gain, feature, threshold) of the best split or None."""
    n = idx.size
    total_pos = int(pos01[idx].sum())
    parent = gini(total_pos, n)
    if parent <= 0.0:
        return None
    best = None
    for j in range(X.shape[1]):
        v = X[idx, j]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        ys = pos01[idx][order]
        cuts = np.nonzero(vs[1:] > vs[:-1])[0]
        if cuts.size == 0:
            continue
        n_left = (cuts + 1).astype(np.float64)
        pos_left = np.cumsum(ys)[cuts].astype(np.float64)
        n_right = n - n_left
        pos_right = total_pos - pos_left
        p_l = pos_left / n_left
        p_r = pos_right / n_right
        g_l = 1.0 - p_l * p_l - (1.0 - p_l) * (1.0 - p_l)
        g_r = 1.0 - p_r * p_r - (1.0 - p_r) * (1.0 - p_r)
        gain = parent - (n_left * g_l + n_right * g_r) / n
        k = int(np.argmax(gain))
        if gain[k] > _MIN_GAIN and (best is None or gain[k] > best[0]):
            threshold = (vs[cuts[k]] + vs[cuts[k] + 1]) / 2.0
            best = (float(gain[k]), j, float(threshold))
    return best


class GiniTreeClassifier(BaseEstimator, ClassifierMixin):
    """Binary decision tree; left branch takes feature <= threshold.

    min_split is the minimum number of training samples a node must
    hold to be considered for splitting.
    """

    def __init__(self, min_split: int = 5):
        self.min_split = min_split

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = check_binary_labels(y)
        if self.min_split < 2:
            raise ValueError("min_split must be at least 2")
        pos01 = (y > 0).astype(np.int64)

        feature: list[int] = []
        threshold: list[float] = []
        left: list[int] = []
        right: list[int] = []
        value: list[int] = []

        def new_node() -> int:
            feature.append(_LEAF)
            threshold.append(0.0)
            left.append(_LEAF)
            right.append(_LEAF)
            value.append(0)
            return len(feature) - 1

        root = new_node()
        stack: list[tuple[int, np.ndarray]] = [(root, np.arange(X.shape[0]))]
        while stack:
            nid, idx = stack.pop()
            pos = int(pos01[idx].sum())
            neg = idx.size - pos
            split = None
            if idx.size >= self.min_split and 0 < pos < idx.size:
                split = _best_split(X, pos01, idx)
            if split is None:
                value[nid] = 1 if pos > neg else -1
                continue
            _, j, thr = split
            feature[nid] = j
            threshold[nid] = thr
            mask = X[idx, j] <= thr
            lid = new_node()
            rid = new_node()
            left[nid] = lid
            right[nid] = rid
            stack.append((rid, idx[~mask]))
            stack.append((lid, idx[mask]))

        self.feature_ = np.asarray(feature, dtype=np.int64)
        self.threshold_ = np.asarray(threshold, dtype=np.float64)
        self.children_left_ = np.asarray(left, dtype=np.int64)
        self.children_right_ = np.asarray(right, dtype=np.int64)
        self.value_ = np.asarray(value, dtype=np.int64)
        self.classes_ = np.array([-1, 1])
        self.n_features_in_ = X.shape[1]
        return self

    @property
    def node_count_(self) -> int:
        return len(self.feature_)

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by each sample."""
        check_is_fitted(self, ["feature_"])
        X = check_array(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.int64)
        for i, row in enumerate(X):
            nid = 0
            while self.feature_[nid] != _LEAF:
                if row[self.feature_[nid]] <= self.threshold_[nid]:
                    nid = self.children_left_[nid]
                else:
                    nid = self.children_right_[nid]
            out[i] = nid
        return out

    def predict(self, X) -> np.ndarray:
        return self.value_[self.apply(X)]
