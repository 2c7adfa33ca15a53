"""k-nearest-neighbor majority vote on standardized features."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .linear import check_binary_labels
from .scaling import Standardizer

# Keep each broadcast distance block around ~30 MB for large stored sets.
_CHUNK_BUDGET = 4_000_000


class NearestNeighborClassifier(BaseEstimator, ClassifierMixin):
    """Lazy learner: stores the standardized training set at fit time.

    Prediction uses Euclidean distance; equal distances rank by the
    lower stored index, and a tied vote resolves to -1 (nontarget).
    """

    def __init__(self, k: int = 980):
        self.k = k

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = check_binary_labels(y)
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.k > X.shape[0]:
            raise ValueError(f"k={self.k} exceeds the {X.shape[0]} stored training samples")
        self.scaler_ = Standardizer().fit(X)
        self.X_ = self.scaler_.transform(X)
        self.y_ = y.astype(np.int64)
        self.classes_ = np.array([-1, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, ["X_", "y_"])
        X = check_array(X, dtype=np.float64)
        Xs = self.scaler_.transform(X)
        n_train = self.X_.shape[0]
        chunk = max(1, _CHUNK_BUDGET // max(1, n_train * self.X_.shape[1]))
        votes = np.empty(Xs.shape[0], dtype=np.int64)
        for start in range(0, Xs.shape[0], chunk):
            block = Xs[start:start + chunk]
            d2 = ((block[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
            order = np.argsort(d2, axis=1, kind="stable")[:, :self.k]
            votes[start:start + chunk] = self.y_[order].sum(axis=1)
        return np.where(votes > 0, 1, -1)
