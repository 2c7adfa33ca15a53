"""Linear classifiers trained from scratch on standardized features.

Both estimators minimize a convex objective of the form
``penalty(w) + C * sum(loss_i(w, b))`` over the parameter vector
``theta = (w, b)`` with an unpenalized bias:

* squared-hinge SVM:   0.5*||w||^2 + C * sum(max(0, 1 - y*(Xw + b))^2)
* logistic, l2:        0.5*||w||^2 + C * sum(log(1 + exp(-y*(Xw + b))))
* logistic, l1:        ||w||_1    + C * sum(log(1 + exp(-y*(Xw + b))))

The l1 case runs proximal gradient descent with soft-thresholding on
the weight coordinates, which produces exact zeros; the smooth cases
reduce to monotone gradient descent with backtracking.  Solvers start
from zero and contain no randomness, so training is deterministic for a
given dataset and hyperparameters.  Predicted label is +1 (target) when
the decision value is >= 0.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._solver import proximal_descent
from .scaling import Standardizer


def check_binary_labels(y: np.ndarray, require_both: bool = True) -> np.ndarray:
    """Validate +/-1 labels (target = +1, nontarget = -1)."""
    y = np.asarray(y)
    values = set(np.unique(y).tolist())
    if not values <= {-1, 1}:
        raise ValueError(f"labels must be +1 or -1, got values {sorted(values)}")
    if require_both and values != {-1, 1}:
        raise ValueError("training data must contain both classes")
    return y.astype(np.float64)


def _stable_sigmoid(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def squared_hinge_objective(theta: np.ndarray, X: np.ndarray, y: np.ndarray,
                            C: float) -> tuple[float, np.ndarray]:
    """Value and gradient of the full (smooth) SVM objective."""
    w, b = theta[:-1], theta[-1]
    margin = 1.0 - y * (X @ w + b)
    active = margin > 0.0
    act_margin = np.where(active, margin, 0.0)
    value = 0.5 * float(w @ w) + C * float(act_margin @ act_margin)
    coeff = y * act_margin
    grad = np.empty_like(theta)
    grad[:-1] = w - 2.0 * C * (X.T @ coeff)
    grad[-1] = -2.0 * C * float(np.sum(coeff))
    return value, grad


def logistic_loss(theta: np.ndarray, X: np.ndarray, y: np.ndarray,
                  C: float) -> tuple[float, np.ndarray]:
    """Value and gradient of C * sum(log(1 + exp(-y*(Xw + b))))."""
    w, b = theta[:-1], theta[-1]
    t = y * (X @ w + b)
    value = C * float(np.sum(np.logaddexp(0.0, -t)))
    coeff = y * _stable_sigmoid(-t)
    grad = np.empty_like(theta)
    grad[:-1] = -C * (X.T @ coeff)
    grad[-1] = -C * float(np.sum(coeff))
    return value, grad


def logistic_l2_objective(theta: np.ndarray, X: np.ndarray, y: np.ndarray,
                          C: float) -> tuple[float, np.ndarray]:
    value, grad = logistic_loss(theta, X, y, C)
    w = theta[:-1]
    value += 0.5 * float(w @ w)
    grad[:-1] += w
    return value, grad


def soft_threshold_weights(v: np.ndarray, step: float) -> np.ndarray:
    """Proximal operator of step * ||w||_1, leaving the bias slot alone."""
    out = v.copy()
    w = out[:-1]
    out[:-1] = np.sign(w) * np.maximum(np.abs(w) - step, 0.0)
    return out


class _LinearClassifierBase(BaseEstimator, ClassifierMixin):
    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, ["coef_", "intercept_"])
        X = check_array(X, dtype=np.float64)
        Xs = self.scaler_.transform(X)
        return Xs @ self.coef_ + self.intercept_

    def predict(self, X) -> np.ndarray:
        return np.where(self.decision_function(X) >= 0.0, 1, -1)

    def _prepare(self, X, y) -> tuple[np.ndarray, np.ndarray]:
        X, y = check_X_y(X, y, dtype=np.float64)
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite")
        y = check_binary_labels(y)
        if self.C < 0:
            raise ValueError("C must be non-negative")
        self.scaler_ = Standardizer().fit(X)
        self.classes_ = np.array([-1, 1])
        self.n_features_in_ = X.shape[1]
        return self.scaler_.transform(X), y

    def _finish(self, theta: np.ndarray, trace: np.ndarray):
        self.coef_ = theta[:-1].copy()
        self.intercept_ = float(theta[-1])
        self.objective_trace_ = trace
        self.objective_ = float(trace[-1])
        self.n_iter_ = len(trace) - 1
        return self


class SquaredHingeSVM(_LinearClassifierBase):
    """Linear SVM with an l2 penalty and squared-hinge (l2) loss.

    C is the cost of constraint violation multiplying the loss term;
    tol is the relative objective decrease below which training stops.
    """

    def __init__(self, C: float = 0.01, tol: float = 1e-6, max_iter: int = 10000):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        Xs, y = self._prepare(X, y)
        theta0 = np.zeros(Xs.shape[1] + 1)
        theta, trace = proximal_descent(
            lambda t: squared_hinge_objective(t, Xs, y, self.C),
            theta0, tol=self.tol, max_iter=self.max_iter)
        return self._finish(theta, trace)


class PenalizedLogisticRegression(_LinearClassifierBase):
    """Logistic regression with an l1 or l2 penalty on the weights.

    The l1 solver keeps exact zeros via soft-thresholding; the bias is
    never penalized.
    """

    def __init__(self, penalty: str = "l2", C: float = 0.01,
                 tol: float = 1e-6, max_iter: int = 10000):
        self.penalty = penalty
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        if self.penalty not in ("l1", "l2"):
            raise ValueError(f"penalty must be 'l1' or 'l2', got {self.penalty!r}")
        Xs, y = self._prepare(X, y)
        theta0 = np.zeros(Xs.shape[1] + 1)
        if self.penalty == "l2":
            theta, trace = proximal_descent(
                lambda t: logistic_l2_objective(t, Xs, y, self.C),
                theta0, tol=self.tol, max_iter=self.max_iter)
        else:
            theta, trace = proximal_descent(
                lambda t: logistic_loss(t, Xs, y, self.C),
                theta0,
                prox=soft_threshold_weights,
                reg=lambda t: float(np.sum(np.abs(t[:-1]))),
                tol=self.tol, max_iter=self.max_iter)
        return self._finish(theta, trace)
