"""Versioned text container for trained models.

The payload is one canonical JSON object (sorted keys, no whitespace)
holding the format version, model kind, hyperparameters, the feature
layout fingerprint, the fitted standardizer, and the kind-specific
parameters.  Floats serialize at full round-trip precision, so saving
the same fitted model always yields identical bytes and a load followed
by predict reproduces the original labels exactly.
"""

from __future__ import annotations

import json

import numpy as np
from sklearn.utils.validation import check_is_fitted

from ..layout import DEFAULT_LAYOUT, FeatureLayout
from .linear import PenalizedLogisticRegression, SquaredHingeSVM
from .neighbors import NearestNeighborClassifier
from .scaling import Standardizer
from .tree import GiniTreeClassifier

FORMAT_VERSION = 1

ALGORITHM_SVM = "svm"
ALGORITHM_LOGREG_L1 = "logreg-l1"
ALGORITHM_LOGREG_L2 = "logreg-l2"
ALGORITHM_TREE = "tree"
ALGORITHM_KNN = "knn"

ALGORITHM_NAMES = (ALGORITHM_SVM, ALGORITHM_LOGREG_L1, ALGORITHM_LOGREG_L2,
                   ALGORITHM_TREE, ALGORITHM_KNN)


class ModelFormatError(ValueError):
    """Unreadable, mismatched, or corrupt model stream."""


def model_kind(model) -> str:
    if isinstance(model, SquaredHingeSVM):
        return ALGORITHM_SVM
    if isinstance(model, PenalizedLogisticRegression):
        return ALGORITHM_LOGREG_L1 if model.penalty == "l1" else ALGORITHM_LOGREG_L2
    if isinstance(model, GiniTreeClassifier):
        return ALGORITHM_TREE
    if isinstance(model, NearestNeighborClassifier):
        return ALGORITHM_KNN
    raise ModelFormatError(f"unsupported model type: {type(model).__name__}")


def _scaler_payload(scaler: Standardizer | None):
    if scaler is None:
        return None
    return {"mean": scaler.mean_.tolist(), "scale": scaler.scale_.tolist()}


def _load_scaler(payload, n_features: int) -> Standardizer:
    scaler = Standardizer()
    scaler.mean_ = np.asarray(payload["mean"], dtype=np.float64)
    scaler.scale_ = np.asarray(payload["scale"], dtype=np.float64)
    scaler.n_features_in_ = n_features
    return scaler


def save_model(model, layout: FeatureLayout = DEFAULT_LAYOUT) -> bytes:
    """Serialize a fitted model; raises if it was trained on a feature
    count that does not match the layout."""
    kind = model_kind(model)
    check_is_fitted(model)
    if model.n_features_in_ != layout.size:
        raise ValueError(
            f"model has {model.n_features_in_} features but layout has {layout.size}")

    if kind in (ALGORITHM_SVM, ALGORITHM_LOGREG_L1, ALGORITHM_LOGREG_L2):
        scaler = model.scaler_
        parameters = {"weights": model.coef_.tolist(), "bias": model.intercept_}
    elif kind == ALGORITHM_TREE:
        scaler = None
        parameters = {
            "feature": model.feature_.tolist(),
            "threshold": model.threshold_.tolist(),
            "left": model.children_left_.tolist(),
            "right": model.children_right_.tolist(),
            "value": model.value_.tolist(),
        }
    else:
        scaler = model.scaler_
        parameters = {"train": model.X_.tolist(), "labels": model.y_.tolist()}

    payload = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "hyperparameters": model.get_params(),
        "layout_fingerprint": layout.fingerprint,
        "standardizer": _scaler_payload(scaler),
        "parameters": parameters,
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _require(payload: dict, key: str):
    if key not in payload:
        raise ModelFormatError(f"model stream is missing field {key!r}")
    return payload[key]


def load_model(data: bytes, layout: FeatureLayout = DEFAULT_LAYOUT):
    """Reconstruct a fitted model, verifying version and layout fingerprint."""
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"truncated or corrupt model stream: {exc}") from None
    if not isinstance(payload, dict):
        raise ModelFormatError("model stream must contain a single object")

    version = _require(payload, "format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {version!r}")
    kind = _require(payload, "kind")
    fingerprint = _require(payload, "layout_fingerprint")
    if fingerprint != layout.fingerprint:
        raise ModelFormatError(
            "layout fingerprint mismatch: model was trained on a different feature layout")
    hyper = _require(payload, "hyperparameters")
    parameters = _require(payload, "parameters")
    scaler_payload = _require(payload, "standardizer")

    try:
        if kind in (ALGORITHM_SVM, ALGORITHM_LOGREG_L1, ALGORITHM_LOGREG_L2):
            cls = SquaredHingeSVM if kind == ALGORITHM_SVM else PenalizedLogisticRegression
            model = cls(**hyper)
            model.coef_ = np.asarray(parameters["weights"], dtype=np.float64)
            model.intercept_ = float(parameters["bias"])
            model.n_features_in_ = model.coef_.shape[0]
            model.scaler_ = _load_scaler(scaler_payload, model.n_features_in_)
        elif kind == ALGORITHM_TREE:
            model = GiniTreeClassifier(**hyper)
            model.feature_ = np.asarray(parameters["feature"], dtype=np.int64)
            model.threshold_ = np.asarray(parameters["threshold"], dtype=np.float64)
            model.children_left_ = np.asarray(parameters["left"], dtype=np.int64)
            model.children_right_ = np.asarray(parameters["right"], dtype=np.int64)
            model.value_ = np.asarray(parameters["value"], dtype=np.int64)
            model.n_features_in_ = layout.size
        elif kind == ALGORITHM_KNN:
            model = NearestNeighborClassifier(**hyper)
            model.X_ = np.asarray(parameters["train"], dtype=np.float64)
            model.y_ = np.asarray(parameters["labels"], dtype=np.int64)
            model.n_features_in_ = model.X_.shape[1]
            model.scaler_ = _load_scaler(scaler_payload, model.n_features_in_)
        else:
            raise ModelFormatError(f"unknown model kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"model stream has malformed parameters: {exc}") from None

    model.classes_ = np.array([-1, 1])
    return model
