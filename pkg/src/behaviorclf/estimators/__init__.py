"""Classifiers, feature scaling, and model persistence."""

from .linear import (
    PenalizedLogisticRegression,
    SquaredHingeSVM,
    check_binary_labels,
    logistic_l2_objective,
    logistic_loss,
    squared_hinge_objective,
)
from .neighbors import NearestNeighborClassifier
from .scaling import Standardizer
from .serialize import (
    ALGORITHM_KNN,
    ALGORITHM_LOGREG_L1,
    ALGORITHM_LOGREG_L2,
    ALGORITHM_NAMES,
    ALGORITHM_SVM,
    ALGORITHM_TREE,
    ModelFormatError,
    load_model,
    model_kind,
    save_model,
)
from .tree import GiniTreeClassifier, gini

__all__ = [
    "ALGORITHM_KNN",
    "ALGORITHM_LOGREG_L1",
    "ALGORITHM_LOGREG_L2",
    "ALGORITHM_NAMES",
    "ALGORITHM_SVM",
    "ALGORITHM_TREE",
    "GiniTreeClassifier",
    "ModelFormatError",
    "NearestNeighborClassifier",
    "PenalizedLogisticRegression",
    "SquaredHingeSVM",
    "Standardizer",
    "check_binary_labels",
    "gini",
    "load_model",
    "logistic_l2_objective",
    "logistic_loss",
    "model_kind",
    "save_model",
    "squared_hinge_objective",
]
