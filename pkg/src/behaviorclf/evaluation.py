"""Per-class false-positive / false-negative reporting and the two-way
train/test experiment driver.

For a class X, the false-positive rate is the count of non-X samples
predicted as X and the false-negative rate is the count of X samples
predicted as non-X, each expressed as a percentage of the true size of
class X.  Percentages are kept at full precision and rounded to two
decimals only when a table is rendered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from sklearn.base import clone

from .estimators import (
    ALGORITHM_KNN,
    ALGORITHM_LOGREG_L1,
    ALGORITHM_LOGREG_L2,
    ALGORITHM_SVM,
    ALGORITHM_TREE,
    GiniTreeClassifier,
    NearestNeighborClassifier,
    PenalizedLogisticRegression,
    SquaredHingeSVM,
)
from .features import Dataset


@dataclass(frozen=True)
class ConfusionCounts:
    """a: target samples predicted nontarget; b: nontarget samples
    predicted target; n_*: true class sizes."""

    a: int
    b: int
    n_target: int
    n_nontarget: int

    def __post_init__(self):
        if min(self.a, self.b, self.n_target, self.n_nontarget) < 0:
            raise ValueError("counts must be non-negative")
        if self.a > self.n_target:
            raise ValueError("a cannot exceed n_target")
        if self.b > self.n_nontarget:
            raise ValueError("b cannot exceed n_nontarget")


@dataclass(frozen=True)
class ErrorReport:
    counts: ConfusionCounts

    @property
    def fp_pct_target(self) -> float:
        return 100.0 * self.counts.b / self.counts.n_target

    @property
    def fn_pct_target(self) -> float:
        return 100.0 * self.counts.a / self.counts.n_target

    @property
    def fp_pct_nontarget(self) -> float:
        return 100.0 * self.counts.a / self.counts.n_nontarget

    @property
    def fn_pct_nontarget(self) -> float:
        return 100.0 * self.counts.b / self.counts.n_nontarget

    @property
    def combined_error(self) -> float:
        c = self.counts
        return (c.a + c.b) / (c.n_target + c.n_nontarget)

    @property
    def accuracy(self) -> float:
        return 1.0 - self.combined_error

    def target_cell(self) -> str:
        return f"{self.fp_pct_target:.2f}%/{self.fn_pct_target:.2f}%"

    def nontarget_cell(self) -> str:
        return f"{self.fp_pct_nontarget:.2f}%/{self.fn_pct_nontarget:.2f}%"


def _as_sign(label) -> int:
    value = getattr(label, "value", label)
    if value in (1, "target"):
        return 1
    if value in (-1, "nontarget"):
        return -1
    raise ValueError(f"unrecognized label {label!r}")


def confusion(true_labels: Sequence, predicted_labels: Sequence) -> ConfusionCounts:
    """Exact integer confusion counts from paired label sequences."""
    if len(true_labels) != len(predicted_labels):
        raise ValueError(
            f"length mismatch: {len(true_labels)} true vs {len(predicted_labels)} predicted")
    if len(true_labels) == 0:
        raise ValueError("label sequences must be non-empty")
    a = b = n_target = n_nontarget = 0
    for t, p in zip(true_labels, predicted_labels):
        ts, ps = _as_sign(t), _as_sign(p)
        if ts == 1:
            n_target += 1
            if ps == -1:
                a += 1
        else:
            n_nontarget += 1
            if ps == 1:
                b += 1
    return ConfusionCounts(a=a, b=b, n_target=n_target, n_nontarget=n_nontarget)


def error_report(counts: ConfusionCounts) -> ErrorReport:
    if counts.n_target == 0 or counts.n_nontarget == 0:
        raise ValueError("both classes must be present to report per-class error")
    return ErrorReport(counts=counts)


def default_algorithms(C: float = 0.01, min_split: int = 5, k: int = 980) -> dict:
    """The five classifiers with their reference hyperparameters."""
    return {
        ALGORITHM_SVM: SquaredHingeSVM(C=C),
        ALGORITHM_LOGREG_L1: PenalizedLogisticRegression(penalty="l1", C=C),
        ALGORITHM_LOGREG_L2: PenalizedLogisticRegression(penalty="l2", C=C),
        ALGORITHM_TREE: GiniTreeClassifier(min_split=min_split),
        ALGORITHM_KNN: NearestNeighborClassifier(k=k),
    }


def _check_disjoint(train: Dataset, test: Dataset) -> None:
    overlap = set(train.sample_ids) & set(test.sample_ids)
    if overlap:
        examples = ", ".join(sorted(overlap)[:3])
        raise ValueError(
            f"train and test datasets share {len(overlap)} sample_id(s) (e.g. {examples})")


def run_experiment(train: Dataset, test: Dataset,
                   algorithms: Mapping[str, object],
                   seed: int = 0) -> dict[str, ErrorReport]:
    """Train each algorithm on train, evaluate on test.

    Estimators are cloned, so the caller's instances stay unfitted; any
    estimator exposing a random_state parameter receives the seed.
    """
    _check_disjoint(train, test)
    reports: dict[str, ErrorReport] = {}
    for name, prototype in algorithms.items():
        model = clone(prototype)
        if "random_state" in model.get_params():
            model.set_params(random_state=seed)
        model.fit(train.X, train.y)
        predicted = model.predict(test.X)
        reports[name] = error_report(confusion(test.y, predicted))
    return reports


def flip_experiment(a: Dataset, b: Dataset, algorithms: Mapping[str, object],
                    seed: int = 0) -> tuple[dict[str, ErrorReport], dict[str, ErrorReport]]:
    """Run A->B, then swap the roles of the two datasets and run B->A."""
    forward = run_experiment(a, b, algorithms, seed=seed)
    backward = run_experiment(b, a, algorithms, seed=seed)
    return forward, backward


def render_table(reports: Mapping[str, ErrorReport]) -> str:
    """Plain-text table: one row per algorithm, +/- cells per class."""
    name_width = max([len("Algorithm")] + [len(name) for name in reports])
    header = (f"{'Algorithm':<{name_width}} | {'+/- (Target)':<15} | +/- (NonTarget)")
    rule = "-" * len(header)
    lines = [header, rule]
    for name, report in reports.items():
        lines.append(
            f"{name:<{name_width}} | {report.target_cell():<15} | {report.nontarget_cell()}")
    return "\n".join(lines) + "\n"


def report_payload(reports: Mapping[str, ErrorReport]) -> dict:
    """Machine-readable report: raw counts plus full-precision percentages."""
    out = {}
    for name, report in reports.items():
        c = report.counts
        out[name] = {
            "counts": {"a": c.a, "b": c.b,
                       "n_target": c.n_target, "n_nontarget": c.n_nontarget},
            "fp_pct_target": report.fp_pct_target,
            "fn_pct_target": report.fn_pct_target,
            "fp_pct_nontarget": report.fp_pct_nontarget,
            "fn_pct_nontarget": report.fn_pct_nontarget,
            "combined_error": report.combined_error,
        }
    return {"reports": out}


def report_json_bytes(reports: Mapping[str, ErrorReport]) -> bytes:
    return (json.dumps(report_payload(reports), sort_keys=True, indent=2) + "\n").encode("utf-8")
