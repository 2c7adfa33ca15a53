"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
status lines; the assertions carry the same conditions.
"""

from __future__ import annotations

import numpy as np
import pytest

from behaviorclf.estimators import (
    GiniTreeClassifier,
    NearestNeighborClassifier,
    PenalizedLogisticRegression,
    SquaredHingeSVM,
    save_model,
)
from behaviorclf.estimators.linear import (
    logistic_l2_objective,
    logistic_loss,
    soft_threshold_weights,
    squared_hinge_objective,
)
from behaviorclf.estimators.scaling import Standardizer
from behaviorclf.evaluation import (
    ConfusionCounts,
    confusion,
    default_algorithms,
    error_report,
    report_json_bytes,
    run_experiment,
)
from behaviorclf.features import build_dataset, extract_features
from behaviorclf.synth import GenSpec, generate

from oracles import (
    audit_tree,
    brute_knn_predict,
    central_difference_grad,
    fista,
    lipschitz_bound,
)

SEEDS = (41, 42, 43, 44, 45)
SEPARATION = 0.9


def _report_line(num: int, name: str, ok: bool) -> None:
    print(f"ACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion {num} ({name}) failed"


def _paper_scale_datasets(seed: int):
    train = build_dataset(generate(GenSpec(
        seed=seed, n_target=1001, n_nontarget=1000, separation=SEPARATION)),
        for_training=True)
    test = build_dataset(generate(GenSpec(
        seed=seed + 1, n_target=979, n_nontarget=1000, separation=SEPARATION)),
        for_training=True)
    assert (train.n_target, train.n_nontarget) == (1001, 1000)
    assert (test.n_target, test.n_nontarget) == (979, 1000)
    return train, test


@pytest.fixture(scope="module")
def paper_scale_results():
    """Forward and flipped runs of the five-algorithm experiment for the
    five reference seeds."""
    results = {}
    for seed in SEEDS:
        train, test = _paper_scale_datasets(seed)
        forward = run_experiment(train, test, default_algorithms())
        backward = run_experiment(test, train, default_algorithms())
        results[seed] = (forward, backward)
    return results


def test_criterion_1_metric_arithmetic():
    svm_cell = error_report(
        ConfusionCounts(a=42, b=67, n_target=979, n_nontarget=1000)).target_cell()
    tree_cell = error_report(
        ConfusionCounts(a=225, b=46, n_target=979, n_nontarget=1000)).target_cell()
    _report_line(1, "metric arithmetic", svm_cell == "6.84%/4.29%"
                 and tree_cell == "4.70%/22.98%")


def test_criterion_2_symmetry_with_equal_test_classes():
    train = build_dataset(generate(GenSpec(
        seed=301, n_target=600, n_nontarget=600, separation=0.7)), for_training=True)
    test = build_dataset(generate(GenSpec(
        seed=302, n_target=1000, n_nontarget=1000, separation=0.7)), for_training=True)
    reports = run_experiment(train, test, default_algorithms())
    ok = len(reports) == 5 and all(
        report.fp_pct_target == report.fn_pct_nontarget
        and report.fn_pct_target == report.fp_pct_nontarget
        for report in reports.values())
    _report_line(2, "per-class symmetry at equal test sizes", ok)


def test_criterion_3_optimizer_matches_independent_oracle():
    rng = np.random.default_rng(1234)
    C = 0.01
    ok = True
    for _ in range(10):
        n = int(rng.integers(80, 501))
        X = rng.normal(size=(n, 65))
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        y[:2] = [1.0, -1.0]
        X += 0.7 * y[:, None] * rng.normal(size=(1, 65))
        Xs = Standardizer().fit(X).transform(X)
        Xt = np.hstack([Xs, np.ones((n, 1))])
        lam = lipschitz_bound(Xt)
        theta0 = np.zeros(66)

        svm = SquaredHingeSVM(C=C, tol=1e-9, max_iter=100000).fit(X, y)
        ora = fista(lambda t: squared_hinge_objective(t, Xs, y, C), lambda v, s: v,
                    theta0, 1.0 + 2.0 * C * lam, 4000)
        f_ora = squared_hinge_objective(ora, Xs, y, C)[0]
        ok &= abs(svm.objective_ - f_ora) <= 0.01 * abs(f_ora)

        lr2 = PenalizedLogisticRegression(penalty="l2", C=C, tol=1e-9,
                                          max_iter=100000).fit(X, y)
        ora2 = fista(lambda t: logistic_l2_objective(t, Xs, y, C), lambda v, s: v,
                     theta0, 1.0 + C * lam / 4.0, 4000)
        f_ora2 = logistic_l2_objective(ora2, Xs, y, C)[0]
        ok &= abs(lr2.objective_ - f_ora2) <= 0.01 * abs(f_ora2)

        lr1 = PenalizedLogisticRegression(penalty="l1", C=C, tol=1e-9,
                                          max_iter=100000).fit(X, y)
        ora1 = fista(lambda t: logistic_loss(t, Xs, y, C), soft_threshold_weights,
                     theta0, C * lam / 4.0, 4000)
        f_ora1 = logistic_loss(ora1, Xs, y, C)[0] + float(np.abs(ora1[:-1]).sum())
        ok &= abs(lr1.objective_ - f_ora1) <= 0.01 * abs(f_ora1)

        theta = rng.normal(size=66) * 0.5
        for fun in (lambda t: logistic_loss(t, Xs, y, C),
                    lambda t: logistic_l2_objective(t, Xs, y, C)):
            analytic = fun(theta)[1]
            numeric = central_difference_grad(lambda t: fun(t)[0], theta)
            ok &= (np.linalg.norm(analytic - numeric)
                   <= 1e-5 * np.linalg.norm(numeric))
    _report_line(3, "optimizer vs long-run first-order oracle", ok)


def test_criterion_4_knn_equals_brute_force():
    rng = np.random.default_rng(4321)
    ok = True
    for _ in range(100):
        n = int(rng.integers(980, 2002))
        X = rng.normal(size=(n, 65)) * rng.uniform(0.5, 2.0, size=65)
        y = np.where(rng.random(n) < 0.5, 1, -1)
        y[:2] = [1, -1]
        queries = rng.normal(size=(5, 65))
        for k in (1, 7, 980):
            fast = NearestNeighborClassifier(k=k).fit(X, y).predict(queries)
            slow = brute_knn_predict(X, y, queries, k)
            ok &= bool(np.array_equal(fast, slow))
    _report_line(4, "kNN accelerated vs brute force", ok)


def test_criterion_5_tree_structure_audit():
    rng = np.random.default_rng(999)
    ok = True
    for _ in range(20):
        n = int(rng.integers(60, 351))
        X = rng.integers(0, 7, size=(n, 65)).astype(float)
        y = np.where(rng.random(n) < 0.5, 1, -1)
        y[:2] = [1, -1]
        model = GiniTreeClassifier(min_split=5).fit(X, y)
        ok &= audit_tree(model, X, y, min_split=5) == []
    _report_line(5, "tree structural audit", ok)


def _combined_errors(reports) -> dict[str, float]:
    return {name: report.combined_error for name, report in reports.items()}


def test_criterion_6_end_to_end_accuracy(paper_scale_results):
    passing_seeds = 0
    for seed in SEEDS:
        forward, _ = paper_scale_results[seed]
        errors = _combined_errors(forward)
        seed_ok = all(err <= 0.10 for err in errors.values()) and errors["svm"] <= 0.05
        passing_seeds += seed_ok
    _report_line(6, "end-to-end error bounds (>=4 of 5 seeds)", passing_seeds >= 4)


def test_criterion_7_flip_robustness(paper_scale_results):
    passing_seeds = 0
    for seed in SEEDS:
        forward, backward = paper_scale_results[seed]
        fwd = _combined_errors(forward)
        bwd = _combined_errors(backward)
        seed_ok = all(abs(fwd[name] - bwd[name]) <= 0.05 for name in fwd)
        passing_seeds += seed_ok
    _report_line(7, "flip changes combined error by <= 5 points (>=4 of 5 seeds)",
                 passing_seeds >= 4)


def test_criterion_8_byte_identical_repetition(tmp_path):
    def one_pass(directory):
        train, test = _paper_scale_datasets(42)
        reports = {}
        for name, prototype in default_algorithms().items():
            model = prototype.fit(train.X, train.y)
            (directory / f"{name}.model").write_bytes(save_model(model))
            reports[name] = error_report(confusion(test.y, model.predict(test.X)))
        (directory / "report.json").write_bytes(report_json_bytes(reports))

    first = tmp_path / "first"
    second = tmp_path / "second"
    first.mkdir()
    second.mkdir()
    one_pass(first)
    one_pass(second)
    ok = all((first / p.name).read_bytes() == (second / p.name).read_bytes()
             for p in sorted(first.iterdir()))
    _report_line(8, "byte-identical repetition", ok)


def test_criterion_9_feature_extraction_properties():
    runs = []
    for i, separation in enumerate((0.0, 0.3, 0.6, 0.9)):
        runs.extend(generate(GenSpec(seed=700 + i, n_target=125, n_nontarget=125,
                                     separation=separation)))
    assert len(runs) == 1000
    rng = np.random.default_rng(0)
    violations = 0
    for run in runs:
        vec = extract_features(run).values
        if vec.shape != (65,):
            violations += 1
            continue
        sized_files = sum(1 for e in run.file_events if e.size_bytes is not None)
        with_response = sum(1 for t in run.http if t.response_code is not None)
        if vec[3:7].sum() != sized_files:
            violations += 1
        if vec[51:55].sum() != len(run.http):
            violations += 1
        if vec[55:59].sum() != with_response:
            violations += 1

        def shuffled(events):
            events = list(events)
            rng.shuffle(events)
            return tuple(events)

        permuted = type(run)(
            sample_id=run.sample_id, label=run.label,
            file_events=shuffled(run.file_events),
            registry_events=shuffled(run.registry_events),
            flows=shuffled(run.flows), http=shuffled(run.http),
            dns=shuffled(run.dns))
        if not np.array_equal(vec, extract_features(permuted).values):
            violations += 1

        no_registry = type(run)(
            sample_id=run.sample_id, label=run.label,
            file_events=run.file_events, registry_events=(),
            flows=run.flows, http=run.http, dns=run.dns)
        other_slots = np.r_[0:14, 22:65]
        if not np.array_equal(vec[other_slots],
                              extract_features(no_registry).values[other_slots]):
            violations += 1
    _report_line(9, "feature extraction properties (1000 runs)", violations == 0)
