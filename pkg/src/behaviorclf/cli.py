"""Pipeline driver: synth, extract, train, predict, evaluate, flip-eval.

Every subcommand writes its outputs atomically (temp file in the target
directory, then rename), so a failing invocation never leaves partial
files behind.  Failures exit nonzero with a one-line diagnostic naming
the stage that failed.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path

from .estimators import (
    ALGORITHM_KNN,
    ALGORITHM_NAMES,
    ALGORITHM_TREE,
    GiniTreeClassifier,
    NearestNeighborClassifier,
    PenalizedLogisticRegression,
    SquaredHingeSVM,
    load_model,
    save_model,
)
from .evaluation import (
    confusion,
    error_report,
    flip_experiment,
    render_table,
    report_json_bytes,
)
from .features import Dataset, load_matrix, save_matrix
from .layout import DEFAULT_LAYOUT, fingerprint_names
from .synth import GenSpec, emit_log, generate


class StageError(Exception):
    """Wraps a failure with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        super().__init__(f"error in {stage}: {cause}")


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def _write_atomic(path: str | Path, data: bytes) -> None:
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _make_estimator(args: argparse.Namespace):
    if args.algo == "svm":
        return SquaredHingeSVM(C=args.cost)
    if args.algo == "logreg-l1":
        return PenalizedLogisticRegression(penalty="l1", C=args.cost)
    if args.algo == "logreg-l2":
        return PenalizedLogisticRegression(penalty="l2", C=args.cost)
    if args.algo == ALGORITHM_TREE:
        return GiniTreeClassifier(min_split=args.min_split)
    if args.algo == ALGORITHM_KNN:
        return NearestNeighborClassifier(k=args.k)
    raise ValueError(f"unknown algorithm {args.algo!r}")


def _selected_algorithms(args: argparse.Namespace) -> dict:
    names = args.algo or list(ALGORITHM_NAMES)
    out = {}
    for name in names:
        sub = argparse.Namespace(algo=name, cost=args.cost,
                                 min_split=args.min_split, k=args.k)
        out[name] = _make_estimator(sub)
    return out


def _load_labeled_dataset(path: str, stage: str) -> tuple[Dataset, str]:
    with _stage(stage):
        matrix = load_matrix(path)
        dataset = matrix.to_dataset()
        return dataset, fingerprint_names(matrix.names)


def _check_fingerprint(matrix_fp: str, model_fp: str) -> None:
    if matrix_fp != model_fp:
        raise ValueError("feature layout fingerprint of the matrix does not match the model")


def cmd_synth(args: argparse.Namespace) -> int:
    with _stage("synth"):
        spec = GenSpec(seed=args.seed, n_target=args.target,
                       n_nontarget=args.nontarget, separation=args.sep)
        data = emit_log(generate(spec))
    with _stage("write-output"):
        _write_atomic(args.out, data)
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    from .artifacts import parse_artifact_log

    with _stage("parse"):
        with open(args.input, "rb") as fh:
            runs = parse_artifact_log(fh)
    with _stage("extract"):
        from .features import BehaviorVectorizer

        X = BehaviorVectorizer(DEFAULT_LAYOUT).transform(runs)
        ids = [run.sample_id for run in runs]
        labels = [run.label for run in runs]
    with _stage("write-output"):
        fd, tmp = tempfile.mkstemp(dir=Path(args.out).parent or Path("."),
                                   prefix=f".{Path(args.out).name}.")
        os.close(fd)
        try:
            save_matrix(tmp, X, ids, labels, DEFAULT_LAYOUT)
            os.replace(tmp, args.out)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    dataset, matrix_fp = _load_labeled_dataset(args.input, "read-input")
    with _stage("train"):
        _check_fingerprint(matrix_fp, DEFAULT_LAYOUT.fingerprint)
        model = _make_estimator(args)
        if "random_state" in model.get_params():
            model.set_params(random_state=args.seed)
        model.fit(dataset.X, dataset.y)
        data = save_model(model, DEFAULT_LAYOUT)
    with _stage("write-output"):
        _write_atomic(args.out, data)
    return 0


def _load_model_file(path: str):
    with _stage("read-input"):
        with open(path, "rb") as fh:
            return load_model(fh.read(), DEFAULT_LAYOUT)


def cmd_predict(args: argparse.Namespace) -> int:
    model = _load_model_file(args.model)
    with _stage("read-input"):
        matrix = load_matrix(args.input)
    with _stage("predict"):
        _check_fingerprint(fingerprint_names(matrix.names), DEFAULT_LAYOUT.fingerprint)
        predicted = model.predict(matrix.X)
        lines = ["sample_id,predicted_label"]
        for sid, value in zip(matrix.sample_ids, predicted):
            lines.append(f"{sid},{'target' if value == 1 else 'nontarget'}")
        data = ("\n".join(lines) + "\n").encode("utf-8")
    with _stage("write-output"):
        _write_atomic(args.out, data)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    model = _load_model_file(args.model)
    dataset, matrix_fp = _load_labeled_dataset(args.input, "read-input")
    with _stage("evaluate"):
        _check_fingerprint(matrix_fp, DEFAULT_LAYOUT.fingerprint)
        predicted = model.predict(dataset.X)
        reports = {args.model_name or "model": error_report(confusion(dataset.y, predicted))}
        table = render_table(reports)
    with _stage("write-output"):
        _write_atomic(args.out, report_json_bytes(reports))
        _write_atomic(Path(args.out).with_suffix(".txt"), table.encode("utf-8"))
    sys.stdout.write(table)
    return 0


def cmd_flip(args: argparse.Namespace) -> int:
    dataset_a, fp_a = _load_labeled_dataset(args.input, "read-input")
    dataset_b, fp_b = _load_labeled_dataset(args.input_b, "read-input")
    with _stage("evaluate"):
        _check_fingerprint(fp_a, DEFAULT_LAYOUT.fingerprint)
        _check_fingerprint(fp_b, DEFAULT_LAYOUT.fingerprint)
        algorithms = _selected_algorithms(args)
        forward, backward = flip_experiment(dataset_a, dataset_b, algorithms,
                                            seed=args.seed)
    with _stage("write-output"):
        prefix = Path(args.out)
        for tag, reports in (("ab", forward), ("ba", backward)):
            base = prefix.with_name(f"{prefix.name}_{tag}")
            _write_atomic(base.with_suffix(".json"), report_json_bytes(reports))
            _write_atomic(base.with_suffix(".txt"), render_table(reports).encode("utf-8"))
    sys.stdout.write("A->B\n" + render_table(forward))
    sys.stdout.write("B->A\n" + render_table(backward))
    return 0


def _add_hyperparameters(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cost", type=float, default=0.01,
                        help="cost of constraint violation for the linear models")
    parser.add_argument("--min-split", type=int, default=5, dest="min_split",
                        help="minimum samples required to split a tree node")
    parser.add_argument("--k", type=int, default=980, help="number of nearest neighbors")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="behaviorclf",
        description="Behavior-log feature extraction and binary classification pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled artifact log")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--target", type=int, default=1001, help="number of target samples")
    p.add_argument("--nontarget", type=int, default=1000, help="number of non-target samples")
    p.add_argument("--sep", type=float, default=0.9,
                   help="class separation in [0,1]; 0 makes the classes identical")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="artifact log -> feature matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train one classifier on a labeled matrix")
    p.add_argument("--algo", choices=ALGORITHM_NAMES, required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_hyperparameters(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict labels for a feature matrix")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a model on a labeled matrix")
    p.add_argument("--model", required=True)
    p.add_argument("--model-name", dest="model_name", default=None,
                   help="row label used in the report table")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="report JSON path (.txt written alongside)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("flip-eval",
                       help="train/test on A->B and B->A with a set of algorithms")
    p.add_argument("--in", dest="input", required=True, help="matrix A")
    p.add_argument("--in-b", dest="input_b", required=True, help="matrix B")
    p.add_argument("--algo", action="append", choices=ALGORITHM_NAMES, default=None,
                   help="repeatable; default is all five algorithms")
    p.add_argument("--out", required=True,
                   help="output prefix; writes <out>_ab.json/.txt and <out>_ba.json/.txt")
    _add_hyperparameters(p)
    p.set_defaults(func=cmd_flip)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"behaviorclf {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
