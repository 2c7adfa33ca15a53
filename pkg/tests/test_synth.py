from __future__ import annotations

import dataclasses
import json

import numpy as np
import pytest

from behaviorclf.artifacts import Label, parse_artifact_log, validate_run
from behaviorclf.estimators import SquaredHingeSVM
from behaviorclf.evaluation import default_algorithms, run_experiment
from behaviorclf.features import build_dataset
from behaviorclf.synth import (
    GenSpec,
    emit_log,
    generate,
    generic_profile,
    interpolate_profile,
    load_profile,
    profile_from_dict,
    zeus_like_profile,
)


def test_zero_counts_give_empty_list():
    assert generate(GenSpec(seed=1, n_target=0, n_nontarget=0, separation=0.5)) == []


def test_identical_specs_emit_identical_bytes():
    spec = GenSpec(seed=7, n_target=6, n_nontarget=4, separation=0.8)
    assert emit_log(generate(spec)) == emit_log(generate(spec))


def test_different_seeds_differ():
    a = emit_log(generate(GenSpec(seed=7, n_target=4, n_nontarget=4, separation=0.8)))
    b = emit_log(generate(GenSpec(seed=8, n_target=4, n_nontarget=4, separation=0.8)))
    assert a != b


def test_label_balance_matches_spec():
    runs = generate(GenSpec(seed=5, n_target=23, n_nontarget=11, separation=0.4))
    assert sum(1 for r in runs if r.label is Label.TARGET) == 23
    assert sum(1 for r in runs if r.label is Label.NONTARGET) == 11


def test_per_sample_streams_are_independent_of_corpus_size():
    small = generate(GenSpec(seed=9, n_target=3, n_nontarget=2, separation=0.7))
    large = generate(GenSpec(seed=9, n_target=6, n_nontarget=5, separation=0.7))
    assert large[:3] == small[:3]  # target block
    assert large[6:8] == small[3:5]  # nontarget block


def test_generated_runs_are_valid_and_nonempty():
    runs = generate(GenSpec(seed=2, n_target=20, n_nontarget=20, separation=0.9))
    for run in runs:
        assert run.event_count > 0
        assert validate_run(run) == []


def test_emit_parse_emit_is_byte_stable():
    runs = generate(GenSpec(seed=3, n_target=5, n_nontarget=5, separation=0.6))
    log = emit_log(runs)
    parsed = parse_artifact_log(log)
    assert parsed == runs
    assert emit_log(parsed) == log


def test_single_run_line_count_equals_event_count():
    (run,) = generate(GenSpec(seed=4, n_target=1, n_nontarget=0, separation=0.5))
    assert len(emit_log([run]).splitlines()) == run.event_count


def test_corpus_recovers_all_sample_ids():
    runs = generate(GenSpec(seed=6, n_target=60, n_nontarget=40, separation=0.5))
    parsed = parse_artifact_log(emit_log(runs))
    assert len({run.sample_id for run in parsed}) == 100


@pytest.mark.parametrize("bad", [
    dict(seed=-1, n_target=1, n_nontarget=1, separation=0.5),
    dict(seed=1, n_target=-1, n_nontarget=1, separation=0.5),
    dict(seed=1, n_target=1, n_nontarget=1, separation=1.5),
])
def test_invalid_specs_rejected(bad):
    with pytest.raises(ValueError):
        generate(GenSpec(**bad))


class TestProfiles:
    def test_bundled_profiles_validate(self):
        zeus_like_profile().validate()
        generic_profile().validate()

    def test_interpolation_endpoints(self):
        zeus = zeus_like_profile()
        gen = generic_profile()
        at_zero = interpolate_profile(zeus, gen, 0.0)
        at_one = interpolate_profile(zeus, gen, 1.0)
        assert at_zero == zeus
        assert at_one == gen

    def test_interpolation_midpoint_mixes(self):
        zeus = zeus_like_profile()
        gen = generic_profile()
        mid = interpolate_profile(zeus, gen, 0.5)
        key = "post"
        expected = 0.5 * gen.http_method_mix[key] + 0.5 * zeus.http_method_mix[key]
        assert mid.http_method_mix[key] == pytest.approx(expected)
        mid.validate()

    def test_load_profile_from_path(self, tmp_path):
        data = dataclasses.asdict(zeus_like_profile())
        path = tmp_path / "custom.profile"
        path.write_text(json.dumps(data))
        assert load_profile(path) == zeus_like_profile()

    def test_degenerate_range_rejected(self):
        data = dataclasses.asdict(zeus_like_profile())
        data["flow_count"] = [4, 4]
        with pytest.raises(ValueError, match="non-degenerate"):
            profile_from_dict(data)

    def test_mix_must_sum_to_one(self):
        data = dataclasses.asdict(zeus_like_profile())
        data["http_method_mix"] = {"post": 0.5, "get": 0.2, "head": 0.1, "other": 0.1}
        with pytest.raises(ValueError, match="sum to 1"):
            profile_from_dict(data)

    def test_unknown_field_rejected(self):
        data = dataclasses.asdict(zeus_like_profile())
        data["surprise"] = 1
        with pytest.raises(ValueError, match="unknown field"):
            profile_from_dict(data)

    def test_missing_field_rejected(self):
        data = dataclasses.asdict(zeus_like_profile())
        del data["dns_count"]
        with pytest.raises(ValueError, match="missing field"):
            profile_from_dict(data)


def _experiment_accuracy(seed_pair: tuple[int, int], separation: float, n: int) -> float:
    train = build_dataset(generate(GenSpec(
        seed=seed_pair[0], n_target=n, n_nontarget=n, separation=separation)),
        for_training=True)
    test = build_dataset(generate(GenSpec(
        seed=seed_pair[1], n_target=n, n_nontarget=n, separation=separation)),
        for_training=True)
    report = run_experiment(train, test, {"svm": SquaredHingeSVM()})["svm"]
    return report.accuracy


def test_separation_knob_gives_monotone_accuracy():
    grid = (0.0, 0.25, 0.5, 0.75, 1.0)
    means = []
    for separation in grid:
        accs = [_experiment_accuracy((100 + i, 200 + i), separation, n=150)
                for i in range(5)]
        means.append(float(np.mean(accs)))
    # allow at most one adjacent inversion of <= 1 accuracy point
    inversions = [max(0.0, means[i] - means[i + 1]) for i in range(len(means) - 1)]
    bad = [inv for inv in inversions if inv > 0]
    assert len(bad) <= 1
    assert all(inv <= 0.01 for inv in inversions)
    assert means[-1] > 0.95


def test_zero_separation_is_indistinguishable_from_coin_flip():
    train = build_dataset(generate(GenSpec(
        seed=11, n_target=600, n_nontarget=600, separation=0.0)), for_training=True)
    test = build_dataset(generate(GenSpec(
        seed=12, n_target=500, n_nontarget=500, separation=0.0)), for_training=True)
    reports = run_experiment(train, test, default_algorithms())
    half_width = 2.5758293035489004 * (0.25 / 1000) ** 0.5  # 99% binomial interval
    for name, report in reports.items():
        assert abs(report.accuracy - 0.5) <= half_width, (name, report.accuracy)
