import json
import math

import numpy as np
import pytest
from scipy.stats import ttest_rel

from src.errors import ConfigError, InsufficientDataError, InvalidDistributionError
from src.profiles import PatternVocabulary
from src.stats import (
    cosine_distance, js_divergence, paired_t_test, shannon_entropy, split_halves,
    stability_experiment, user_seed, write_stability_rows, write_stability_summary,
)


@pytest.mark.parametrize("p, expected", [
    ([1.0], 0.0),
    ([0.5, 0.5], 1.0),
    ([0.75, 0.25], 0.811278),
])
def test_entropy(p, expected):
    assert shannon_entropy(p) == pytest.approx(expected, abs=1e-6)


def test_entropy_rejects_non_distributions():
    with pytest.raises(InvalidDistributionError):
        shannon_entropy([0.5, 0.6])
    with pytest.raises(InvalidDistributionError):
        shannon_entropy([1.5, -0.5])


def test_js_identity():
    assert js_divergence([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]) == 0.0


def test_js_hand_value():
    assert js_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(0.311278, abs=1e-4)


def test_js_disjoint_supports():
    assert js_divergence([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0, abs=1e-12)
    eps = 1e-6
    smoothed = js_divergence([1 - eps, eps], [eps, 1 - eps])
    assert 0.999 < smoothed < 1.0


def test_js_natural_log_bound():
    assert js_divergence([1.0, 0.0], [0.0, 1.0], base=math.e) == pytest.approx(math.log(2))


def test_js_symmetric_and_bounded():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        size = int(rng.integers(2, 20))
        p = rng.dirichlet(np.ones(size))
        q = rng.dirichlet(np.ones(size))
        p, q = p / p.sum(), q / q.sum()
        forward = js_divergence(p, q)
        assert abs(forward - js_divergence(q, p)) <= 1e-12
        assert 0.0 <= forward <= 1.0


def test_js_length_mismatch():
    with pytest.raises(InvalidDistributionError):
        js_divergence([1.0], [0.5, 0.5])


def test_cosine_values():
    assert cosine_distance([1, 1], [1, 0]) == pytest.approx(0.292893, abs=1e-6)
    assert cosine_distance([1, 0], [0, 1]) == pytest.approx(1.0)
    assert cosine_distance([0.2, 0.8], [0.2, 0.8]) == pytest.approx(0.0, abs=1e-12)
    assert cosine_distance([1, 2, 3], [2, 4, 6]) == pytest.approx(0.0, abs=1e-12)


def test_cosine_zero_vector():
    with pytest.raises(InvalidDistributionError):
        cosine_distance([0, 0], [1, 0])


def test_paired_t_hand_values():
    result = paired_t_test([2, 4, 6], [1, 2, 3])
    assert result.t == pytest.approx(3.4641, abs=1e-3)
    assert result.df == 2
    assert result.p == pytest.approx(0.0742, abs=1e-3)


def test_paired_t_matches_scipy():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(2, 60))
        xs = rng.normal(0.4, 0.1, n)
        ys = rng.normal(0.5, 0.1, n)
        ours = paired_t_test(xs, ys)
        reference = ttest_rel(xs, ys)
        assert ours.t == pytest.approx(reference.statistic, rel=1e-9)
        assert ours.p == pytest.approx(reference.pvalue, rel=1e-7, abs=1e-15)


def test_paired_t_sign_convention():
    assert paired_t_test([0.1, 0.2, 0.25], [0.5, 0.4, 0.6]).t < 0


def test_paired_t_equal_samples():
    result = paired_t_test([0.3, 0.1, 0.7], [0.3, 0.1, 0.7])
    assert (result.t, result.p) == (0.0, 1.0)


def test_paired_t_constant_difference():
    result = paired_t_test([1.0, 2.0], [2.0, 3.0])
    assert result.t == -math.inf
    assert result.p == 0.0


def test_paired_t_needs_two_pairs():
    with pytest.raises(InsufficientDataError):
        paired_t_test([1.0], [2.0])


@pytest.mark.parametrize("n, sizes", [(2, (1, 1)), (5, (3, 2)), (6, (3, 3))])
def test_split_sizes(make_seq, n, sizes):
    seqs = [make_seq(["p"], session=f"s{i}") for i in range(n)]
    half_a, half_b = split_halves(seqs, seed=1)
    assert (len(half_a), len(half_b)) == sizes
    assert sorted(s.session_id for s in half_a + half_b) == sorted(s.session_id for s in seqs)


def test_split_is_deterministic(make_seq):
    seqs = [make_seq(["p"], session=f"s{i:02d}") for i in range(12)]
    assert split_halves(seqs, user_seed(4, "u1")) == split_halves(seqs, user_seed(4, "u1"))


def test_split_needs_two_sequences(make_seq):
    with pytest.raises(InsufficientDataError):
        split_halves([make_seq(["p"])], seed=0)


@pytest.fixture
def identical_users(make_seq):
    return {
        user: [make_seq(["AnEx", "ex", "p"], user=user, session=f"s{i}") for i in range(4)]
        for user in ("u1", "u2", "u3")
    }


VOCAB = PatternVocabulary((("AnEx", "ex"), ("ex", "p"), ("p", "P")))


def test_identical_users_are_indistinguishable(identical_users):
    report = stability_experiment(identical_users, VOCAB, maxgap=1, epsilon=1e-4, seed=0,
                                  measures=["js_divergence"])
    summary = report.summaries["js_divergence"]
    assert summary.self_distance == 0.0
    assert summary.distance_to_other == 0.0
    assert (summary.t, summary.p) == (0.0, 1.0)


def test_distinct_users_are_closer_to_themselves(make_seq):
    per_user = {
        "u1": [make_seq(["AnEx", "ex"], user="u1", session=f"s{i}") for i in range(4)],
        "u2": [make_seq(["p", "P"], user="u2", session=f"s{i}") for i in range(4)],
    }
    report = stability_experiment(per_user, VOCAB, maxgap=1, epsilon=1e-4, seed=0)
    for summary in report.summaries.values():
        assert summary.self_distance < summary.distance_to_other
        assert summary.t < 0
        assert summary.p < 1e-6


def test_single_sequence_users_are_excluded(identical_users, make_seq):
    per_user = dict(identical_users, u0=[make_seq(["p"], user="u0")])
    report = stability_experiment(per_user, VOCAB, maxgap=1, epsilon=1e-4, seed=0)
    assert report.excluded == ["u0"]
    assert [r.user_id for r in report.rows] == ["u1", "u2", "u3"]


def test_needs_two_eligible_users(identical_users):
    with pytest.raises(InsufficientDataError):
        stability_experiment({"u1": identical_users["u1"]}, VOCAB, maxgap=1, epsilon=1e-4, seed=0)


def test_unknown_pairing_and_measure(identical_users):
    with pytest.raises(ConfigError):
        stability_experiment(identical_users, VOCAB, 1, 1e-4, 0, pairing="both")
    with pytest.raises(ConfigError):
        stability_experiment(identical_users, VOCAB, 1, 1e-4, 0, measures=["euclidean"])


def varied_users(make_seq):
    patterns = [["AnEx", "ex", "p"], ["p", "P", "f"], ["AnEx", "ex", "ex", "p"], ["f", "p", "P"]]
    return {
        f"u{u}": [make_seq(patterns[(u + i) % 4][: 2 + (i * u) % 3], user=f"u{u}", session=f"s{i}")
                  for i in range(3 + u)]
        for u in range(1, 6)
    }


def test_experiment_is_deterministic(make_seq):
    per_user = varied_users(make_seq)
    first = stability_experiment(per_user, VOCAB, maxgap=1, epsilon=1e-4, seed=9)
    second = stability_experiment(per_user, VOCAB, maxgap=1, epsilon=1e-4, seed=9)
    assert first.rows == second.rows
    assert first.summaries == second.summaries


def test_whole_pairing(make_seq):
    report = stability_experiment(varied_users(make_seq), VOCAB, maxgap=1, epsilon=1e-4, seed=9,
                                  pairing="whole")
    assert report.pairing == "whole"
    assert len(report.rows) == 5
    for row in report.rows:
        assert set(row.self_distance) == {"js_divergence", "cosine_distance"}


def test_stability_files(tmp_path, make_seq):
    report = stability_experiment(varied_users(make_seq), VOCAB, maxgap=1, epsilon=1e-4, seed=9)
    write_stability_rows(report, tmp_path / "stability.csv")
    write_stability_summary(report, tmp_path / "stability_summary.json")

    header = (tmp_path / "stability.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "user_id,js_divergence_self,js_divergence_other,cosine_distance_self,cosine_distance_other"

    summary = json.loads((tmp_path / "stability_summary.json").read_text(encoding="utf-8"))
    assert summary["n_users"] == 5
    assert [m["measure"] for m in summary["measures"]] == ["js_divergence", "cosine_distance"]
    assert set(summary["measures"][0]) == {"measure", "self_distance", "distance_to_other", "t", "df", "p"}
