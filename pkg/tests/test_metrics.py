# -*- coding: utf-8 -*-
"""評価指標のテスト"""

from itertools import permutations

import numpy as np
import pytest

from modules.errors import ValidationError
from modules.metrics import accuracy, contingency, evaluate, nmi, purity

TRUTH = np.array([0, 0, 1, 1, 2, 2])
PRED = np.array([1, 1, 0, 0, 0, 2])


def _brute_force_accuracy(pred, truth, k):
    best = 0
    for perm in permutations(range(k)):
        mapped = np.asarray(perm)[pred]
        best = max(best, int(np.sum(mapped == truth)))
    return best / len(truth)


class TestAccuracy:
    def test_perfect(self):
        assert accuracy(TRUTH, TRUTH) == 1.0

    def test_renamed_labels(self):
        assert accuracy(np.array([2, 2, 0, 0, 1, 1]), TRUTH) == 1.0

    def test_example(self):
        assert accuracy(PRED, TRUTH) == pytest.approx(5 / 6)

    def test_matches_brute_force(self, rng):
        for _ in range(200):
            k = int(rng.integers(1, 7))
            n = int(rng.integers(1, 40))
            truth = rng.integers(0, k, n)
            pred = rng.integers(0, k, n)
            assert accuracy(pred, truth) == pytest.approx(_brute_force_accuracy(pred, truth, k), abs=1e-12)

    def test_more_predicted_clusters_than_classes(self):
        assert accuracy(np.array([0, 1, 2, 3]), np.array([0, 0, 1, 1])) == pytest.approx(0.5)


class TestNMI:
    def test_identical_partitions(self):
        assert nmi(TRUTH, TRUTH) == pytest.approx(1.0)

    def test_independent_partition(self):
        assert nmi(np.array([0, 1, 0, 1]), np.array([0, 0, 1, 1])) == pytest.approx(0.0, abs=1e-12)

    def test_random_labels_near_zero(self):
        rng = np.random.default_rng(0)
        truth = rng.integers(0, 5, 10_000)
        pred = rng.integers(0, 5, 10_000)
        assert nmi(pred, truth) < 0.1

    def test_arithmetic_average(self):
        value = nmi(PRED, TRUTH, average_method="arithmetic")
        assert 0.0 < value < 1.0

    def test_unknown_average(self):
        with pytest.raises(ValidationError):
            nmi(PRED, TRUTH, average_method="max-entropy")


class TestPurity:
    def test_perfect(self):
        assert purity(TRUTH, TRUTH) == 1.0

    def test_single_cluster(self):
        truth = np.repeat(np.arange(4), 5)
        assert purity(np.zeros(20, dtype=int), truth) == pytest.approx(0.25)

    def test_example(self):
        assert purity(PRED, TRUTH) == pytest.approx(5 / 6)


def test_label_permutation_invariance(rng):
    for _ in range(20):
        truth = rng.integers(0, 4, 60)
        pred = rng.integers(0, 4, 60)
        renamed = rng.permutation(4)[pred]
        for metric in (accuracy, nmi, purity):
            assert metric(renamed, truth) == pytest.approx(metric(pred, truth), abs=1e-12)


def test_contingency_orientation():
    table = contingency(PRED, TRUTH)
    assert table.shape == (3, 3)
    assert table.tolist() == [[0, 2, 1], [2, 0, 0], [0, 0, 1]]


def test_evaluate_bundles_metrics():
    report = evaluate(PRED, TRUTH)
    assert report.acc == pytest.approx(5 / 6)
    assert report.purity == pytest.approx(5 / 6)
    assert report.to_dict()["contingency"] == contingency(PRED, TRUTH).tolist()


@pytest.mark.parametrize("pred, truth", [
    (np.array([0, 1]), np.array([0, 1, 1])),
    (np.array([], dtype=int), np.array([], dtype=int)),
])
def test_invalid_inputs(pred, truth):
    for metric in (accuracy, nmi, purity):
        with pytest.raises(ValidationError):
            metric(pred, truth)
