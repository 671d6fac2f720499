# -*- coding: utf-8 -*-
"""スペクトル埋め込みと k-means のテスト"""

import numpy as np
import pytest
from scipy import linalg

from modules.embedding import (
    SpectralEmbedding, kmeans, normalized_graph, similarity_from_graph, spectral_embedding
)
from modules.errors import DegeneracyWarning, ValidationError
from modules.metrics import accuracy
from utils.math_utils import orthonormality_error, principal_angles


def _random_graph(rng, m, n):
    Z = rng.random((m, n))
    return Z / Z.sum(axis=0)


class TestSpectralEmbedding:
    def test_identity_graph(self):
        emb = spectral_embedding(np.eye(4), 4)

        assert np.allclose(np.abs(emb.coords).sum(axis=0), 1.0)
        assert np.allclose(np.abs(emb.coords).sum(axis=1), 1.0)
        assert np.allclose(emb.singular_values, 1.0)

    def test_block_graph_separates_groups(self):
        Z = np.zeros((4, 20))
        Z[0:2, :10] = 0.5
        Z[2:4, 10:] = 0.5
        coords = spectral_embedding(Z, 2).coords

        first, second = coords[:10], coords[10:]
        within = max(np.ptp(first, axis=0).max(), np.ptp(second, axis=0).max())
        between = np.linalg.norm(first.mean(axis=0) - second.mean(axis=0))
        assert between > 10 * max(within, 1e-12)

    def test_columns_orthonormal_and_sorted(self, rng):
        emb = spectral_embedding(_random_graph(rng, 6, 40), 3)
        assert emb.coords.shape == (40, 3)
        assert orthonormality_error(emb.coords) < 1e-8
        assert np.all(np.diff(emb.singular_values) <= 0)

    def test_sign_convention(self, rng):
        coords = spectral_embedding(_random_graph(rng, 5, 30), 3).coords
        pivots = np.argmax(np.abs(coords), axis=0)
        assert np.all(coords[pivots, np.arange(3)] > 0)

    @pytest.mark.parametrize("degree_norm", [True, False])
    def test_matches_dense_similarity_eigenvectors(self, rng, degree_norm):
        checked = 0
        for _ in range(50):
            m = int(rng.integers(2, 11))
            n = int(rng.integers(m + 1, 201))
            k = int(rng.integers(1, m + 1))
            Z = _random_graph(rng, m, n)

            S = similarity_from_graph(Z, degree_norm)
            eigvals, eigvecs = linalg.eigh(S)
            eigvals, eigvecs = eigvals[::-1], eigvecs[:, ::-1]
            gap = eigvals[k - 1] - (eigvals[k] if k < n else 0.0)
            if gap <= 1e-6 * eigvals[0]:
                continue

            emb = spectral_embedding(Z, k, degree_norm=degree_norm)
            assert np.max(principal_angles(emb.coords, eigvecs[:, :k])) < 1e-8
            assert np.allclose(emb.singular_values ** 2, eigvals[:k], atol=1e-10)
            checked += 1
        assert checked >= 10

    def test_rank_deficient_graph_is_padded(self):
        Z = np.full((3, 10), 1.0 / 3.0)
        with pytest.warns(DegeneracyWarning):
            emb = spectral_embedding(Z, 2)
        assert emb.coords.shape == (10, 2)
        assert orthonormality_error(emb.coords) < 1e-8
        assert emb.singular_values[1] == 0.0

    def test_zero_degree_anchor_dropped(self):
        Z = np.zeros((3, 6))
        Z[0, :3] = 1.0
        Z[1, 3:] = 1.0
        with pytest.warns(DegeneracyWarning):
            emb = spectral_embedding(Z, 2)
        assert emb.dropped_anchors == [2]
        assert orthonormality_error(emb.coords) < 1e-8

    def test_literal_reading_skips_degree_scaling(self, rng):
        Z = _random_graph(rng, 4, 12)
        Zh, dropped = normalized_graph(Z, degree_norm=False)
        assert np.array_equal(Zh, Z) and dropped == []
        assert not spectral_embedding(Z, 2, degree_norm=False).degree_normalized

    def test_k_larger_than_anchor_count(self, rng):
        with pytest.raises(ValidationError):
            spectral_embedding(_random_graph(rng, 3, 10), 4)

    def test_negative_graph_rejected(self):
        with pytest.raises(ValidationError):
            spectral_embedding(np.array([[1.0, -0.5], [0.0, 1.5]]), 1)


class TestKMeans:
    def test_each_point_its_own_cluster(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        result = kmeans(points, 3, seed=0)
        assert sorted(result.assignments.tolist()) == [0, 1, 2]
        assert result.inertia == pytest.approx(0.0, abs=1e-12)

    def test_two_blobs(self, rng):
        blobs = np.vstack([rng.normal(0.0, 0.1, (30, 2)), rng.normal(5.0, 0.1, (30, 2))])
        truth = np.repeat([0, 1], 30)
        result = kmeans(blobs, 2, seed=1)
        assert accuracy(result.assignments, truth) == 1.0
        assert result.centers.shape == (2, 2)

    def test_deterministic_given_seed(self, rng):
        emb = SpectralEmbedding(coords=rng.standard_normal((50, 3)), singular_values=np.ones(3))
        a = kmeans(emb, 3, seed=4)
        b = kmeans(emb, 3, seed=4)
        assert np.array_equal(a.assignments, b.assignments)
        assert np.array_equal(a.centers, b.centers)
        assert a.inertia == b.inertia

    def test_duplicate_points_do_not_fail(self):
        points = np.vstack([np.zeros((5, 2)), np.ones((5, 2))])
        result = kmeans(points, 3, seed=0)
        assert result.assignments.shape == (10,)
        assert set(result.assignments.tolist()) <= {0, 1, 2}

    @pytest.mark.parametrize("k, restarts", [(0, 10), (2, 0), (20, 10)])
    def test_invalid_arguments(self, rng, k, restarts):
        with pytest.raises(ValidationError):
            kmeans(rng.standard_normal((10, 2)), k, restarts=restarts)
