# -*- coding: utf-8 -*-
"""データセットモジュールのテスト"""

import json

import numpy as np
import pandas as pd
import pytest
from scipy import io as sio

from modules.dataset import (
    MultiViewDataset, SyntheticSpec, dataset_summary, generate_synthetic, load_mat_dataset,
    load_multiview, normalize_views, validate_synthetic_spec, write_multiview
)
from modules.errors import DataParseError, DatasetNotFoundError, StructuralError, ValidationError


def _write(path, matrix):
    pd.DataFrame(np.asarray(matrix)).to_csv(path, header=False, index=False)


class TestLoadMultiview:
    def test_two_views_with_labels(self, tmp_path, rng):
        _write(tmp_path / "view_0.csv", rng.standard_normal((4, 10)))
        _write(tmp_path / "view_1.csv", rng.standard_normal((7, 10)))
        _write(tmp_path / "labels.csv", np.arange(10).reshape(-1, 1) % 2)

        ds = load_multiview(tmp_path)

        assert ds.p == 2
        assert ds.n == 10
        assert ds.dims == [4, 7]
        assert ds.has_labels
        assert ds.labels.tolist() == [0, 1] * 5

    def test_sample_count_mismatch_names_both_files(self, tmp_path, rng):
        _write(tmp_path / "view_0.csv", rng.standard_normal((3, 10)))
        _write(tmp_path / "view_1.csv", rng.standard_normal((3, 11)))

        with pytest.raises(StructuralError) as excinfo:
            load_multiview(tmp_path)
        assert "view_0.csv" in str(excinfo.value)
        assert "view_1.csv" in str(excinfo.value)

    def test_non_finite_value_reports_location(self, tmp_path):
        (tmp_path / "view_0.csv").write_text("1,2,3\n4,nan,6\n")

        with pytest.raises(DataParseError) as excinfo:
            load_multiview(tmp_path)
        assert excinfo.value.row == 1
        assert excinfo.value.column == 1

    def test_unparseable_value(self, tmp_path):
        (tmp_path / "view_0.csv").write_text("1,2\n3,abc\n")
        with pytest.raises(DataParseError):
            load_multiview(tmp_path)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DatasetNotFoundError):
            load_multiview(tmp_path / "nowhere")

    def test_empty_directory(self, tmp_path):
        with pytest.raises(DatasetNotFoundError):
            load_multiview(tmp_path)

    def test_labels_optional(self, tmp_path, rng):
        _write(tmp_path / "view_0.csv", rng.standard_normal((3, 5)))
        ds = load_multiview(tmp_path)
        assert not ds.has_labels
        with pytest.raises(ValidationError):
            ds.require_labels()

    def test_views_sorted_by_file_name(self, tmp_path):
        _write(tmp_path / "view_1.csv", np.full((2, 4), 1.0))
        _write(tmp_path / "view_0.csv", np.full((5, 4), 0.0))
        ds = load_multiview(tmp_path)
        assert ds.dims == [5, 2]

    def test_manifest_overrides_file_names(self, tmp_path, rng):
        _write(tmp_path / "text.csv", rng.standard_normal((6, 8)))
        _write(tmp_path / "links.csv", rng.standard_normal((3, 8)))
        _write(tmp_path / "gt.csv", np.zeros((8, 1), dtype=int))
        (tmp_path / "meta.json").write_text(json.dumps({
            "views": ["links.csv", "text.csv"], "labels": "gt.csv", "view_names": ["links", "text"],
        }))

        ds = load_multiview(tmp_path)
        assert ds.dims == [3, 6]
        assert ds.view_names == ["links", "text"]
        assert ds.has_labels

    def test_round_trip(self, tmp_path, rng):
        original = MultiViewDataset(
            views=[rng.standard_normal((4, 9)) * 1e3, rng.standard_normal((2, 9)) * 1e-7],
            labels=np.arange(9) % 3,
        )
        write_multiview(original, tmp_path)
        loaded = load_multiview(tmp_path)

        for before, after in zip(original.views, loaded.views):
            assert np.max(np.abs(before - after)) <= 1e-12 * max(1.0, np.max(np.abs(before)))
        assert np.array_equal(original.labels, loaded.labels)
        assert loaded.view_names == original.view_names


class TestMatLoader:
    def test_numbered_keys_samples_first(self, tmp_path, rng):
        path = tmp_path / "webkb_like.mat"
        sio.savemat(str(path), {
            "X1": rng.standard_normal((12, 5)),
            "X2": rng.standard_normal((12, 3)),
            "Y": (np.arange(12) % 4 + 1).reshape(-1, 1),
        })

        ds = load_multiview(path)
        assert ds.dims == [5, 3]
        assert ds.n == 12
        assert ds.labels.min() == 0
        assert sorted(set(ds.labels.tolist())) == [0, 1, 2, 3]

    def test_cell_array(self, tmp_path, rng):
        cells = np.empty((1, 2), dtype=object)
        cells[0, 0] = rng.standard_normal((7, 4))
        cells[0, 1] = rng.standard_normal((7, 6))
        path = tmp_path / "cells.mat"
        sio.savemat(str(path), {"X": cells})

        ds = load_mat_dataset(path)
        assert ds.dims == [4, 6]
        assert not ds.has_labels

    def test_no_views(self, tmp_path):
        path = tmp_path / "empty.mat"
        sio.savemat(str(path), {"something": np.zeros((2, 2))})
        with pytest.raises(DataParseError):
            load_mat_dataset(path)


class TestDatasetInvariants:
    def test_arrays_are_read_only(self, rng):
        ds = MultiViewDataset(views=[rng.standard_normal((2, 4))])
        with pytest.raises(ValueError):
            ds.views[0][0, 0] = 1.0

    def test_input_is_copied(self):
        source = np.ones((2, 3))
        ds = MultiViewDataset(views=[source])
        source[0, 0] = 5.0
        assert ds.views[0][0, 0] == 1.0

    def test_mismatched_views_rejected(self):
        with pytest.raises(StructuralError):
            MultiViewDataset(views=[np.ones((2, 3)), np.ones((2, 4))])

    def test_label_length_checked(self):
        with pytest.raises(ValidationError):
            MultiViewDataset(views=[np.ones((2, 3))], labels=[0, 1])


class TestNormalizeViews:
    def test_none_is_identity(self, noisy_dataset):
        out = normalize_views(noisy_dataset, "none")
        for before, after in zip(noisy_dataset.views, out.views):
            assert np.array_equal(before, after)

    def test_zscore_single_row(self):
        ds = MultiViewDataset(views=[np.array([[1.0, 3.0]])])
        out = normalize_views(ds, "zscore")
        assert np.allclose(out.views[0], [[-1.0, 1.0]])

    def test_zscore_constant_row_is_centered(self):
        ds = MultiViewDataset(views=[np.array([[5.0, 5.0, 5.0], [1.0, 2.0, 3.0]])])
        out = normalize_views(ds, "zscore")
        assert np.allclose(out.views[0][0], 0.0)
        assert np.isclose(out.views[0][1].mean(), 0.0)
        assert np.isclose(out.views[0][1].std(), 1.0)

    def test_zscore_rows_standardized_in_every_view(self, rng):
        views = []
        for dim in (4, 7, 11):
            loc = rng.uniform(-50.0, 50.0, size=(dim, 1))
            scale = rng.uniform(0.1, 10.0, size=(dim, 1))
            views.append(loc + scale * rng.standard_normal((dim, 150)))
        out = normalize_views(MultiViewDataset(views=views), "zscore")

        for view in out.views:
            assert np.allclose(view.mean(axis=1), 0.0, atol=1e-10)
            assert np.allclose(view.std(axis=1), 1.0, atol=1e-10)

    def test_unit_column(self):
        ds = MultiViewDataset(views=[np.array([[3.0, 0.0], [4.0, 0.0]])])
        out = normalize_views(ds, "unit-column")
        assert np.allclose(out.views[0][:, 0], [0.6, 0.8])
        assert np.array_equal(out.views[0][:, 1], [0.0, 0.0])

    def test_labels_preserved(self, noisy_dataset):
        out = normalize_views(noisy_dataset, "zscore")
        assert np.array_equal(out.labels, noisy_dataset.labels)

    def test_unknown_mode(self, noisy_dataset):
        with pytest.raises(ValidationError):
            normalize_views(noisy_dataset, "whiten")


class TestGenerateSynthetic:
    def test_noiseless_has_k_distinct_columns(self):
        spec = SyntheticSpec(n=60, k_true=3, p=2, dims=[8, 12], noise_sigma=0.0, seed=1)
        ds = generate_synthetic(spec)

        for view in ds.views:
            distinct = np.unique(np.round(view.T, 12), axis=0)
            assert distinct.shape[0] == 3
        assert np.bincount(ds.labels).tolist() == [20, 20, 20]

    def test_same_seed_same_data(self):
        spec = SyntheticSpec(n=50, k_true=2, p=2, dims=[4, 5], seed=7)
        a, b = generate_synthetic(spec), generate_synthetic(spec)
        for va, vb in zip(a.views, b.views):
            assert np.array_equal(va, vb)
        assert np.array_equal(a.labels, b.labels)

    def test_center_separation(self):
        spec = SyntheticSpec(n=4, k_true=4, p=1, dims=[6], separation=10.0, noise_sigma=0.0, seed=2)
        view = generate_synthetic(spec).views[0]
        for i in range(4):
            for j in range(i + 1, 4):
                assert np.isclose(np.linalg.norm(view[:, i] - view[:, j]), 10.0)

    @pytest.mark.parametrize("changes", [
        {"n": 1},
        {"k_true": 0},
        {"dims": [2, 8]},
        {"dims": [8]},
        {"noise_sigma": -1.0},
    ])
    def test_invalid_spec(self, changes):
        data = {"n": 20, "k_true": 3, "p": 2, "dims": [8, 12]}
        data.update(changes)
        spec = SyntheticSpec(**data)
        ok, message = validate_synthetic_spec(spec)
        assert not ok and message
        with pytest.raises(ValidationError):
            generate_synthetic(spec)

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ValidationError):
            SyntheticSpec.from_dict({"n": 10, "k_true": 2, "dims": [3], "colour": "red"})

    def test_from_dict_infers_view_count(self):
        spec = SyntheticSpec.from_dict({"n": 10, "k_true": 2, "dims": [3, 4, 5]})
        assert spec.p == 3


def test_dataset_summary(noisy_dataset):
    table = dataset_summary(noisy_dataset, "en")
    assert list(table.columns) == ["View", "Dim", "Samples", "Mean", "Std", "Min", "Max"]
    assert table["Dim"].tolist() == [8, 12]
    assert table["Samples"].tolist() == [90, 90]
