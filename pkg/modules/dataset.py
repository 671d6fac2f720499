# -*- coding: utf-8 -*-
"""
データセットモジュール
マルチビューデータの読み込み・検証・正規化・合成データ生成

全ビューは特徴×サンプル（d_v × n）の向きで保持する。
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import io as sio
from sklearn.preprocessing import StandardScaler, normalize

from config.languages import get_column_names
from config.settings import DATASET_CONFIG
from modules.errors import (
    DataParseError, DatasetNotFoundError, StructuralError, ValidationError
)
from utils.export_utils import (
    read_json, read_label_csv, read_matrix_csv, write_json, write_label_csv, write_matrix_csv
)
from utils.math_utils import calculate_statistics

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class MultiViewDataset:
    """
    p個のビュー（各 d_v × n）と任意の正解ラベルを持つデータセット

    生成後は配列を書き込み不可にするため、スレッド間で共有できる。
    """
    views: List[np.ndarray]
    labels: Optional[np.ndarray] = None
    view_names: List[str] = field(default_factory=list)

    def __post_init__(self):
        views = [np.array(v, dtype=float, copy=True) for v in self.views]
        views = [v.reshape(1, -1) if v.ndim == 1 else v for v in views]
        names = list(self.view_names) or [f"view_{i}" for i in range(len(views))]
        labels = None if self.labels is None else np.asarray(self.labels).astype(np.int64).ravel()

        object.__setattr__(self, "views", views)
        object.__setattr__(self, "view_names", names)
        object.__setattr__(self, "labels", labels)

        ok, message = validate_dataset(self)
        if not ok:
            if "sample count" in message:
                raise StructuralError(message)
            raise ValidationError(message)

        for v in views:
            v.setflags(write=False)
        if labels is not None:
            labels.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.views[0].shape[1])

    @property
    def p(self) -> int:
        return len(self.views)

    @property
    def dims(self) -> List[int]:
        return [int(v.shape[0]) for v in self.views]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise ValidationError("dataset has no ground-truth labels")
        return self.labels


@dataclass(frozen=True)
class SyntheticSpec:
    """合成データの仕様"""
    n: int
    k_true: int
    p: int
    dims: List[int]
    separation: float = 10.0
    noise_sigma: float = 0.1
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SyntheticSpec":
        known = {"n", "k_true", "p", "dims", "separation", "noise_sigma", "seed"}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown synthetic spec keys: {sorted(unknown)}")
        try:
            return cls(
                n=int(data["n"]),
                k_true=int(data["k_true"]),
                p=int(data.get("p", len(data["dims"]))),
                dims=[int(d) for d in data["dims"]],
                separation=float(data.get("separation", 10.0)),
                noise_sigma=float(data.get("noise_sigma", 0.1)),
                seed=int(data.get("seed", 0)),
            )
        except KeyError as exc:
            raise ValidationError(f"synthetic spec is missing key {exc}") from exc

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n, "k_true": self.k_true, "p": self.p, "dims": list(self.dims),
            "separation": self.separation, "noise_sigma": self.noise_sigma, "seed": self.seed,
        }


def validate_dataset(ds: MultiViewDataset) -> Tuple[bool, str]:
    """
    データセットの不変条件を検証

    Args:
        ds: データセット

    Returns:
        (検証結果, エラーメッセージ)
    """
    if len(ds.views) < 1:
        return False, "dataset needs at least one view"
    if len(ds.view_names) != len(ds.views):
        return False, f"{len(ds.view_names)} view names for {len(ds.views)} views"

    first = ds.views[0]
    for name, view in zip(ds.view_names, ds.views):
        if view.ndim != 2:
            return False, f"view '{name}' is not a matrix (ndim={view.ndim})"
        if view.shape[0] < 1:
            return False, f"view '{name}' has no features"
        if view.shape[1] != first.shape[1]:
            return False, (
                f"sample count mismatch: view '{ds.view_names[0]}' has {first.shape[1]} samples, "
                f"view '{name}' has {view.shape[1]}"
            )
        if not np.all(np.isfinite(view)):
            return False, f"view '{name}' contains non-finite values"

    n = first.shape[1]
    if n < 2:
        return False, f"dataset needs at least 2 samples, got {n}"

    if ds.labels is not None:
        if ds.labels.shape[0] != n:
            return False, f"labels have length {ds.labels.shape[0]}, expected {n}"
        if np.any(ds.labels < 0):
            return False, "labels must be non-negative"

    return True, ""

def validate_synthetic_spec(spec: SyntheticSpec) -> Tuple[bool, str]:
    """
    合成データ仕様を検証

    Args:
        spec: 合成データの仕様

    Returns:
        (検証結果, エラーメッセージ)
    """
    if spec.n < 2:
        return False, f"n must be >= 2, got {spec.n}"
    if spec.k_true < 1:
        return False, f"k_true must be >= 1, got {spec.k_true}"
    if spec.p < 1:
        return False, f"p must be >= 1, got {spec.p}"
    if len(spec.dims) != spec.p:
        return False, f"dims has {len(spec.dims)} entries, expected p={spec.p}"
    if any(d < spec.k_true for d in spec.dims):
        return False, f"every view dimension must be >= k_true={spec.k_true}, got {list(spec.dims)}"
    if spec.separation < 0 or spec.noise_sigma < 0:
        return False, "separation and noise_sigma must be non-negative"
    if spec.noise_sigma > 0 and spec.separation <= 0:
        return False, "separation must be > 0 when noise_sigma > 0"
    return True, ""

def load_multiview(root_path: PathLike) -> MultiViewDataset:
    """
    ディレクトリ（または .mat ファイル）からマルチビューデータを読み込み

    ビューは view_<idx>.csv をファイル名の辞書順に並べる。
    meta.json があればファイル名の指定を上書きする。

    Args:
        root_path: データセットディレクトリ

    Returns:
        MultiViewDataset
    """
    root = Path(root_path)
    if root.is_file() and root.suffix.lower() == ".mat":
        return load_mat_dataset(root)
    if not root.is_dir():
        raise DatasetNotFoundError(f"dataset directory not found: {root}")

    manifest_path = root / DATASET_CONFIG["manifest_file"]
    manifest = read_json(manifest_path) if manifest_path.is_file() else {}

    if manifest.get("views"):
        view_files = [root / name for name in manifest["views"]]
        missing = [str(p) for p in view_files if not p.is_file()]
        if missing:
            raise DatasetNotFoundError(f"view files listed in manifest are missing: {missing}")
    else:
        view_files = sorted(root.glob(DATASET_CONFIG["view_file_glob"]), key=lambda p: p.name)

    if not view_files:
        raise DatasetNotFoundError(f"no view files in {root}")

    views = [read_matrix_csv(path) for path in view_files]
    names = manifest.get("view_names") or [path.stem for path in view_files]

    # 構造エラーはファイル名で報告する
    for path, view in zip(view_files, views):
        if view.shape[1] != views[0].shape[1]:
            raise StructuralError(
                f"sample count mismatch: view '{view_files[0].name}' has {views[0].shape[1]} samples, "
                f"view '{path.name}' has {view.shape[1]}"
            )

    labels = None
    labels_name = manifest.get("labels", DATASET_CONFIG["labels_file"])
    if labels_name:
        labels_path = root / labels_name
        if labels_path.is_file():
            labels = read_label_csv(labels_path)
        elif "labels" in manifest:
            raise DatasetNotFoundError(f"labels file listed in manifest is missing: {labels_path}")

    ds = MultiViewDataset(views=views, labels=labels, view_names=list(names))
    logger.info("loaded %s: p=%d n=%d dims=%s labels=%s", root, ds.p, ds.n, ds.dims, ds.has_labels)
    return ds

def write_multiview(ds: MultiViewDataset, root_path: PathLike):
    """
    データセットを load_multiview と同じ形式で書き出し

    Args:
        ds: データセット
        root_path: 出力ディレクトリ
    """
    root = Path(root_path)
    root.mkdir(parents=True, exist_ok=True)

    view_files = []
    for idx, view in enumerate(ds.views):
        name = DATASET_CONFIG["view_file_pattern"].format(idx=idx)
        write_matrix_csv(root / name, view)
        view_files.append(name)

    labels_name = None
    if ds.labels is not None:
        labels_name = DATASET_CONFIG["labels_file"]
        write_label_csv(root / labels_name, ds.labels)

    write_json(root / DATASET_CONFIG["manifest_file"], {
        "views": view_files,
        "labels": labels_name,
        "view_names": ds.view_names,
        "n": ds.n,
    })
    logger.info("wrote dataset to %s", root)

def load_mat_dataset(path: PathLike, samples_first: bool = True) -> MultiViewDataset:
    """
    MATLAB形式のマルチビューデータを読み込み

    ビューはセル配列 X、または X1..Xp / view1..viewp のキーで探す。

    Args:
        path: .mat ファイル
        samples_first: ビューが n × d_v で保存されている場合 True（転置する）

    Returns:
        MultiViewDataset
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetNotFoundError(f"dataset file not found: {path}")
    try:
        data = sio.loadmat(str(path))
    except (ValueError, NotImplementedError, OSError) as exc:
        raise DataParseError(f"{path}: cannot read MAT file ({exc})", path=path) from exc

    raw_views = []
    if "X" in data and data["X"].dtype == object:
        raw_views = [cell for cell in np.asarray(data["X"]).ravel()]
    else:
        for prefix in ("X", "view", "x"):
            idx = 1
            while f"{prefix}{idx}" in data:
                raw_views.append(data[f"{prefix}{idx}"])
                idx += 1
            if raw_views:
                break
    if not raw_views:
        raise DataParseError(f"{path}: no views found (expected cell array 'X' or keys X1..Xp)", path=path)

    views = []
    for raw in raw_views:
        matrix = raw.toarray() if hasattr(raw, "toarray") else np.asarray(raw, dtype=float)
        views.append(matrix.T if samples_first else matrix)

    labels = None
    for key in DATASET_CONFIG["mat_label_keys"]:
        if key in data:
            labels = np.asarray(data[key]).ravel().astype(np.int64)
            labels = labels - labels.min()
            break

    for idx, view in enumerate(views):
        bad = np.argwhere(~np.isfinite(view))
        if bad.size:
            row, column = (int(i) for i in bad[0])
            raise DataParseError(
                f"{path}: view {idx} has non-finite value at row {row}, column {column}",
                path=path, row=row, column=column,
            )

    return MultiViewDataset(views=views, labels=labels, view_names=[f"view_{i}" for i in range(len(views))])

def normalize_views(ds: MultiViewDataset, mode: str = "none") -> MultiViewDataset:
    """
    ビューごとの正規化

    Args:
        ds: データセット
        mode: "none" / "zscore"（特徴行ごとに平均0・標準偏差1）/ "unit_column"（サンプル列を単位ノルム）

    Returns:
        正規化後のデータセット（none の場合は入力そのもの）
    """
    mode = mode.replace("-", "_")
    if mode not in DATASET_CONFIG["normalization_modes"]:
        raise ValidationError(
            f"unknown normalization mode '{mode}', expected one of {DATASET_CONFIG['normalization_modes']}"
        )
    if mode == "none":
        return ds

    if mode == "zscore":
        # 分散0の行は中心化のみ（StandardScalerはスケール1を使う）
        views = [StandardScaler().fit_transform(view.T).T for view in ds.views]
    else:
        # 零列はそのまま
        views = [normalize(view, norm="l2", axis=0) for view in ds.views]

    return MultiViewDataset(views=views, labels=ds.labels, view_names=ds.view_names)

def generate_synthetic(spec: SyntheticSpec) -> MultiViewDataset:
    """
    合成マルチビューデータを生成

    潜在空間 R^{k_true} に互いに距離 separation の直交中心を置き、
    サンプルをラウンドロビンでクラスタに割り当てる。各ビューは
    列正規直交な d_v × k_true 行列で写像し、ガウス雑音を加える。

    Args:
        spec: 合成データの仕様

    Returns:
        正解ラベル付きの MultiViewDataset
    """
    ok, message = validate_synthetic_spec(spec)
    if not ok:
        raise ValidationError(message)

    rng = np.random.default_rng(spec.seed)
    k = spec.k_true

    rotation, _ = np.linalg.qr(rng.standard_normal((k, k)))
    # 直交中心 c_i = s/√2 · Q e_i なので ‖c_i − c_j‖ = s
    centers = (spec.separation / np.sqrt(2.0)) * rotation
    labels = np.arange(spec.n) % k

    views = []
    for dim in spec.dims:
        basis, _ = np.linalg.qr(rng.standard_normal((dim, k)))
        clean = (basis @ centers)[:, labels]
        noise = rng.standard_normal((dim, spec.n))
        views.append(clean + spec.noise_sigma * noise if spec.noise_sigma > 0 else clean)

    return MultiViewDataset(views=views, labels=labels, view_names=[f"view_{i}" for i in range(spec.p)])

def dataset_summary(ds: MultiViewDataset, language: str = "ja") -> pd.DataFrame:
    """
    ビューごとの要約表を作成

    Args:
        ds: データセット
        language: 言語設定

    Returns:
        要約のDataFrame
    """
    columns = get_column_names(language)
    rows = []
    for name, view in zip(ds.view_names, ds.views):
        stats = calculate_statistics(view)
        rows.append({
            columns["view"]: name,
            columns["dim"]: view.shape[0],
            columns["samples"]: view.shape[1],
            columns["mean"]: stats["mean"],
            columns["std"]: stats["std"],
            columns["min"]: stats["min"],
            columns["max"]: stats["max"],
        })
    return pd.DataFrame(rows)
