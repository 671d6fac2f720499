# -*- coding: utf-8 -*-
"""
モデルモジュール
決定変数（射影スタック W、統一アンカー A、二部グラフ Z、ビュー重み α）と
層幅スケジュール・初期化・保存
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from config.settings import MODEL_CONFIG
from modules.dataset import MultiViewDataset
from modules.errors import DatasetNotFoundError, StateError, ValidationError
from utils.export_utils import read_json, read_matrix_csv, write_json, write_matrix_csv
from utils.math_utils import chain_product, orthonormality_error, rectangular_identity, round_half_up_div

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass
class DimensionSchedule:
    """ビューごとの層幅 [l_0, ..., l_δ]（l_0 = d_v, l_δ = k）"""
    per_view: List[List[int]]

    @property
    def delta(self) -> int:
        return len(self.per_view[0]) - 1 if self.per_view else 0

    def layer_shapes(self, view: int) -> List[Tuple[int, int]]:
        widths = self.per_view[view]
        return [(widths[i - 1], widths[i]) for i in range(1, len(widths))]


@dataclass
class ModelState:
    """
    式の決定変数一式

    W は None の間「未設定」（初回の射影更新で埋める）。
    """
    A: np.ndarray
    Z: np.ndarray
    alpha: np.ndarray
    k: int
    m: int
    delta: int
    schedule: DimensionSchedule
    W: Optional[List[List[np.ndarray]]] = None
    seed: int = 0

    @property
    def is_pending(self) -> bool:
        return self.W is None

    def stack_product(self, view: int) -> np.ndarray:
        """W_1 ... W_δ（d_v × k）"""
        if self.W is None:
            raise StateError("projection stacks are pending; run update_projections first")
        return chain_product(self.W[view])

    def reconstruction_basis(self, view: int) -> np.ndarray:
        """P^(v) = W_1 ... W_δ A（d_v × m、列正規直交）"""
        return self.stack_product(view) @ self.A

    def copy(self) -> "ModelState":
        return ModelState(
            A=self.A.copy(),
            Z=self.Z.copy(),
            alpha=self.alpha.copy(),
            k=self.k,
            m=self.m,
            delta=self.delta,
            schedule=DimensionSchedule([list(w) for w in self.schedule.per_view]),
            W=None if self.W is None else [[w.copy() for w in stack] for stack in self.W],
            seed=self.seed,
        )


def build_schedule(d_v: int, k: int, delta: int) -> List[int]:
    """
    等分割の層幅スケジュールを作成

    l_i = d_v − round(i·(d_v − k)/δ)（0.5は切り上げ）

    Args:
        d_v: ビューの元次元
        k: 終端の埋め込み次元
        delta: 層数 δ

    Returns:
        [l_0, ..., l_δ]
    """
    if k < 1:
        raise ValidationError(f"embedding dimension k must be >= 1, got {k}")
    if delta < 1:
        raise ValidationError(f"depth must be >= 1, got {delta}")
    if d_v < k:
        raise ValidationError(
            f"view dimension {d_v} is smaller than k={k}; hierarchical descent cannot widen a view, "
            f"so views thinner than k are rejected"
        )
    span = d_v - k
    return [d_v - round_half_up_div(i * span, delta) for i in range(delta + 1)]

def validate_schedule(widths: List[int], k: int) -> Tuple[bool, str]:
    """
    層幅スケジュールの不変条件を検証

    Args:
        widths: [l_0, ..., l_δ]
        k: 終端次元

    Returns:
        (検証結果, エラーメッセージ)
    """
    if len(widths) < 2:
        return False, "schedule needs at least one layer"
    if widths[-1] != k:
        return False, f"schedule must end at k={k}, got {widths[-1]}"
    for i in range(1, len(widths)):
        if widths[i] > widths[i - 1]:
            return False, f"schedule widens at layer {i}: {widths[i - 1]} -> {widths[i]}"
    return True, ""

def validate_parameters(ds: MultiViewDataset, k: int, m: int, delta: int) -> Tuple[bool, str]:
    """
    k, m, δ の妥当性を検証

    Args:
        ds: データセット
        k: 埋め込み次元（クラスタ数）
        m: アンカー数
        delta: 層数

    Returns:
        (検証結果, エラーメッセージ)
    """
    if k < 1 or m < 1:
        return False, f"k and m must be >= 1, got k={k}, m={m}"
    if delta < 1:
        return False, f"depth must be >= 1, got {delta}"
    if m > k:
        return False, f"m={m} exceeds k={k}; the anchor matrix A (k × m) cannot have orthonormal columns"
    if k > min(ds.dims):
        return False, f"k={k} exceeds the thinnest view dimension {min(ds.dims)}"
    if m > ds.n:
        return False, f"m={m} exceeds the sample count n={ds.n}"
    return True, ""

def initialize(ds: MultiViewDataset, k: int, m: Optional[int] = None, delta: int = MODEL_CONFIG["default_depth"],
               seed: int = 0) -> ModelState:
    """
    初期状態を作成

    Z = [I_m | 0]、A = 長方単位行列、α = 1/p。W は未設定のまま。

    Args:
        ds: データセット
        k: 埋め込み次元（クラスタ数）
        m: アンカー数（既定 k）
        delta: 層数 δ
        seed: 乱数シード（W には使わない、k-means 用に保持）

    Returns:
        ModelState
    """
    m = k if m is None else m
    ok, message = validate_parameters(ds, k, m, delta)
    if not ok:
        raise ValidationError(message)

    schedule = DimensionSchedule([build_schedule(d, k, delta) for d in ds.dims])

    Z = np.zeros((m, ds.n))
    Z[:m, :m] = np.eye(m)

    state = ModelState(
        A=rectangular_identity(k, m),
        Z=Z,
        alpha=np.full(ds.p, 1.0 / ds.p),
        k=k,
        m=m,
        delta=delta,
        schedule=schedule,
        W=None,
        seed=seed,
    )
    logger.debug("initialized state k=%d m=%d delta=%d schedule=%s", k, m, delta, schedule.per_view)
    return state

def fill_pending_projections(state: ModelState):
    """未設定の W を長方単位行列で埋める（初回の層ループ用）"""
    if state.W is not None:
        return
    state.W = [
        [rectangular_identity(rows, cols) for rows, cols in state.schedule.layer_shapes(v)]
        for v in range(len(state.schedule.per_view))
    ]

def validate_state(state: ModelState, check_simplex: bool = True) -> Tuple[bool, str]:
    """
    ModelState の不変条件を検証

    Args:
        state: モデル状態
        check_simplex: Z の列和=1 も確認するか（初期状態では False）

    Returns:
        (検証結果, エラーメッセージ)
    """
    tol = MODEL_CONFIG["orthonormal_tol"]

    if state.A.shape != (state.k, state.m):
        return False, f"A has shape {state.A.shape}, expected {(state.k, state.m)}"
    if orthonormality_error(state.A) > tol:
        return False, "A does not have orthonormal columns"

    if state.W is not None:
        for v, stack in enumerate(state.W):
            shapes = state.schedule.layer_shapes(v)
            if len(stack) != len(shapes):
                return False, f"view {v} has {len(stack)} layers, expected {len(shapes)}"
            for i, (layer, shape) in enumerate(zip(stack, shapes), start=1):
                if layer.shape != shape:
                    return False, f"W[{v}][{i}] has shape {layer.shape}, expected {shape}"
                if orthonormality_error(layer) > tol:
                    return False, f"W[{v}][{i}] does not have orthonormal columns"

    if state.Z.shape[0] != state.m:
        return False, f"Z has {state.Z.shape[0]} rows, expected m={state.m}"
    if np.any(state.Z < 0):
        return False, "Z has negative entries"
    if check_simplex:
        sums = state.Z.sum(axis=0)
        if np.max(np.abs(sums - 1.0)) > MODEL_CONFIG["simplex_tol"]:
            return False, "Z columns do not sum to 1"

    if np.any(state.alpha < 0):
        return False, "alpha has negative entries"
    if abs(float(state.alpha.sum()) - 1.0) > MODEL_CONFIG["alpha_tol"]:
        return False, f"alpha sums to {state.alpha.sum()!r}, expected 1"

    return True, ""

def save_state(state: ModelState, root_path: PathLike):
    """
    ModelState をCSV行列群と state.json に保存

    Args:
        state: モデル状態
        root_path: 出力ディレクトリ
    """
    root = Path(root_path)
    root.mkdir(parents=True, exist_ok=True)

    write_matrix_csv(root / "A.csv", state.A)
    write_matrix_csv(root / "Z.csv", state.Z)
    if state.W is not None:
        for v, stack in enumerate(state.W):
            for i, layer in enumerate(stack, start=1):
                write_matrix_csv(root / f"W_{v}_{i}.csv", layer)

    write_json(root / "state.json", {
        "k": state.k,
        "m": state.m,
        "delta": state.delta,
        "schedule": state.schedule.per_view,
        "alpha": [float(a) for a in state.alpha],
        "pending": state.is_pending,
        "seed": state.seed,
    })

def load_state(root_path: PathLike) -> ModelState:
    """
    save_state で保存した状態を読み込み

    Args:
        root_path: 保存ディレクトリ

    Returns:
        ModelState
    """
    root = Path(root_path)
    if not (root / "state.json").is_file():
        raise DatasetNotFoundError(f"no saved state in {root}")
    meta = read_json(root / "state.json")
    schedule = DimensionSchedule([list(map(int, w)) for w in meta["schedule"]])

    W = None
    if not meta.get("pending", False):
        W = [
            [read_matrix_csv(root / f"W_{v}_{i}.csv") for i in range(1, len(widths))]
            for v, widths in enumerate(schedule.per_view)
        ]

    state = ModelState(
        A=read_matrix_csv(root / "A.csv"),
        Z=read_matrix_csv(root / "Z.csv"),
        alpha=np.asarray(meta["alpha"], dtype=float),
        k=int(meta["k"]),
        m=int(meta["m"]),
        delta=int(meta["delta"]),
        schedule=schedule,
        W=W,
        seed=int(meta.get("seed", 0)),
    )
    ok, message = validate_state(state, check_simplex=not state.is_pending)
    if not ok:
        raise StateError(f"{root}: {message}")
    return state
