# -*- coding: utf-8 -*-
"""
最適化モジュール
目的関数 Σ_v α_v² ‖X^(v) − W_1^(v)…W_δ^(v) A Z‖_F² の4段階交互最小化

各段階は閉形式解を持つ:
    W: 直交プロクラステス（層ごとに順番に）
    A: 直交プロクラステス
    Z: 列ごとの確率単体への射影
    α: α_v ∝ 1 / f^(v)
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import OPTIMIZER_CONFIG
from modules.dataset import MultiViewDataset
from modules.errors import MVSCError, NumericalError, StateError, ValidationError
from modules.model import ModelState, fill_pending_projections, initialize
from utils.math_utils import chain_product, procrustes

logger = logging.getLogger(__name__)

STEP_NAMES = ("W", "A", "Z", "alpha")


@dataclass
class FitConfig:
    """学習設定"""
    max_iter: int = OPTIMIZER_CONFIG["max_iter"]
    rel_tol: float = OPTIMIZER_CONFIG["rel_tol"]
    record_trace: bool = True
    debug_substeps: bool = False
    threads: int = 1
    check_convergence: bool = True

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValidationError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.rel_tol > 0:
            raise ValidationError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.threads < 1:
            raise ValidationError(f"threads must be >= 1, got {self.threads}")


@dataclass
class FitReport:
    """学習の記録"""
    objective_trace: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    per_step_seconds: Dict[str, float] = field(default_factory=lambda: {name: 0.0 for name in STEP_NAMES})
    sweep_seconds: List[float] = field(default_factory=list)
    substep_trace: List[Tuple[int, str, float]] = field(default_factory=list)
    view_losses: List[float] = field(default_factory=list)
    total_seconds: float = 0.0

    def to_dict(self, include_timings: bool = True) -> Dict[str, Any]:
        data = {
            "objective_trace": list(self.objective_trace),
            "iterations": self.iterations,
            "converged": self.converged,
            "view_losses": list(self.view_losses),
            "substep_trace": [
                {"iter": t, "step": step, "objective": value} for t, step, value in self.substep_trace
            ],
        }
        if include_timings:
            data.update(self.timings())
        return data

    def timings(self) -> Dict[str, Any]:
        return {
            "per_step_seconds": dict(self.per_step_seconds),
            "sweep_seconds": list(self.sweep_seconds),
            "total_seconds": self.total_seconds,
        }


def _map_views(fn: Callable[[int], Any], p: int, threads: int) -> List[Any]:
    """ビューごとの計算を順序付きで実行（並列でも結果の順序は固定）"""
    if threads <= 1 or p <= 1:
        return [fn(v) for v in range(p)]
    with ThreadPoolExecutor(max_workers=min(threads, p)) as executor:
        return list(executor.map(fn, range(p)))

def _ordered_sum(terms: Sequence[np.ndarray]) -> np.ndarray:
    total = terms[0].copy()
    for term in terms[1:]:
        total += term
    return total

def _require_ready(state: ModelState, ds: MultiViewDataset):
    if state.is_pending:
        raise StateError("projection stacks are pending; run update_projections first")
    if len(state.W) != ds.p:
        raise StateError(f"state has {len(state.W)} projection stacks for {ds.p} views")

def view_losses(state: ModelState, ds: MultiViewDataset, threads: int = 1) -> np.ndarray:
    """
    ビューごとの再構成誤差 f^(v) = ‖X^(v) − P^(v) Z‖_F²

    Args:
        state: モデル状態（W 設定済み）
        ds: データセット
        threads: ビュー並列数

    Returns:
        長さ p のベクトル
    """
    _require_ready(state, ds)

    def loss(v: int) -> float:
        residual = ds.views[v] - state.reconstruction_basis(v) @ state.Z
        return float(np.sum(residual * residual))

    return np.asarray(_map_views(loss, ds.p, threads), dtype=float)

def objective(state: ModelState, ds: MultiViewDataset, threads: int = 1) -> float:
    """
    目的関数 Σ_v α_v² ‖X^(v) − W_1…W_δ A Z‖_F²

    Args:
        state: モデル状態（W 設定済み）
        ds: データセット
        threads: ビュー並列数

    Returns:
        非負の実数
    """
    losses = view_losses(state, ds, threads)
    return float(np.dot(state.alpha ** 2, losses))

def _layer_operand(stack: List[np.ndarray], A: np.ndarray, XZt: np.ndarray, layer: int) -> np.ndarray:
    """層 o の更新行列 M = Ωᵀ X Zᵀ Â_oᵀ（Ω = W_1…W_{o−1}、Â_o = W_{o+1}…W_δ A）"""
    # o = 1 では Ω = I なので d_v × d_v の単位行列は作らない
    left = XZt if layer == 1 else chain_product(stack[:layer - 1]).T @ XZt
    generalized_anchor = chain_product(stack[layer:] + [A])
    return left @ generalized_anchor.T

def anchor_operand(state: ModelState, ds: MultiViewDataset, threads: int = 1) -> np.ndarray:
    """
    アンカー更新行列 Φ = Σ_v α_v² (W_1…W_δ)ᵀ X^(v) Zᵀ（k × m）

    Args:
        state: モデル状態（W 設定済み）
        ds: データセット
        threads: ビュー並列数

    Returns:
        k × m 行列
    """
    _require_ready(state, ds)

    def contribution(v: int) -> np.ndarray:
        return state.alpha[v] ** 2 * (state.stack_product(v).T @ (ds.views[v] @ state.Z.T))

    return _ordered_sum(_map_views(contribution, ds.p, threads))

def update_projections(state: ModelState, ds: MultiViewDataset, threads: int = 1) -> ModelState:
    """
    各ビューの射影スタックを層 o = 1..δ の順に更新

    未設定の層は長方単位行列で埋めてから順に上書きする。

    Args:
        state: モデル状態
        ds: データセット
        threads: ビュー並列数

    Returns:
        更新後の状態（同じオブジェクト）
    """
    fill_pending_projections(state)
    if len(state.W) != ds.p:
        raise StateError(f"state has {len(state.W)} projection stacks for {ds.p} views")

    def update_view(v: int) -> List[np.ndarray]:
        stack = [w.copy() for w in state.W[v]]
        XZt = ds.views[v] @ state.Z.T
        for o in range(1, len(stack) + 1):
            M = _layer_operand(stack, state.A, XZt, o)
            updated = procrustes(M, context=f"(view {v}, layer {o})")
            if updated is not None:
                stack[o - 1] = updated
        return stack

    state.W = _map_views(update_view, ds.p, threads)
    return state

def update_anchors(state: ModelState, ds: MultiViewDataset, threads: int = 1) -> ModelState:
    """
    統一アンカー A を Φ の直交プロクラステス解に更新

    Args:
        state: モデル状態（W 設定済み）
        ds: データセット
        threads: ビュー並列数

    Returns:
        更新後の状態
    """
    phi = anchor_operand(state, ds, threads)
    updated = procrustes(phi, context="(anchors)")
    if updated is not None:
        state.A = updated
    return state

def project_to_simplex(y: np.ndarray) -> np.ndarray:
    """
    確率単体 {z ≥ 0, Σz = 1} へのユークリッド射影（ソートと閾値）

    2次元配列を渡すと列ごとに射影する。

    Args:
        y: 長さ m のベクトル、または m × n 行列

    Returns:
        射影結果（入力と同じ形）
    """
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValidationError("simplex projection input contains non-finite values")
    if y.ndim == 1:
        return project_to_simplex(y.reshape(-1, 1)).ravel()
    if y.ndim != 2 or y.shape[0] == 0:
        raise ValidationError(f"simplex projection expects a vector or matrix, got shape {y.shape}")

    m = y.shape[0]
    # 列ごとに最大値を引いても射影は変わらない（巨大な入力での桁落ち対策）
    y = y - y.max(axis=0, keepdims=True)
    u = -np.sort(-y, axis=0)
    css = np.cumsum(u, axis=0)
    ranks = np.arange(1, m + 1, dtype=float).reshape(-1, 1)
    # 条件を満たす添字は先頭からの連続区間
    rho = np.count_nonzero(u + (1.0 - css) / ranks > 0, axis=0)
    # 先頭は常に条件を満たす
    rho = np.maximum(rho, 1)
    cols = np.arange(y.shape[1])
    tau = (css[rho - 1, cols] - 1.0) / rho
    return np.maximum(y - tau, 0.0)

def update_graph(state: ModelState, ds: MultiViewDataset, threads: int = 1) -> ModelState:
    """
    二部グラフ Z を列ごとの単体射影で更新

    Q = c·I（c = 2Σα_v²）なので最小化解は project_to_simplex(−q/c)。

    Args:
        state: モデル状態（W・A 設定済み）
        ds: データセット
        threads: ビュー並列数

    Returns:
        更新後の状態
    """
    _require_ready(state, ds)
    weights = state.alpha ** 2
    c = float(weights.sum())
    if c <= 0:
        raise StateError("all view weights are zero; the graph subproblem is undefined")

    def contribution(v: int) -> np.ndarray:
        return weights[v] * (state.reconstruction_basis(v).T @ ds.views[v])

    target = _ordered_sum(_map_views(contribution, ds.p, threads)) / c
    state.Z = project_to_simplex(target)
    return state

def weights_from_losses(losses: np.ndarray) -> np.ndarray:
    """
    min Σ α_v² f_v s.t. α ≥ 0, Σα = 1 の閉形式解

    f_v = 0 のビューがあればそれらに均等配分する。

    Args:
        losses: ビューごとの損失 f

    Returns:
        重み α
    """
    losses = np.asarray(losses, dtype=float)
    zero = losses <= 0.0
    if np.any(zero):
        alpha = zero.astype(float)
        return alpha / alpha.sum()
    inverse = 1.0 / losses
    return inverse / inverse.sum()

def update_weights(state: ModelState, ds: MultiViewDataset, threads: int = 1) -> ModelState:
    """
    ビュー重み α を α_v ∝ 1/f^(v) に更新

    Args:
        state: モデル状態
        ds: データセット
        threads: ビュー並列数

    Returns:
        更新後の状態
    """
    state.alpha = weights_from_losses(view_losses(state, ds, threads))
    return state

def _relative_change_small(current: float, previous: float, rel_tol: float, floor: float = 0.0) -> bool:
    change = abs(current - previous)
    return change == 0.0 or change <= floor or change < rel_tol * abs(previous)

def _check_resume_parameters(state: ModelState, k: int, m: Optional[int], delta: int):
    # m=None は再開元の値をそのまま使う
    expected = {"k": k, "m": state.m if m is None else m, "delta": delta}
    actual = {"k": state.k, "m": state.m, "delta": state.delta}
    mismatched = [f"{key}={expected[key]} (state has {actual[key]})" for key in expected if expected[key] != actual[key]]
    if mismatched:
        raise ValidationError("init_state does not match the requested model: " + ", ".join(mismatched))

def fit(ds: MultiViewDataset, k: int, m: Optional[int] = None, delta: int = 2,
        cfg: Optional[FitConfig] = None, seed: int = 0,
        init_state: Optional[ModelState] = None) -> Tuple[ModelState, FitReport]:
    """
    交互最小化の本体

    初期化後 W → A → Z → α を繰り返し、1周ごとに目的関数を記録する。
    |obj(t) − obj(t−1)| < rel_tol·|obj(t−1)| または max_iter で停止。

    Args:
        ds: データセット
        k: 埋め込み次元（クラスタ数）
        m: アンカー数（既定 k）
        delta: 層数 δ
        cfg: 学習設定
        seed: 乱数シード
        init_state: 再開用の状態（指定時は initialize を省略、k・m・δ が一致すること）

    Returns:
        (最終状態, FitReport)
    """
    cfg = cfg or FitConfig()
    report = FitReport()
    if init_state is not None:
        _check_resume_parameters(init_state, k, m, delta)
        state = init_state.copy()
    else:
        state = initialize(ds, k, m, delta, seed)

    steps = (
        ("W", update_projections),
        ("A", update_anchors),
        ("Z", update_graph),
        ("alpha", update_weights),
    )

    # 目的関数が丸め誤差の水準まで下がった場合の判定用
    floor = OPTIMIZER_CONFIG["energy_floor"] * sum(float(np.sum(view * view)) for view in ds.views)

    previous = None
    started = time.perf_counter()
    try:
        for t in range(1, cfg.max_iter + 1):
            sweep_start = time.perf_counter()
            for name, step in steps:
                step_start = time.perf_counter()
                step(state, ds, cfg.threads)
                report.per_step_seconds[name] += time.perf_counter() - step_start

                if cfg.debug_substeps:
                    value = objective(state, ds, cfg.threads)
                    report.substep_trace.append((t, name, value))
                    logger.debug("iter=%d step=%s objective=%.17g", t, name, value)

            report.sweep_seconds.append(time.perf_counter() - sweep_start)
            current = objective(state, ds, cfg.threads)
            if not np.isfinite(current):
                raise NumericalError(f"objective became non-finite at iteration {t}")
            if cfg.record_trace:
                report.objective_trace.append(current)
            else:
                report.objective_trace = [current]
            report.iterations = t
            logger.info("iter=%d objective=%.10g", t, current)

            if cfg.check_convergence and previous is not None and _relative_change_small(current, previous, cfg.rel_tol, floor):
                report.converged = True
                break
            previous = current
    except (MVSCError, ArithmeticError, MemoryError) as exc:
        report.total_seconds = time.perf_counter() - started
        exc.partial_report = report
        raise

    report.total_seconds = time.perf_counter() - started
    report.view_losses = [float(f) for f in view_losses(state, ds, cfg.threads)]
    return state, report

def fit_sweeps(ds: MultiViewDataset, k: int, m: Optional[int] = None, delta: int = 2,
               n_sweeps: int = 5, threads: int = 1, seed: int = 0) -> Tuple[ModelState, FitReport]:
    """収束判定なしで固定回数だけ反復（ベンチマーク用）"""
    cfg = FitConfig(max_iter=n_sweeps, check_convergence=False, threads=threads)
    return fit(ds, k, m, delta, cfg, seed)
