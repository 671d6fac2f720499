# -*- coding: utf-8 -*-
"""
実行モジュール
読み込み → 正規化 → 学習 → 埋め込み → クラスタリング → 評価 の一連処理と
ベンチマーク・層数感度・評価・合成データ書き出しのコマンド
"""

import json
import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config.settings import (
    BENCHMARK_CONFIG, DATASET_CONFIG, EMBEDDING_CONFIG, EXIT_CODES, METRICS_CONFIG,
    MODEL_CONFIG, OPTIMIZER_CONFIG
)
from modules.dataset import (
    MultiViewDataset, SyntheticSpec, generate_synthetic, load_multiview, normalize_views,
    write_multiview
)
from modules.embedding import kmeans, spectral_embedding
from modules.errors import MVSCError, ValidationError
from modules.metrics import MetricReport, evaluate
from modules.model import load_state, save_state
from modules.optimizer import FitConfig, fit, fit_sweeps
from utils.export_utils import (
    read_json, read_label_csv, write_json, write_label_csv, write_matrix_csv
)
from utils.math_utils import summarize_timings
from utils.profiling import RSSMonitor, TracedPeak

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass
class RunConfig:
    """1回の実行の設定"""
    data_dir: Optional[Path] = None
    synthetic: Optional[SyntheticSpec] = None
    clusters: Optional[int] = None
    anchors: Optional[int] = None
    depth: int = MODEL_CONFIG["default_depth"]
    normalization: str = DATASET_CONFIG["default_normalization"]
    max_iter: int = OPTIMIZER_CONFIG["max_iter"]
    rel_tol: float = OPTIMIZER_CONFIG["rel_tol"]
    seed: int = 0
    restarts: int = EMBEDDING_CONFIG["kmeans_restarts"]
    threads: int = 1
    degree_norm: bool = EMBEDDING_CONFIG["degree_norm"]
    nmi_average: str = METRICS_CONFIG["nmi_average_default"]
    debug_trace: bool = False
    init_state: Optional[Path] = None
    out: Optional[Path] = None

    def parameters(self) -> Dict[str, Any]:
        """結果ファイルに残す決定的なパラメータ（出力先とスレッド数は除く）"""
        return {
            "data_dir": None if self.data_dir is None else str(self.data_dir),
            "synthetic": None if self.synthetic is None else self.synthetic.to_dict(),
            "clusters": self.clusters,
            "anchors": self.anchors,
            "depth": self.depth,
            "normalization": self.normalization,
            "max_iter": self.max_iter,
            "rel_tol": self.rel_tol,
            "seed": self.seed,
            "restarts": self.restarts,
            "degree_norm": self.degree_norm,
            "nmi_average": self.nmi_average,
            "init_state": None if self.init_state is None else str(self.init_state),
        }


def parse_synthetic_spec(value: str) -> SyntheticSpec:
    """
    --synthetic の値（JSONファイルのパス、またはJSON文字列）を解析

    Args:
        value: パスまたはJSON

    Returns:
        SyntheticSpec
    """
    text = value.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid inline synthetic spec: {exc}") from exc
    else:
        path = Path(text)
        if not path.is_file():
            raise ValidationError(f"synthetic spec file not found: {path}")
        data = read_json(path)
    return SyntheticSpec.from_dict(data)

def load_data(cfg: RunConfig) -> MultiViewDataset:
    """設定に従ってデータを読み込み（または生成）"""
    if cfg.synthetic is not None:
        return generate_synthetic(cfg.synthetic)
    if cfg.data_dir is not None:
        return load_multiview(cfg.data_dir)
    raise ValidationError("either --data or --synthetic is required")

def resolve_clusters(cfg: RunConfig, ds: MultiViewDataset) -> int:
    """クラスタ数（未指定なら正解ラベルの種類数）"""
    if cfg.clusters is not None:
        return cfg.clusters
    if ds.has_labels:
        return int(np.unique(ds.labels).size)
    raise ValidationError("--clusters is required when the dataset has no labels")

def run_pipeline(ds: MultiViewDataset, cfg: RunConfig) -> Dict[str, Any]:
    """
    正規化済みデータに対して学習・埋め込み・k-means・評価を実行

    Args:
        ds: 正規化済みデータセット
        cfg: 実行設定

    Returns:
        state / report / embedding / clusters / metrics / timings を含む辞書
    """
    k = resolve_clusters(cfg, ds)
    m = cfg.anchors if cfg.anchors is not None else (None if cfg.init_state is not None else k)
    fit_cfg = FitConfig(
        max_iter=cfg.max_iter,
        rel_tol=cfg.rel_tol,
        debug_substeps=cfg.debug_trace,
        threads=cfg.threads,
    )

    # 再開時は保存済みの状態から続ける
    init_state = load_state(cfg.init_state) if cfg.init_state is not None else None
    state, report = fit(ds, k, m, cfg.depth, fit_cfg, cfg.seed, init_state=init_state)
    m = state.m

    # m < k では埋め込みは m 次元まで
    embed_dim = min(k, m)
    if embed_dim < k:
        logger.info("embedding dimension capped at m=%d for k=%d clusters", m, k)

    started = time.perf_counter()
    embedding = spectral_embedding(state.Z, embed_dim, degree_norm=cfg.degree_norm)
    embed_seconds = time.perf_counter() - started

    started = time.perf_counter()
    clusters = kmeans(embedding, k, seed=cfg.seed, restarts=cfg.restarts)
    kmeans_seconds = time.perf_counter() - started

    metrics = evaluate(clusters.assignments, ds.labels, cfg.nmi_average) if ds.has_labels else None

    return {
        "k": k,
        "m": m,
        "state": state,
        "report": report,
        "embedding": embedding,
        "clusters": clusters,
        "metrics": metrics,
        "timings": {
            "fit": report.timings(),
            "embedding_seconds": embed_seconds,
            "kmeans_seconds": kmeans_seconds,
        },
    }

def build_result_payload(cfg: RunConfig, ds: MultiViewDataset, outcome: Dict[str, Any]) -> Dict[str, Any]:
    """結果JSONの内容（時間に依存する値は timings と runtime に分離）"""
    state = outcome["state"]
    metrics: Optional[MetricReport] = outcome["metrics"]
    return {
        "parameters": cfg.parameters(),
        "dataset": {"p": ds.p, "n": ds.n, "dims": ds.dims, "view_names": ds.view_names,
                    "has_labels": ds.has_labels},
        "model": {"k": outcome["k"], "m": outcome["m"], "delta": state.delta,
                  "schedule": state.schedule.per_view, "alpha": state.alpha},
        "fit": outcome["report"].to_dict(include_timings=False),
        "embedding": {"singular_values": outcome["embedding"].singular_values,
                      "dropped_anchors": outcome["embedding"].dropped_anchors},
        "clustering": {"inertia": outcome["clusters"].inertia},
        "metrics": None if metrics is None else metrics.to_dict(),
        "assignments": outcome["clusters"].assignments,
        "timings": outcome["timings"],
        "runtime": {"threads": cfg.threads},
    }

def artifact_paths(out: Path) -> Dict[str, Path]:
    """結果JSONに付随するCSVのパス"""
    stem = out.with_suffix("")
    return {
        "result": out,
        "assignments": stem.parent / f"{stem.name}.assignments.csv",
        "embedding": stem.parent / f"{stem.name}.embedding.csv",
        "state": stem.parent / f"{stem.name}.state",
    }

def cmd_fit(cfg: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """
    fit コマンド

    Args:
        cfg: 実行設定

    Returns:
        (終了コード, 結果の辞書)
    """
    ds = normalize_views(load_data(cfg), cfg.normalization)
    outcome = run_pipeline(ds, cfg)
    payload = build_result_payload(cfg, ds, outcome)

    if cfg.out is not None:
        paths = artifact_paths(Path(cfg.out))
        paths["result"].parent.mkdir(parents=True, exist_ok=True)
        write_json(paths["result"], payload)
        write_label_csv(paths["assignments"], outcome["clusters"].assignments)
        write_matrix_csv(paths["embedding"], outcome["embedding"].coords)
        save_state(outcome["state"], paths["state"])
        logger.info("wrote %s", paths["result"])

    return EXIT_CODES["success"], payload

def cmd_eval(assignments_path: PathLike, labels_path: PathLike,
             average_method: str = METRICS_CONFIG["nmi_average_default"]) -> MetricReport:
    """
    保存済みの割り当てと正解ラベルから評価指標を再計算

    Args:
        assignments_path: 割り当てCSV、または fit の結果JSON
        labels_path: ラベルCSV、またはデータセットディレクトリ

    Returns:
        MetricReport
    """
    assignments_path = Path(assignments_path)
    if assignments_path.suffix.lower() == ".json":
        payload = read_json(assignments_path)
        if "assignments" not in payload:
            raise ValidationError(f"{assignments_path}: result file has no assignments")
        pred = np.asarray(payload["assignments"], dtype=np.int64)
    else:
        pred = read_label_csv(assignments_path)

    labels_path = Path(labels_path)
    if labels_path.is_dir():
        truth = load_multiview(labels_path).require_labels()
    else:
        truth = read_label_csv(labels_path)

    return evaluate(pred, truth, average_method)

def cmd_gen(spec: SyntheticSpec, out_dir: PathLike) -> MultiViewDataset:
    """合成データを生成して書き出し"""
    ds = generate_synthetic(spec)
    write_multiview(ds, out_dir)
    return ds

def cmd_benchmark(sizes: Sequence[int], base: Optional[SyntheticSpec] = None,
                  sweeps: int = BENCHMARK_CONFIG["sweeps"], clusters: int = BENCHMARK_CONFIG["clusters"],
                  anchors: int = BENCHMARK_CONFIG["anchors"], depth: int = BENCHMARK_CONFIG["depth"],
                  threads: int = 1, measure_memory: bool = True) -> pd.DataFrame:
    """
    サンプル数ごとに固定回数の反復時間とメモリを計測

    Args:
        sizes: サンプル数のリスト（昇順）
        base: 合成データの基本仕様（n は sizes で上書き）
        sweeps: 1サイズあたりの反復回数
        clusters, anchors, depth: k, m, δ
        threads: ビュー並列数
        measure_memory: メモリ計測を行うか

    Returns:
        n ごとの計測表
    """
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise ValidationError("benchmark needs at least one size")
    if any(b < a for a, b in zip(sizes, sizes[1:])):
        raise ValidationError(f"benchmark sizes must be ascending, got {sizes}")
    if sweeps < 1:
        raise ValidationError(f"sweeps must be >= 1, got {sweeps}")

    if base is None:
        dims = list(BENCHMARK_CONFIG["dims"])
        base = SyntheticSpec(n=sizes[0], k_true=clusters, p=len(dims), dims=dims,
                             separation=BENCHMARK_CONFIG["separation"],
                             noise_sigma=BENCHMARK_CONFIG["noise_sigma"], seed=0)

    rows = []
    for n in sizes:
        row: Dict[str, Any] = {"n": n, "sweeps": sweeps, "sweep_seconds": np.nan, "sweep_seconds_min": np.nan,
                               "peak_traced_mb": np.nan, "rss_peak_mb": np.nan, "final_objective": np.nan,
                               "status": "ok", "error": ""}
        try:
            ds = generate_synthetic(replace(base, n=n))
            _, report = fit_sweeps(ds, clusters, anchors, depth, n_sweeps=sweeps, threads=threads, seed=base.seed)
            timing = summarize_timings(report.sweep_seconds)
            row["sweep_seconds"] = timing["mean"]
            row["sweep_seconds_min"] = timing["min"]
            row["final_objective"] = report.objective_trace[-1]

            if measure_memory:
                # メモリは計時とは別の1周で計測
                with RSSMonitor() as rss, TracedPeak() as traced:
                    fit_sweeps(ds, clusters, anchors, depth, n_sweeps=1, threads=threads, seed=base.seed)
                row["peak_traced_mb"] = traced.peak_mb
                row["rss_peak_mb"] = rss.peak_delta_mb
            del ds
        except MemoryError as exc:
            row["status"] = "oom"
            row["error"] = str(exc) or "out of memory"
            logger.error("benchmark n=%d: out of memory", n)
        except MVSCError as exc:
            row["status"] = "error"
            row["error"] = str(exc)
            logger.error("benchmark n=%d: %s", n, exc)
        rows.append(row)
        logger.info("benchmark n=%d sweep_seconds=%s status=%s", n, row["sweep_seconds"], row["status"])

    return pd.DataFrame(rows)

def cmd_sweep_depth(cfg: RunConfig, depths: Sequence[int], ds: Optional[MultiViewDataset] = None) -> pd.DataFrame:
    """
    層数 δ ごとに同じデータ・同じシードで学習し評価指標を並べる

    Args:
        cfg: 実行設定（depth 以外）
        depths: 層数のリスト
        ds: 共有するデータセット（省略時は cfg から読み込み）

    Returns:
        δ ごとの ACC / NMI / Purity 表
    """
    if ds is None:
        ds = normalize_views(load_data(cfg), cfg.normalization)

    rows = []
    for depth in depths:
        row: Dict[str, Any] = {"depth": depth, "acc": np.nan, "nmi": np.nan, "purity": np.nan,
                               "iterations": 0, "converged": False, "status": "ok", "error": ""}
        try:
            outcome = run_pipeline(ds, replace(cfg, depth=int(depth)))
            report = outcome["report"]
            row["iterations"] = report.iterations
            row["converged"] = report.converged
            if outcome["metrics"] is not None:
                row["acc"] = outcome["metrics"].acc
                row["nmi"] = outcome["metrics"].nmi
                row["purity"] = outcome["metrics"].purity
        except MVSCError as exc:
            row["status"] = "error"
            row["error"] = str(exc)
            logger.error("depth %s: %s", depth, exc)
        rows.append(row)

    return pd.DataFrame(rows)
