# -*- coding: utf-8 -*-
"""
アプリケーション設定
MVSC-HFD（アンカー型マルチビュー部分空間クラスタリング）用の設定値
"""

import logging
import os
import sys

# アプリケーション設定
APP_CONFIG = {
    "prog": "mvsc-hfd",
    "version": "1.0.0",
}

# データセット設定
DATASET_CONFIG = {
    "view_file_pattern": "view_{idx}.csv",
    "view_file_glob": "view_*.csv",
    "labels_file": "labels.csv",
    "manifest_file": "meta.json",
    "delimiter": ",",
    "float_format": "%.17g",  # 書き戻しで1e-12以内を保証
    "normalization_modes": ["none", "zscore", "unit_column"],
    "default_normalization": "zscore",
    "mat_label_keys": ["Y", "y", "gt", "truth", "labels"],
}

# モデル設定
MODEL_CONFIG = {
    "default_depth": 2,
    "orthonormal_tol": 1e-8,
    "simplex_tol": 1e-9,
    "alpha_tol": 1e-12,
}

# 最適化設定
OPTIMIZER_CONFIG = {
    "max_iter": 100,
    "rel_tol": 1e-3,
    "monotone_slack": 1e-9,
    "zero_matrix_tol": 1e-300,  # これ以下のノルムは縮退として扱う
    "energy_floor": 1e-12,  # Σ‖X‖² に対する変化量の下限（無雑音データ用）
}

# スペクトル埋め込み・k-means設定
EMBEDDING_CONFIG = {
    "degree_norm": True,
    "kmeans_restarts": 10,
    "kmeans_max_iter": 300,
    "kmeans_tol": 1e-6,
    "rank_rtol": 1e-7,  # σ_max に対する相対ランク閾値
}

# 評価設定
METRICS_CONFIG = {
    "nmi_average_methods": ["geometric", "arithmetic"],
    "nmi_average_default": "geometric",
}

# ベンチマーク設定
BENCHMARK_CONFIG = {
    "sizes": [5000, 10000],
    "sweeps": 5,
    "clusters": 10,
    "anchors": 10,
    "depth": 2,
    "dims": [50, 80],
    "separation": 10.0,
    "noise_sigma": 0.1,
    "rss_interval_sec": 0.02,
}

# 実行環境設定
RUNTIME_CONFIG = {
    "threads_env": "MVSC_HFD_THREADS",
    "lang_env": "MVSC_HFD_LANG",
    "log_level_env": "MVSC_HFD_LOG_LEVEL",
    "default_threads": 1,
    "default_language": "ja",
    "default_log_level": "WARNING",
    "log_format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
}

# 終了コード
EXIT_CODES = {
    "success": 0,
    "unexpected": 1,
    "validation": 2,
    "runtime": 3,
}


def setup_logging(level=None):
    """ロガーを初期化（標準エラー出力へ）"""
    if level is None:
        level = os.environ.get(RUNTIME_CONFIG["log_level_env"], RUNTIME_CONFIG["default_log_level"])
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.WARNING)

    root = logging.getLogger()
    # 二重登録を避ける
    for handler in list(root.handlers):
        if getattr(handler, "_mvsc_hfd", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(RUNTIME_CONFIG["log_format"]))
    handler._mvsc_hfd = True
    root.addHandler(handler)
    root.setLevel(level)


def get_thread_limit():
    """スレッド上限を取得（環境変数 → 既定値）"""
    raw = os.environ.get(RUNTIME_CONFIG["threads_env"])
    if raw is None or raw.strip() == "":
        return RUNTIME_CONFIG["default_threads"]
    try:
        value = int(raw)
    except ValueError:
        return RUNTIME_CONFIG["default_threads"]
    return max(1, value)


def get_current_language():
    """現在の言語設定を取得"""
    lang = os.environ.get(RUNTIME_CONFIG["lang_env"], RUNTIME_CONFIG["default_language"])
    return lang if lang in ("ja", "en") else RUNTIME_CONFIG["default_language"]
