# -*- coding: utf-8 -*-
"""
多言語対応設定
MVSC-HFD CLI出力用の日本語・英語対応
"""

LANGUAGES = {
    "日本語": "ja",
    "English": "en"
}

TRANSLATIONS = {
    "ja": {
        # アプリケーション全般
        "app_title": "MVSC-HFD マルチビュー部分空間クラスタリング",

        # データ
        "dataset_written": "データセットを書き出しました",
        "views": "ビュー数",
        "samples": "サンプル数",
        "dims": "次元",

        # 学習
        "fit_finished": "学習が完了しました",
        "iterations": "反復回数",
        "converged": "収束",
        "not_converged": "未収束",
        "objective": "目的関数値",

        # 評価
        "metrics": "評価指標",
        "metrics_absent": "正解ラベルがないため評価指標は省略しました",
        "acc": "ACC",
        "nmi": "NMI",
        "purity": "Purity",

        # 出力
        "result_written": "結果を書き出しました",
        "table_written": "表を書き出しました",

        # ベンチマーク・感度
        "benchmark_title": "スケーリングベンチマーク",
        "sweep_title": "層数感度",

        # エラー
        "error_validation": "入力エラー",
        "error_runtime": "実行時エラー",
        "error_unexpected": "予期しないエラー",
    },
    "en": {
        # Application
        "app_title": "MVSC-HFD Multi-view Subspace Clustering",

        # Data
        "dataset_written": "Dataset written",
        "views": "Views",
        "samples": "Samples",
        "dims": "Dims",

        # Fit
        "fit_finished": "Fitting finished",
        "iterations": "Iterations",
        "converged": "Converged",
        "not_converged": "Not converged",
        "objective": "Objective",

        # Evaluation
        "metrics": "Metrics",
        "metrics_absent": "No ground-truth labels; metrics skipped",
        "acc": "ACC",
        "nmi": "NMI",
        "purity": "Purity",

        # Output
        "result_written": "Result written",
        "table_written": "Table written",

        # Benchmark / sensitivity
        "benchmark_title": "Scaling benchmark",
        "sweep_title": "Depth sensitivity",

        # Errors
        "error_validation": "Validation error",
        "error_runtime": "Runtime error",
        "error_unexpected": "Unexpected error",
    }
}

def get_text(key: str, lang: str = "ja") -> str:
    """
    翻訳テキストを取得

    Args:
        key: テキストキー
        lang: 言語コード ("ja" or "en")

    Returns:
        翻訳されたテキスト
    """
    return TRANSLATIONS.get(lang, TRANSLATIONS["ja"]).get(key, key)

def get_column_names(lang: str = "ja") -> dict:
    """
    表出力用のカラム名を取得

    Args:
        lang: 言語コード

    Returns:
        カラム名の辞書
    """
    if lang == "en":
        return {
            "view": "View",
            "dim": "Dim",
            "samples": "Samples",
            "mean": "Mean",
            "std": "Std",
            "min": "Min",
            "max": "Max",
        }
    else:
        return {
            "view": "ビュー",
            "dim": "次元",
            "samples": "サンプル数",
            "mean": "平均",
            "std": "標準偏差",
            "min": "最小値",
            "max": "最大値",
        }
