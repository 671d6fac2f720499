# -*- coding: utf-8 -*-
"""
評価指標モジュール
ACC（最適ラベル対応）・NMI・Purity
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from config.settings import METRICS_CONFIG
from modules.errors import ValidationError


@dataclass
class MetricReport:
    """評価結果（contingency は k_pred × k_true）"""
    acc: float
    nmi: float
    purity: float
    contingency: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "acc": self.acc,
            "nmi": self.nmi,
            "purity": self.purity,
            "contingency": self.contingency.tolist(),
        }


def _validate_labels(pred, truth) -> Tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape[0] != truth.shape[0]:
        raise ValidationError(f"label length mismatch: pred has {pred.shape[0]}, truth has {truth.shape[0]}")
    if pred.shape[0] == 0:
        raise ValidationError("labels are empty")
    return pred, truth

def contingency(pred, truth) -> np.ndarray:
    """
    分割表（行=予測クラスタ、列=正解クラス）

    Args:
        pred: 予測ラベル
        truth: 正解ラベル

    Returns:
        k_pred × k_true 整数行列
    """
    pred, truth = _validate_labels(pred, truth)
    return contingency_matrix(truth, pred).T.astype(np.int64)

def accuracy(pred, truth) -> float:
    """
    最適な単射ラベル対応での正解率（ハンガリアン法）

    Args:
        pred: 予測ラベル
        truth: 正解ラベル

    Returns:
        [0, 1] の実数
    """
    table = contingency(pred, truth)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / float(table.sum())

def nmi(pred, truth, average_method: str = METRICS_CONFIG["nmi_average_default"]) -> float:
    """
    正規化相互情報量（既定は幾何平均での正規化、自然対数）

    Args:
        pred: 予測ラベル
        truth: 正解ラベル
        average_method: "geometric" または "arithmetic"

    Returns:
        [0, 1] の実数
    """
    pred, truth = _validate_labels(pred, truth)
    if average_method not in METRICS_CONFIG["nmi_average_methods"]:
        raise ValidationError(f"unknown NMI average method '{average_method}'")
    value = normalized_mutual_info_score(truth, pred, average_method=average_method)
    return float(min(max(value, 0.0), 1.0))

def purity(pred, truth) -> float:
    """
    各予測クラスタで最多の正解クラスの割合

    Args:
        pred: 予測ラベル
        truth: 正解ラベル

    Returns:
        [0, 1] の実数
    """
    table = contingency(pred, truth)
    return float(table.max(axis=1).sum()) / float(table.sum())

def evaluate(pred, truth, average_method: str = METRICS_CONFIG["nmi_average_default"]) -> MetricReport:
    """
    3指標と分割表をまとめて計算

    Args:
        pred: 予測ラベル
        truth: 正解ラベル
        average_method: NMI の正規化方法

    Returns:
        MetricReport
    """
    return MetricReport(
        acc=accuracy(pred, truth),
        nmi=nmi(pred, truth, average_method),
        purity=purity(pred, truth),
        contingency=contingency(pred, truth),
    )
