# -*- coding: utf-8 -*-
"""
数学・統計ユーティリティ
MVSC-HFD用の線形代数・統計計算関数
"""

import logging
import warnings
from functools import reduce
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from config.settings import OPTIMIZER_CONFIG
from modules.errors import DegeneracyWarning

logger = logging.getLogger(__name__)

def rectangular_identity(rows: int, cols: int) -> np.ndarray:
    """
    対角成分のみ1の長方行列（列正規直交、rows >= cols のとき）

    Args:
        rows: 行数
        cols: 列数

    Returns:
        rows × cols 行列
    """
    return np.eye(rows, cols)

def chain_product(matrices: Sequence[np.ndarray], size: Optional[int] = None) -> np.ndarray:
    """
    行列列の積 M_1 M_2 ... M_r を計算

    Args:
        matrices: 行列のリスト
        size: 空リストの場合に返す単位行列のサイズ

    Returns:
        積（空の場合は単位行列）
    """
    if len(matrices) == 0:
        if size is None:
            raise ValueError("size is required for an empty product")
        return np.eye(size)
    return reduce(np.matmul, matrices)

def procrustes(M: np.ndarray, context: str = "") -> Optional[np.ndarray]:
    """
    直交プロクラステス問題 max Tr(M Wᵀ) s.t. WᵀW = I の閉形式解

    薄いSVD M = U D Vᵀ から W = U Vᵀ を返す。
    M が零行列またはSVDが失敗した場合は None を返し、縮退警告を出す。

    Args:
        M: rows × cols 行列（rows >= cols）
        context: 警告メッセージ用のラベル

    Returns:
        列正規直交行列、または縮退時 None
    """
    if not np.all(np.isfinite(M)) or np.linalg.norm(M) <= OPTIMIZER_CONFIG["zero_matrix_tol"]:
        _warn_degenerate(f"zero or non-finite Procrustes operand {context}".strip())
        return None

    try:
        U, _, Vt = linalg.svd(M, full_matrices=False)
    except (linalg.LinAlgError, ValueError) as exc:
        _warn_degenerate(f"SVD failed {context}: {exc}".strip())
        return None

    return U @ Vt

def _warn_degenerate(message: str):
    logger.warning(message)
    warnings.warn(message, DegeneracyWarning, stacklevel=3)

def orthonormality_error(W: np.ndarray) -> float:
    """
    ‖WᵀW − I‖_∞（要素最大絶対値）

    Args:
        W: 行列

    Returns:
        直交性からのずれ
    """
    gram = W.T @ W
    return float(np.max(np.abs(gram - np.eye(gram.shape[0])))) if gram.size else 0.0

def principal_angles(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """
    2つの列空間の主角（ラジアン、降順）

    Args:
        A, B: 同じ行数の行列

    Returns:
        主角の配列
    """
    return linalg.subspace_angles(A, B)

def round_half_up_div(numerator: int, denominator: int) -> int:
    """非負整数の割り算を四捨五入（0.5は切り上げ）"""
    return (2 * numerator + denominator) // (2 * denominator)

def calculate_statistics(data: np.ndarray) -> Dict[str, float]:
    """
    基本統計量を計算

    Args:
        data: データ配列

    Returns:
        統計量の辞書
    """
    data_array = np.asarray(data, dtype=float).ravel()
    if data_array.size == 0:
        return {}

    return {
        "count": int(data_array.size),
        "mean": float(np.mean(data_array)),
        "std": float(np.std(data_array)),
        "min": float(np.min(data_array)),
        "max": float(np.max(data_array)),
        "median": float(np.median(data_array)),
    }

def summarize_timings(samples: List[float]) -> Dict[str, float]:
    """
    計測時間の要約（ベンチマーク用）

    Args:
        samples: 秒単位の計測値

    Returns:
        平均・最小・最大
    """
    if not samples:
        return {"mean": 0.0, "min": 0.0, "max": 0.0}
    arr = np.asarray(samples, dtype=float)
    return {"mean": float(arr.mean()), "min": float(arr.min()), "max": float(arr.max())}
