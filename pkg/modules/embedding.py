# -*- coding: utf-8 -*-
"""
スペクトル埋め込みモジュール
二部グラフ Z の右特異ベクトルによる埋め込みと k-means による離散化
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Union

import numpy as np
from scipy import linalg
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from config.settings import EMBEDDING_CONFIG
from modules.errors import DegeneracyWarning, ValidationError

logger = logging.getLogger(__name__)


@dataclass
class SpectralEmbedding:
    """n × k の埋め込み座標と特異値（降順）"""
    coords: np.ndarray
    singular_values: np.ndarray
    dropped_anchors: List[int] = field(default_factory=list)
    degree_normalized: bool = True


@dataclass
class ClusterResult:
    """k-means の結果"""
    assignments: np.ndarray
    centers: np.ndarray
    inertia: float
    n_iter: int = 0


def _warn(message: str):
    logger.warning(message)
    warnings.warn(message, DegeneracyWarning, stacklevel=3)

def normalized_graph(Z: np.ndarray, degree_norm: bool = True):
    """
    Ẑ = D^{−1/2} Z（D はアンカー行の次数）

    次数0のアンカー行は取り除く。

    Args:
        Z: m × n 二部グラフ
        degree_norm: False なら Ẑ = Z

    Returns:
        (Ẑ, 取り除いた行番号のリスト)
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise ValidationError(f"graph must be a matrix, got shape {Z.shape}")
    if not np.all(np.isfinite(Z)) or np.any(Z < 0):
        raise ValidationError("graph must be finite and non-negative")

    degrees = Z.sum(axis=1)
    dropped = [int(i) for i in np.flatnonzero(degrees <= 0)]
    if dropped:
        _warn(f"dropping {len(dropped)} anchor(s) with zero degree: {dropped}")
        keep = degrees > 0
        Z = Z[keep]
        degrees = degrees[keep]

    if degree_norm:
        Z = Z / np.sqrt(degrees)[:, None]
    return Z, dropped

def _orthonormal_padding(V: np.ndarray, count: int) -> np.ndarray:
    """V の列に直交する count 本の正規直交ベクトル（標準基底から決定的に作る）"""
    n = V.shape[0]
    basis = V.copy()
    added = []
    for idx in range(n):
        if len(added) == count:
            break
        candidate = np.zeros(n)
        candidate[idx] = 1.0
        # 2回直交化して数値誤差を抑える
        for _ in range(2):
            if basis.shape[1]:
                candidate -= basis @ (basis.T @ candidate)
        norm = np.linalg.norm(candidate)
        if norm > 1e-8:
            candidate /= norm
            added.append(candidate)
            basis = np.column_stack([basis, candidate])
    return np.column_stack(added) if added else np.zeros((n, 0))

def spectral_embedding(Z: np.ndarray, k: int, degree_norm: bool = EMBEDDING_CONFIG["degree_norm"]) -> SpectralEmbedding:
    """
    Ẑ の上位 k 本の右特異ベクトルを埋め込みとして返す

    m × m のグラム行列 Ẑ Ẑᵀ を固有値分解し、右特異ベクトルを
    Ẑᵀ u / σ で復元する（n × n 行列は作らない、O(nm²)）。

    Args:
        Z: m × n 二部グラフ
        k: 埋め込み次元
        degree_norm: アンカー次数で正規化するか

    Returns:
        SpectralEmbedding
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k > np.asarray(Z).shape[0]:
        raise ValidationError(f"k={k} exceeds the anchor count m={np.asarray(Z).shape[0]}")

    Zh, dropped = normalized_graph(Z, degree_norm)
    n = Zh.shape[1]
    if k > n:
        raise ValidationError(f"k={k} exceeds the sample count n={n}")

    gram = Zh @ Zh.T
    eigvals, eigvecs = linalg.eigh(gram)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]
    sigmas = np.sqrt(eigvals)

    top = sigmas[0] if sigmas.size else 0.0
    rank = int(np.count_nonzero(sigmas > EMBEDDING_CONFIG["rank_rtol"] * top)) if top > 0 else 0
    used = min(k, rank)

    V = (Zh.T @ eigvecs[:, :used]) / sigmas[:used]
    if used:
        # 正規直交性を保証（張る空間は変えない）
        V, R = linalg.qr(V, mode="economic")
        V = V * np.sign(np.where(np.diag(R) == 0, 1.0, np.diag(R)))
    values = sigmas[:used]

    if used < k:
        _warn(f"graph rank {rank} is below k={k}; padding with {k - used} orthonormal complement vectors")
        V = np.column_stack([V, _orthonormal_padding(V, k - used)])
        values = np.concatenate([values, np.zeros(k - used)])

    # 各列の絶対値最大の成分を正にする
    pivots = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[pivots, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    V = V * signs

    return SpectralEmbedding(coords=V, singular_values=values, dropped_anchors=dropped,
                             degree_normalized=degree_norm)

def similarity_from_graph(Z: np.ndarray, degree_norm: bool = True) -> np.ndarray:
    """
    S = ẐᵀẐ（n × n）を作る。小規模の確認用で、パイプラインでは使わない。

    Args:
        Z: m × n 二部グラフ
        degree_norm: アンカー次数で正規化するか

    Returns:
        n × n 類似度行列
    """
    Zh, _ = normalized_graph(Z, degree_norm)
    return Zh.T @ Zh

def kmeans(emb: Union[SpectralEmbedding, np.ndarray], k: int, seed: int = 0,
           restarts: int = EMBEDDING_CONFIG["kmeans_restarts"]) -> ClusterResult:
    """
    k-means++ 初期化の Lloyd 法（restarts 回のうち慣性最小を採用）

    Args:
        emb: 埋め込み（または n × k 配列）
        k: クラスタ数
        seed: 乱数シード
        restarts: 初期化の試行回数

    Returns:
        ClusterResult
    """
    coords = emb.coords if isinstance(emb, SpectralEmbedding) else np.asarray(emb, dtype=float)
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if restarts < 1:
        raise ValidationError(f"restarts must be >= 1, got {restarts}")
    if coords.shape[0] < k:
        raise ValidationError(f"need at least k={k} points, got {coords.shape[0]}")

    model = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=restarts,
        max_iter=EMBEDDING_CONFIG["kmeans_max_iter"],
        tol=EMBEDDING_CONFIG["kmeans_tol"],
        random_state=seed,
        algorithm="lloyd",
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        model.fit(coords)
    for warning in caught:
        # 重複点で k 個の中心が作れない場合も失敗にはしない
        logger.warning("k-means: %s", warning.message)

    return ClusterResult(
        assignments=model.labels_.astype(np.int64),
        centers=model.cluster_centers_,
        inertia=float(model.inertia_),
        n_iter=int(model.n_iter_),
    )
