# -*- coding: utf-8 -*-
"""共通フィクスチャ"""

import numpy as np
import pytest

from modules.dataset import SyntheticSpec, generate_synthetic


def random_orthonormal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """列正規直交な rows × cols 行列"""
    q, _ = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q


def random_orthonormal_batch(rng: np.random.Generator, count: int, rows: int, cols: int) -> np.ndarray:
    """列正規直交行列を count 個まとめて生成（count × rows × cols）"""
    q, _ = np.linalg.qr(rng.standard_normal((count, rows, cols)))
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def noisy_dataset():
    spec = SyntheticSpec(n=90, k_true=3, p=2, dims=[8, 12], separation=10.0, noise_sigma=0.3, seed=3)
    return generate_synthetic(spec)


@pytest.fixture
def noiseless_dataset():
    # 中心間距離 √2 のとき各サンプルは単体上の Z で正確に再構成できる
    spec = SyntheticSpec(n=60, k_true=3, p=2, dims=[8, 12], separation=np.sqrt(2.0), noise_sigma=0.0, seed=5)
    return generate_synthetic(spec)


@pytest.fixture
def recovery_spec():
    return SyntheticSpec(n=400, k_true=4, p=2, dims=[20, 35], separation=10.0, noise_sigma=0.1, seed=11)
