# -*- coding: utf-8 -*-
"""
出力・エクスポートユーティリティ
MVSC-HFD用の行列CSV・結果JSON・表の入出力関数
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from config.settings import DATASET_CONFIG
from modules.errors import DataParseError

PathLike = Union[str, Path]

def read_matrix_csv(path: PathLike) -> np.ndarray:
    """
    ヘッダなしカンマ区切りの行列CSVを読み込み

    Args:
        path: ファイルパス

    Returns:
        2次元 float 配列

    Raises:
        DataParseError: 解析不能・非有限値を含む場合（ファイル・行・列を付与）
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, header=None, sep=DATASET_CONFIG["delimiter"], dtype=float)
    except pd.errors.EmptyDataError as exc:
        raise DataParseError(f"{path}: file is empty", path=path) from exc
    except (ValueError, pd.errors.ParserError) as exc:
        raise DataParseError(f"{path}: cannot parse matrix ({exc})", path=path) from exc

    matrix = df.to_numpy(dtype=float)
    bad = np.argwhere(~np.isfinite(matrix))
    if bad.size:
        row, column = (int(i) for i in bad[0])
        raise DataParseError(
            f"{path}: non-finite value {matrix[row, column]!r} at row {row}, column {column}",
            path=path, row=row, column=column,
        )
    return matrix

def write_matrix_csv(path: PathLike, matrix: np.ndarray):
    """
    行列をヘッダなしCSVで書き出し（17桁、往復誤差なし）

    Args:
        path: 出力パス
        matrix: 2次元配列
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    pd.DataFrame(matrix).to_csv(
        path, header=False, index=False,
        sep=DATASET_CONFIG["delimiter"], float_format=DATASET_CONFIG["float_format"],
    )

def read_label_csv(path: PathLike) -> np.ndarray:
    """
    1行1整数のラベルファイルを読み込み

    Args:
        path: ファイルパス

    Returns:
        整数ベクトル
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, header=None, dtype=float)
    except pd.errors.EmptyDataError as exc:
        raise DataParseError(f"{path}: label file is empty", path=path) from exc
    except (ValueError, pd.errors.ParserError) as exc:
        raise DataParseError(f"{path}: cannot parse labels ({exc})", path=path) from exc

    if df.shape[1] != 1:
        raise DataParseError(f"{path}: expected one label per line, got {df.shape[1]} columns", path=path)

    values = df.iloc[:, 0].to_numpy()
    bad = np.flatnonzero(~np.isfinite(values) | (values != np.round(values)))
    if bad.size:
        row = int(bad[0])
        raise DataParseError(f"{path}: label at row {row} is not an integer", path=path, row=row, column=0)
    return values.astype(np.int64)

def write_label_csv(path: PathLike, labels: np.ndarray):
    """ラベル（または割り当て）を1行1整数で書き出し"""
    pd.DataFrame(np.asarray(labels, dtype=np.int64).reshape(-1, 1)).to_csv(path, header=False, index=False)

def to_jsonable(obj: Any) -> Any:
    """numpy・Path などをJSON化可能な型に変換"""
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Path):
        return str(obj)
    return obj

def write_json(path: PathLike, payload: Dict[str, Any]):
    """
    JSONを決定的な順序で書き出し

    Args:
        path: 出力パス
        payload: 書き出す辞書
    """
    text = json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")

def read_json(path: PathLike) -> Dict[str, Any]:
    """JSONを読み込み"""
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataParseError(f"{path}: invalid JSON ({exc})", path=path, row=exc.lineno, column=exc.colno) from exc

def write_table(df: pd.DataFrame, path: Optional[PathLike] = None) -> str:
    """
    表をCSVで書き出し、文字列表現を返す

    Args:
        df: 出力するDataFrame
        path: 出力パス（Noneなら書き出さない）

    Returns:
        CSV文字列
    """
    csv_string = df.to_csv(index=False)
    if path is not None:
        Path(path).write_text(csv_string, encoding="utf-8")
    return csv_string
