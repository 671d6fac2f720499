# -*- coding: utf-8 -*-
"""
例外・警告クラス
MVSC-HFD 全モジュール共通のエラー階層
"""


class MVSCError(Exception):
    """MVSC-HFD の基底例外"""


class ValidationError(MVSCError, ValueError):
    """入力・パラメータの検証エラー（終了コード2）"""


class StructuralError(ValidationError):
    """ビュー間のサンプル数不一致など構造的な不整合"""


class DataParseError(ValidationError):
    """ファイル解析エラー（非有限値など）"""

    def __init__(self, message, path=None, row=None, column=None):
        super().__init__(message)
        self.path = path
        self.row = row
        self.column = column


class DatasetNotFoundError(ValidationError, FileNotFoundError):
    """データセットが見つからない"""


class StateError(MVSCError, RuntimeError):
    """モデル状態が操作の前提を満たさない（終了コード3）"""


class NumericalError(MVSCError, RuntimeError):
    """数値計算の失敗（終了コード3）"""


class DegeneracyWarning(RuntimeWarning):
    """零行列・ランク落ちなどの縮退を検出した"""
