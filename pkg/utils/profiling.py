# -*- coding: utf-8 -*-
"""
計測ユーティリティ
ベンチマーク用の経過時間・メモリ計測
"""

import os
import threading
import time
import tracemalloc
from typing import Optional

import psutil

from config.settings import BENCHMARK_CONFIG

MB = 1024.0 * 1024.0


class RSSMonitor:
    """psutil による常駐メモリ（RSS）のピークをバックグラウンドで記録"""

    def __init__(self, interval_sec: float = BENCHMARK_CONFIG["rss_interval_sec"]):
        self.interval_sec = float(interval_sec)
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self.rss0: int = 0
        self.rss_peak: int = 0
        self.rss_end: int = 0

    def __enter__(self) -> "RSSMonitor":
        proc = psutil.Process(os.getpid())
        self.rss0 = int(proc.memory_info().rss)
        self.rss_peak = self.rss0

        def _run():
            while not self._stop.is_set():
                rss = int(proc.memory_info().rss)
                if rss > self.rss_peak:
                    self.rss_peak = rss
                time.sleep(self.interval_sec)

        self._thread = threading.Thread(target=_run, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=1.0)
        self.rss_end = int(psutil.Process(os.getpid()).memory_info().rss)
        self.rss_peak = max(self.rss_peak, self.rss_end)

    @property
    def peak_delta_mb(self) -> float:
        return (self.rss_peak - self.rss0) / MB


class TracedPeak:
    """tracemalloc で計測区間内の割り当てピーク（numpy 配列を含む）を記録"""

    def __init__(self):
        self.peak_bytes: int = 0
        self._was_tracing = False

    def __enter__(self) -> "TracedPeak":
        self._was_tracing = tracemalloc.is_tracing()
        if not self._was_tracing:
            tracemalloc.start()
        tracemalloc.reset_peak()
        self._baseline, _ = tracemalloc.get_traced_memory()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        _, peak = tracemalloc.get_traced_memory()
        self.peak_bytes = max(0, peak - self._baseline)
        if not self._was_tracing:
            tracemalloc.stop()

    @property
    def peak_mb(self) -> float:
        return self.peak_bytes / MB
