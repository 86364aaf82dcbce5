"""Wall-clock forward-pass throughput (windows per second).

Single-threaded by contract: one window per forward call, timed with a
monotonic clock after a warmup phase.  Numbers are machine-dependent;
the harness only relies on coarse comparisons (fewer channels should
not be slower).
"""
from __future__ import annotations

import time

import numpy as np

from ..eegdata.dataset import Window
from ..errors import ConfigError, NumericError


def measure_fps(
    model, windows: list[Window], warmup: int = 50, reps: int = 1000
) -> float:
    if not windows:
        raise ConfigError("need at least one window to measure throughput")
    if warmup < 0 or reps < 1:
        raise ConfigError(
            f"need warmup >= 0 and reps >= 1, got {warmup}/{reps}"
        )
    inputs = [np.ascontiguousarray(w.data, dtype=np.float64) for w in windows]
    n = len(inputs)
    for i in range(warmup):
        model.forward(inputs[i % n])
    t0 = time.perf_counter()
    for i in range(reps):
        model.forward(inputs[i % n])
    elapsed = time.perf_counter() - t0
    if elapsed <= 0.0:
        raise NumericError(
            f"timer resolution too coarse for {reps} reps; increase reps"
        )
    return reps / elapsed
