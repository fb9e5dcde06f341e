"""Throughput benchmark: FAD vs FIR vs FIR without pointer increment over buffer sizes."""

from __future__ import annotations

import time
from typing import NamedTuple

import numpy as np

from fadline import kernels

REPETITIONS = 14
DEFAULT_TICKS = 10_000_000
NOISE_TABLE = 1 << 16
KERNELS = ("fad", "fir", "fir_no_increment")


class BenchResult(NamedTuple):
    buffer_size: int
    fad_ns: float
    fir_ns: float
    fir_no_increment_ns: float
    repetitions: int = REPETITIONS
    statistic: str = "min"

    @property
    def caching_cost_pct(self) -> float:
        """Share of the FIR time attributable to moving through memory."""
        return 100.0 * (self.fir_ns - self.fir_no_increment_ns) / self.fir_ns


def default_sizes() -> list[int]:
    return [1 << p for p in range(10, 23)]


def _runner(name, size, noise, increment, fast):
    delay = size / increment + 0.25
    if name == "fad":
        return lambda buf, n: kernels.bench_fad(buf, noise, n, increment, fast)
    if name == "fir":
        return lambda buf, n: kernels.bench_fir(buf, noise, n, delay, fast)
    return lambda buf, n: kernels.bench_fir_no_increment(buf, noise, n, delay, fast)


def time_kernel(name: str, size: int, n_ticks: int, noise: np.ndarray, *,
                repetitions: int = REPETITIONS, increment: float = 1.5, fast: bool = False) -> float:
    """Fastest of `repetitions` runs, in ns per tick. One untimed warm-up run first."""
    run = _runner(name, size, noise, increment, fast)
    buf = np.zeros(size)
    run(buf, min(n_ticks, 2 * size + 1000))
    best = float("inf")
    for _ in range(repetitions):
        buf[:] = 0.0
        t0 = time.perf_counter()
        run(buf, n_ticks)
        best = min(best, time.perf_counter() - t0)
    return best / n_ticks * 1e9


def run_bench(sizes=None, n_ticks: int = DEFAULT_TICKS, *, repetitions: int = REPETITIONS,
              seed: int = 0, fast: bool = False, progress=None) -> list[BenchResult]:
    sizes = default_sizes() if sizes is None else list(sizes)
    if any(s < 64 for s in sizes):
        raise ValueError("buffer sizes must be >= 64")
    if sizes != sorted(sizes):
        raise ValueError("buffer sizes must be ascending")
    noise = np.random.default_rng(seed).uniform(-1.0, 1.0, NOISE_TABLE)
    out = []
    for size in sizes:
        t = [time_kernel(k, size, n_ticks, noise, repetitions=repetitions, fast=fast) for k in KERNELS]
        res = BenchResult(size, *t, repetitions=repetitions)
        out.append(res)
        if progress:
            progress(res)
    return out
