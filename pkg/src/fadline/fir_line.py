"""Classic variable-length delay line: a writer followed by an interpolated reader."""

from __future__ import annotations

import math

import numpy as np

from fadline import kernels
from fadline.core import DelayBuffer, DomainError, lagrange2_coeffs


class FirLine:
    """Circular buffer with a write pointer and a quadratic-Lagrange read pointer.

    The delay is split as ``M = round(delay)``, ``d = M - delay`` so the
    interpolator always works with ``d`` in [-0.5, 0.5] over the cells
    ``w-M+1, w-M, w-M-1``. Each tick writes first, then reads.

    With ``erase_after_read`` the cells the read stencil leaves behind are
    zeroed, so lengthening the line exposes silence instead of old signal.
    """

    kind = "fir"

    def __init__(self, capacity: int, initial_delay: float, erase_after_read: bool = False,
                 fast_floor: bool = False):
        if capacity < 8:
            raise DomainError(f"capacity must be >= 8, got {capacity}")
        self.buf = DelayBuffer(capacity)
        self.erase_after_read = bool(erase_after_read)
        self.fast_floor = bool(fast_floor)
        self._check(initial_delay)
        self.delay = float(initial_delay)
        self.write_idx = 0
        self._lag = -1

    @property
    def capacity(self) -> int:
        return len(self.buf)

    @property
    def nominal_delay(self) -> float:
        return self.delay

    def _check(self, delay: float) -> None:
        if not 2.0 <= delay <= self.capacity - 2:
            raise DomainError(f"delay {delay} outside [2, {self.capacity - 2}]")

    def set_delay(self, delay: float) -> None:
        """Takes effect on the next tick. No smoothing."""
        self._check(delay)
        self.delay = float(delay)

    def reset(self, initial_phase: float = 0.0) -> None:
        # initial_phase has no meaning for a two-pointer line; accepted for a uniform harness API
        self.buf.clear()
        self.write_idx = 0
        self._lag = -1

    def tick(self, x: float) -> float:
        cells = self.buf.cells
        B = cells.shape[0]
        w = self.write_idx
        cells[w] = x
        m = math.floor(self.delay + 0.5)
        h0, h1, h2 = lagrange2_coeffs(m - self.delay)
        r = w - m
        y = h0 * cells[(r + 1) % B] + h1 * cells[r % B] + h2 * cells[(r - 1) % B]
        if self.erase_after_read:
            oldest = m + 1
            if self._lag < 0:
                self._lag = oldest
            elif self._lag > oldest:
                for i in range(min(self._lag - oldest, B)):
                    cells[(w - self._lag + i) % B] = 0.0
                self._lag = oldest
            self._lag += 1
        self.write_idx = (w + 1) % B
        return y

    def read(self) -> float:
        """Output of the coming tick, which never depends on the sample about to be written."""
        cells = self.buf.cells
        B = cells.shape[0]
        m = math.floor(self.delay + 0.5)
        h0, h1, h2 = lagrange2_coeffs(m - self.delay)
        r = self.write_idx - m
        return h0 * cells[(r + 1) % B] + h1 * cells[r % B] + h2 * cells[(r - 1) % B]

    def process(self, x, delays=None) -> np.ndarray:
        """Block version of :meth:`tick`; `delays` is an optional per-sample delay track."""
        x = np.ascontiguousarray(x, dtype=np.float64)
        if delays is None:
            delays = np.full(x.shape[0], self.delay)
        else:
            delays = np.ascontiguousarray(delays, dtype=np.float64)
            if delays.shape != x.shape:
                raise ValueError("delays must match the input length")
            bad = np.flatnonzero((delays < 2.0) | (delays > self.capacity - 2))
            if bad.size:
                raise DomainError(f"delay {delays[bad[0]]} at sample {bad[0]} out of range")
        out = np.empty_like(x)
        state = np.array([self.write_idx, self._lag], dtype=np.int64)
        kernels.fir_process(self.buf.cells, state, x, delays, out,
                            self.erase_after_read, self.fast_floor)
        self.write_idx = int(state[0])
        self._lag = int(state[1])
        if delays.shape[0]:
            self.delay = float(delays[-1])
        return out
