"""Fractionally-addressed delay line: one fractional pointer that reads ahead and writes behind."""

from __future__ import annotations

import math

import numpy as np

from fadline import kernels
from fadline.core import DelayBuffer, DomainError, lagrange2_coeffs

MIN_INCREMENT = 1.0
MAX_INCREMENT = 2.0


class FadLine:
    """Single-pointer delay line with delay ``B / (I * fs)`` seconds.

    Every tick the pointer reads (quadratic interpolation over the cells at
    and after it), then fills each cell it has stepped over since the last
    tick by interpolating the input stream, then advances by the increment
    ``I``. A cell at distance ``s`` behind the pointer gets the input value
    ``s / step`` samples in the past, where ``step`` is the last pointer
    advance; with ``I = 1`` and integer phase both interpolators collapse
    to copies and the line is an exact ``B``-sample delay.

    Increment changes do not move the read position, so a new delay is
    reached gradually as the buffer is re-filled at the new density.
    """

    kind = "fad"

    def __init__(self, size: int, fs: float, delay_s: float | None = None, *,
                 increment: float | None = None, initial_phase: float = 0.0,
                 fast_floor: bool = False, count_writes: bool = False):
        if size < 8:
            raise DomainError(f"buffer size must be >= 8, got {size}")
        if (delay_s is None) == (increment is None):
            raise TypeError("give exactly one of delay_s or increment")
        self.buf = DelayBuffer(size)
        self.fs = float(fs)
        self.fast_floor = bool(fast_floor)
        self.increment = self._check(increment if increment is not None
                                     else self.increment_for(delay_s))
        self.write_counts = np.zeros(size if count_writes else 0, dtype=np.int64)
        self.reset(initial_phase)

    @property
    def size(self) -> int:
        return len(self.buf)

    @property
    def delay_s(self) -> float:
        return self.size / (self.increment * self.fs)

    @property
    def nominal_delay(self) -> float:
        """Steady-state delay in samples."""
        return self.size / self.increment

    def increment_for(self, delay_s: float) -> float:
        if delay_s <= 0:
            raise DomainError(f"delay must be positive, got {delay_s}")
        return self.size / (delay_s * self.fs)

    @staticmethod
    def _check(inc: float) -> float:
        if not MIN_INCREMENT <= inc <= MAX_INCREMENT:
            raise DomainError(f"increment {inc} outside [{MIN_INCREMENT}, {MAX_INCREMENT}]")
        return float(inc)

    def set_delay(self, delay_s: float) -> None:
        self.increment = self._check(self.increment_for(delay_s))

    def set_increment(self, inc: float) -> None:
        self.increment = self._check(inc)

    def reset(self, initial_phase: float = 0.0) -> None:
        if not 0.0 <= initial_phase < 1.0:
            raise DomainError(f"initial phase {initial_phase} outside [0, 1)")
        self.buf.clear()
        self.write_counts[:] = 0
        self.phase = float(initial_phase)
        self.phase_old = self.size - 1
        self.step = self.increment
        self.x1 = 0.0
        self.x2 = 0.0
        self.writes = 0

    def tick(self, x: float) -> float:
        cells = self.buf.cells
        B = cells.shape[0]
        fph = math.floor(self.phase)
        frac = self.phase - fph
        h0, h1, h2 = lagrange2_coeffs(1.0 - frac)
        y = h0 * cells[fph] + h1 * cells[(fph + 1) % B] + h2 * cells[(fph + 2) % B]

        nw = (fph - self.phase_old) % B
        for j in range(nw):
            c = (self.phase_old + 1 + j) % B
            g0, g1, g2 = lagrange2_coeffs(1.0 - (frac + (nw - 1 - j)) / self.step)
            cells[c] = g0 * x + g1 * self.x1 + g2 * self.x2
            if self.write_counts.shape[0]:
                self.write_counts[c] += 1
        self.writes += nw
        self.x2, self.x1 = self.x1, x
        self.phase_old = fph
        self.step = self.increment
        self.phase += self.increment
        if self.phase >= B:
            self.phase -= B
        return y

    def read(self) -> float:
        """Output of the coming tick (the read precedes the writes within a tick)."""
        cells = self.buf.cells
        B = cells.shape[0]
        fph = math.floor(self.phase)
        h0, h1, h2 = lagrange2_coeffs(1.0 - (self.phase - fph))
        return h0 * cells[fph] + h1 * cells[(fph + 1) % B] + h2 * cells[(fph + 2) % B]

    def process(self, x, increments=None) -> np.ndarray:
        """Block version of :meth:`tick`; `increments` is an optional per-sample increment track."""
        x = np.ascontiguousarray(x, dtype=np.float64)
        if increments is None:
            increments = np.full(x.shape[0], self.increment)
        else:
            increments = np.ascontiguousarray(increments, dtype=np.float64)
            if increments.shape != x.shape:
                raise ValueError("increments must match the input length")
            bad = np.flatnonzero((increments < MIN_INCREMENT) | (increments > MAX_INCREMENT))
            if bad.size:
                raise DomainError(f"increment {increments[bad[0]]} at sample {bad[0]} out of range")
        out = np.empty_like(x)
        state = np.array([self.phase, self.phase_old, self.step, self.x1, self.x2, 0.0])
        kernels.fad_process(self.buf.cells, state, x, increments, out,
                            self.write_counts, self.fast_floor)
        self.phase = float(state[0])
        self.phase_old = int(state[1])
        self.step = float(state[2])
        self.x1 = float(state[3])
        self.x2 = float(state[4])
        self.writes += int(state[5])
        if increments.shape[0]:
            self.increment = float(increments[-1])
        return out

    def process_delays(self, x, delays_s) -> np.ndarray:
        """Drive the line with a per-sample delay track in seconds."""
        delays_s = np.asarray(delays_s, dtype=np.float64)
        return self.process(x, self.size / (delays_s * self.fs))
