"""Ideal string: two opposite-direction delay lines closed by reflecting terminations."""

from __future__ import annotations

import math
from enum import Enum
from typing import NamedTuple

import numpy as np

from fadline.core import DomainError
from fadline.fad_line import FadLine
from fadline.fir_line import FirLine

ENVELOPE_SMOOTH = 8
ENVELOPE_THRESHOLD = 0.10


class LineKind(str, Enum):
    FIR = "fir"
    FIR_ERASE = "fir-erase"
    FAD = "fad"


class PacketEvent(NamedTuple):
    onset: float  # samples, interpolated threshold crossing
    offset: float
    peak: float

    @property
    def duration(self) -> float:
        return self.offset - self.onset


class WaveguideString:
    """Lossless 1-D resonator built from two delay lines of equal length.

    Samples travel right through ``line_right``, reflect at the right end
    with ``reflection_gain``, travel back through ``line_left`` and reflect
    again at the left end. Excitation is added to the right-going wave at the
    left termination. ``left_out`` and ``right_out`` record the wave arriving
    at each termination.
    """

    def __init__(self, kind, length: int, fs: float = 44100.0, *,
                 reflection_gain: float = -1.0, increment: float = 1.0):
        kind = LineKind(kind)
        if length < 16:
            raise DomainError(f"string length must be >= 16, got {length}")
        if abs(reflection_gain) > 1.0:
            raise DomainError("|reflection_gain| must be <= 1")
        self.kind = kind
        self.fs = float(fs)
        self.reflection_gain = float(reflection_gain)
        self.excitation_point = 0
        self.length = int(length)
        if kind is LineKind.FAD:
            size = length * increment
            if abs(size - round(size)) > 1e-9:
                raise DomainError("length * increment must be a whole number of cells")
            self.line_right = FadLine(int(round(size)), fs, increment=increment)
            self.line_left = FadLine(int(round(size)), fs, increment=increment)
        else:
            # headroom so the line can be lengthened later
            cap = 4 * length + 8
            erase = kind is LineKind.FIR_ERASE
            self.line_right = FirLine(cap, length, erase_after_read=erase)
            self.line_left = FirLine(cap, length, erase_after_read=erase)
        self._pending = np.zeros(0)
        self.left_out: list[float] = []
        self.right_out: list[float] = []

    @property
    def period(self) -> float:
        """Current round-trip time in samples."""
        return 2.0 * self.line_right.nominal_delay

    def inject_packet(self, freq_hz: float, cycles: int = 3, amplitude: float = 1.0) -> np.ndarray:
        """Queue `cycles` periods of a sine to be added to the right-going wave."""
        n = int(round(cycles * self.fs / freq_hz))
        if n >= self.length:
            raise DomainError(f"packet of {n} samples does not fit a {self.length}-sample line")
        packet = amplitude * np.sin(2.0 * np.pi * freq_hz * np.arange(n) / self.fs)
        pending = np.zeros(max(n, self._pending.size))
        pending[: self._pending.size] += self._pending
        pending[:n] += packet
        self._pending = pending
        return packet

    def inject_impulse(self, amplitude: float = 1.0) -> None:
        pending = np.zeros(max(1, self._pending.size))
        pending[: self._pending.size] += self._pending
        pending[0] += amplitude
        self._pending = pending

    def step(self) -> tuple[float, float]:
        yr = self.line_right.read()
        yl = self.line_left.read()
        exc = 0.0
        if self._pending.size:
            exc = self._pending[0]
            self._pending = self._pending[1:]
        self.line_right.tick(self.reflection_gain * yl + exc)
        self.line_left.tick(self.reflection_gain * yr)
        self.left_out.append(yl)
        self.right_out.append(yr)
        return yl, yr

    def run(self, n: int) -> np.ndarray:
        for _ in range(n):
            self.step()
        return np.asarray(self.right_out)

    def run_until_left_reflection(self, threshold: float = 0.05, limit: int | None = None) -> int:
        """Step until a packet has fully arrived at the left end; returns the tick count used.

        The energy at the left termination must rise above `threshold` and then
        stay below it for ENVELOPE_SMOOTH ticks.
        """
        limit = limit if limit is not None else int(4 * self.period) + 64
        seen = False
        quiet = 0
        for i in range(limit):
            yl, _ = self.step()
            if abs(yl) > threshold:
                seen = True
                quiet = 0
            elif seen:
                quiet += 1
                if quiet >= ENVELOPE_SMOOTH:
                    return i + 1
        raise RuntimeError("no reflection detected at the left termination")

    def lower_pitch(self, value: float) -> None:
        """Lower the pitch: new line length in samples (FIR kinds) or new increment (FAD)."""
        if self.kind is LineKind.FAD:
            if value >= self.line_right.increment:
                raise DomainError("lowering the pitch needs a smaller increment")
            self.line_right.set_increment(value)
            self.line_left.set_increment(value)
        else:
            if value <= self.line_right.delay:
                raise DomainError("lowering the pitch needs a longer line")
            self.line_right.set_delay(value)
            self.line_left.set_delay(value)


def envelope(x) -> np.ndarray:
    """Rectified signal smoothed by an ENVELOPE_SMOOTH-sample centred moving average."""
    k = np.ones(ENVELOPE_SMOOTH) / ENVELOPE_SMOOTH
    return np.convolve(np.abs(np.asarray(x, dtype=np.float64)), k, mode="same")


def packet_events(x, threshold: float = ENVELOPE_THRESHOLD, peak: float | None = None,
                  min_gap: int = ENVELOPE_SMOOTH) -> list[PacketEvent]:
    """Packets as envelope excursions above `threshold` times the peak envelope.

    Crossing times are linearly interpolated between samples. Excursions
    separated by fewer than `min_gap` samples belong to the same packet.
    """
    env = envelope(x)
    peak = env.max() if peak is None else peak
    if peak <= 0.0:
        return []
    level = threshold * peak
    above = env > level
    edges = np.flatnonzero(np.diff(above.astype(np.int8)))
    events = []
    on = None
    for e in edges:
        if not above[e]:  # rising between e and e+1
            t = e + (level - env[e]) / (env[e + 1] - env[e])
            if on is None:
                on = t
        elif on is not None:
            t = e + (env[e] - level) / (env[e] - env[e + 1])
            events.append((on, t))
            on = None
    merged: list[list[float]] = []
    for a, b in events:
        if merged and a - merged[-1][1] < min_gap:
            merged[-1][1] = b
        else:
            merged.append([a, b])
    out = []
    for a, b in merged:
        seg = env[int(math.floor(a)): int(math.ceil(b)) + 1]
        out.append(PacketEvent(a, b, float(seg.max())))
    return out


class TimbreReport(NamedTuple):
    kind: str
    period_before: float
    period_after: float
    duration_before: float
    duration_after: float
    events_per_period: int

    @property
    def period_ratio(self) -> float:
        return self.period_after / self.period_before

    @property
    def duration_ratio(self) -> float:
        return self.duration_after / self.duration_before


def recirculation_period(x, min_lag: int) -> float:
    """Round-trip period in samples from the normalized autocorrelation.

    Takes the first lag past `min_lag` whose correlation reaches 90% of the
    maximum, refined by a parabola through its neighbours.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    spec = np.fft.rfft(x, 2 * n)
    ac = np.fft.irfft(spec * np.conj(spec))[:n]
    # unbiased: divide by the overlap length
    ac = ac / np.arange(n, 0, -1)
    hi = n // 2
    if min_lag >= hi:
        return math.nan
    seg = ac[min_lag:hi]
    k = int(np.flatnonzero(seg >= 0.9 * seg.max())[0])
    # climb to the local maximum of that lobe
    while k + 1 < seg.size and seg[k + 1] > seg[k]:
        k += 1
    lag = k + min_lag
    if 0 < k < seg.size - 1:
        a, b, c = seg[k - 1], seg[k], seg[k + 1]
        den = a - 2 * b + c
        if den != 0:
            return lag + 0.5 * (a - c) / den
    return float(lag)


def note_transition(kind, length: int = 400, fs: float = 44100.0, *, packet_hz: float | None = None,
                    ratio: float = 1.5, fad_increment: float = 1.5, trips_before: int = 4,
                    trips_after: int = 8):
    """Pitch-lowering experiment: packet recirculation before and after the change.

    `ratio` is the intended period ratio (> 1). FIR kinds lengthen the lines
    by it; the FAD kind divides the increment by it. The change is applied
    right after a packet reflects at the left end. Returns the report, the
    right-termination waveform and the sample index of the change.
    """
    kind = LineKind(kind)
    packet_hz = fs / 30.0 if packet_hz is None else packet_hz
    s = WaveguideString(kind, length, fs, increment=fad_increment if kind is LineKind.FAD else 1.0)
    s.inject_packet(packet_hz, 3)
    s.run(int(trips_before * s.period))
    s.run_until_left_reflection()
    change = len(s.right_out)
    if kind is LineKind.FAD:
        s.lower_pitch(fad_increment / ratio)
    else:
        s.lower_pitch(length * ratio)
    # the first period after the change is still mixing old and new content
    settle = change + int(math.ceil(s.period))
    s.run(int(trips_after * s.period) + settle - change)
    y = np.asarray(s.right_out)
    peak = envelope(y[:change]).max()

    before = packet_events(y[:change], peak=peak)
    after = packet_events(y[settle:], peak=peak)
    min_lag = int(2 * max(e.duration for e in before))
    period_before = recirculation_period(y[ENVELOPE_SMOOTH:change], min_lag)
    period_after = recirculation_period(y[settle:], min_lag)

    # events whose onset falls in whole periods counted from the first one
    n_periods = int((y.size - settle - after[0].onset) // period_after) if after else 0
    in_window = [e for e in after if e.onset < after[0].onset + n_periods * period_after]
    events_per_period = round(len(in_window) / n_periods) if n_periods else 0
    report = TimbreReport(
        kind.value,
        period_before,
        period_after,
        float(np.median([e.duration for e in before])),
        float(max(e.duration for e in in_window)) if in_window else math.nan,
        int(events_per_period),
    )
    return report, y, change
