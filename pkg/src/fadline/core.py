"""Shared numeric pieces: circular buffer and the quadratic Lagrange interpolator."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

# grid step for extrema scans over the fractional offset
EXTREMA_STEP = 1.0 / 1024


class DomainError(ValueError):
    """An argument lies outside the range where an operation is defined."""


class Lagrange2(NamedTuple):
    h0: float
    h1: float
    h2: float


class FreqResponse(NamedTuple):
    magnitude: float
    phase_delay: float


class Extrema(NamedTuple):
    a_min: float
    a_max: float
    tau_min: float
    tau_max: float


class DelayBuffer:
    """Fixed-length circular sample store; every index is taken modulo the length."""

    def __init__(self, size: int):
        if size < 4:
            raise DomainError(f"buffer length must be >= 4, got {size}")
        self.cells = np.zeros(int(size), dtype=np.float64)

    def __len__(self) -> int:
        return self.cells.shape[0]

    def __getitem__(self, idx: int) -> float:
        return self.cells[idx % self.cells.shape[0]]

    def __setitem__(self, idx: int, value: float) -> None:
        self.cells[idx % self.cells.shape[0]] = value

    def clear(self) -> None:
        self.cells[:] = 0.0


def check_frac(d: float) -> float:
    if not -1.0 <= d <= 1.0:
        raise DomainError(f"fractional offset {d!r} outside [-1, 1]")
    return float(d)


def lagrange2_coeffs(d: float) -> Lagrange2:
    """Coefficients of H(z) = h0 + h1 z^-1 + h2 z^-2 giving a delay of 1 - d samples."""
    d = check_frac(d)
    return Lagrange2(d * (1.0 + d) / 2.0, (1.0 + d) * (1.0 - d), -d * (1.0 - d) / 2.0)


def _response_arrays(d, w):
    """Vectorized |H| and phase delay for offsets `d` at normalized frequency `w` (rad/sample)."""
    d = np.asarray(d, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    h0 = d * (1.0 + d) / 2.0
    h1 = (1.0 + d) * (1.0 - d)
    h2 = -d * (1.0 - d) / 2.0
    H = h0 + h1 * np.exp(-1j * w) + h2 * np.exp(-2j * w)
    mag = np.abs(H)
    with np.errstate(divide="ignore", invalid="ignore"):
        # unwrap relative to the nominal delay so the branch cut never lands on a valid point
        nominal = 1.0 - d
        resid = np.angle(H * np.exp(1j * w * nominal))
        pd = np.where(w > 0, nominal - resid / np.where(w > 0, w, 1.0), nominal)
    return mag, pd


def lagrange2_response(d: float, f: float, fs: float) -> FreqResponse:
    """Magnitude and phase delay (samples) of the quadratic interpolator at frequency `f`."""
    d = check_frac(d)
    if not 0.0 <= f <= fs / 2.0:
        raise DomainError(f"frequency {f} outside [0, fs/2]")
    mag, pd = _response_arrays(d, 2.0 * math.pi * f / fs)
    return FreqResponse(float(mag), float(pd))


def response_extrema(f: float, fs: float, d_range: tuple[float, float]) -> Extrema:
    """Extremal gain and excess phase delay over an interval of fractional offsets.

    Dense scan with step EXTREMA_STEP; interval endpoints are always included.
    """
    lo, hi = d_range
    if lo > hi:
        raise DomainError(f"empty offset range {d_range}")
    check_frac(lo)
    check_frac(hi)
    n = max(int(math.ceil((hi - lo) / EXTREMA_STEP)), 0) + 1
    d = np.linspace(lo, hi, n)
    mag, pd = _response_arrays(d, 2.0 * math.pi * f / fs)
    excess = pd - (1.0 - d)
    return Extrema(float(mag.min()), float(mag.max()), float(excess.min()), float(excess.max()))
