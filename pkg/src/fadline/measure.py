"""Measurement harness: sine SNR and attenuation, pitch tracking, sonograms."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from fadline.core import DomainError

# CSV stand-in for an unbounded SNR
SNR_CAP_DB = 200.0
SONOGRAM_WINDOW = 256
SONOGRAM_HOP = 128
SONOGRAM_FLOOR_DB = -120.0


class SnrResult(NamedTuple):
    freq_hz: float
    snr_db: float  # inf when the error is exactly zero
    initial_phase: float
    n: float  # samples per period

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.snr_db)

    @property
    def capped_db(self) -> float:
        return min(self.snr_db, SNR_CAP_DB)


class AttenuationResult(NamedTuple):
    freq_hz: float
    min_gain_db: float
    max_gain_db: float
    mean_gain_db: float


class SonogramFrame(NamedTuple):
    time_index: int
    db: np.ndarray  # SONOGRAM_WINDOW // 2 + 1 bins


def _nominal_lag(line) -> int:
    return int(round(line.nominal_delay))


def _steady_run(line, freq_hz, fs, initial_phase, cycles):
    """Feed a unit sine through a fresh line; return aligned (input, output) over `cycles` periods."""
    lag = _nominal_lag(line)
    periods_in_delay = lag * freq_hz / fs
    if abs(periods_in_delay - round(periods_in_delay)) > 1e-9:
        raise DomainError(
            f"{freq_hz} Hz does not fit a whole number of periods in a {lag}-sample delay")
    n_per = fs / freq_hz
    window = int(round(cycles * n_per))
    # one extra period past the delay lets the interpolators settle
    start = lag + int(math.ceil(n_per)) + 4
    total = start + window
    x = np.sin(2.0 * np.pi * freq_hz * np.arange(total) / fs)
    line.reset(initial_phase)
    y = line.process(x)
    return x[start - lag:total - lag], y[start:total], n_per


def measure_snr(line, freq_hz: float, fs: float, initial_phase: float = 0.0,
                cycles: int = 4) -> SnrResult:
    """Signal-to-error ratio of a line driven by a unit sine.

    The output is aligned with the input by the rounded nominal delay, so
    any phase error counts as noise. The error sum is normalized by
    ``sqrt(2/N)`` per period, which makes the ratio an RMS ratio: a line
    adding noise 60 dB below the signal RMS measures 60 dB.
    """
    ref, out, n_per = _steady_run(line, freq_hz, fs, initial_phase, cycles)
    err = out - ref
    # sqrt(2/N) normalization of the per-period squared-error sum, averaged over the cycles
    err_amp = math.sqrt(2.0 / n_per * float(np.dot(err, err)) / cycles)
    sig_amp = math.sqrt(2.0 / n_per * float(np.dot(ref, ref)) / cycles)
    snr = math.inf if err_amp == 0.0 else 20.0 * math.log10(sig_amp / err_amp)
    return SnrResult(freq_hz, snr, initial_phase, n_per)


def main_peak_gain_db(ref: np.ndarray, out: np.ndarray, cycles: int) -> float:
    """Gain of the output's carrier bin relative to the input's, rectangular window."""
    a = abs(np.fft.rfft(out)[cycles])
    b = abs(np.fft.rfft(ref)[cycles])
    return 20.0 * math.log10(a / b)


def measure_attenuation(line, freq_hz: float, fs: float, phase_grid=None,
                        cycles: int = 4) -> AttenuationResult:
    if phase_grid is None:
        phase_grid = np.arange(8) / 8.0
    phase_grid = np.asarray(phase_grid, dtype=np.float64)
    if phase_grid.size < 8:
        raise DomainError("phase grid needs at least 8 points")
    if abs(fs / freq_hz * cycles - round(fs / freq_hz * cycles)) > 1e-9:
        raise DomainError("measurement window must hold whole periods")
    gains = []
    for ph in phase_grid:
        ref, out, _ = _steady_run(line, freq_hz, fs, float(ph), cycles)
        gains.append(main_peak_gain_db(ref, out, cycles))
    g = np.array(gains)
    return AttenuationResult(freq_hz, float(g.min()), float(g.max()), float(g.mean()))


def commensurate_frequencies(delay_samples: int, fs: float, f_lo: float, f_hi: float):
    """Frequencies fs/N in [f_lo, f_hi] with integer N dividing the delay, ascending."""
    out = []
    for n in range(max(2, int(math.ceil(fs / f_hi))), int(math.floor(fs / f_lo)) + 1):
        if delay_samples % n == 0:
            out.append(fs / n)
    return sorted(out)


def pitch_track(signal, fs: float, frame: int = 2048, hop: int = 256,
                silence_db: float = -80.0, pad: int = 4) -> np.ndarray:
    """Per-frame dominant frequency as rows of (time_s, hz).

    Hann-windowed FFT (zero-padded `pad` times) peak refined by a parabola
    through the log magnitudes of the peak bin and its neighbours. Times are
    frame centres. Frames whose RMS is below `silence_db` get NaN.
    """
    if frame < 1024 or frame & (frame - 1):
        raise DomainError(f"frame must be a power of two >= 1024, got {frame}")
    x = np.asarray(signal, dtype=np.float64)
    if x.size < frame:
        raise DomainError("signal shorter than one frame")
    win = np.hanning(frame)
    starts = np.arange(0, x.size - frame + 1, hop)
    frames = np.lib.stride_tricks.sliding_window_view(x, frame)[starts] * win
    nfft = frame * pad
    spec = np.abs(np.fft.rfft(frames, n=nfft, axis=1))
    rms = np.sqrt(np.mean(np.lib.stride_tricks.sliding_window_view(x, frame)[starts] ** 2, axis=1))
    k = np.clip(np.argmax(spec[:, 1:-1], axis=1) + 1, 1, spec.shape[1] - 2)
    rows = np.arange(len(k))
    with np.errstate(divide="ignore"):
        a, b, c = (np.log(spec[rows, k + o] + 1e-300) for o in (-1, 0, 1))
    denom = a - 2.0 * b + c
    delta = np.where(denom != 0.0, 0.5 * (a - c) / np.where(denom != 0.0, denom, 1.0), 0.0)
    hz = (k + delta) * fs / nfft
    with np.errstate(divide="ignore"):
        silent = 20.0 * np.log10(rms + 1e-300) < silence_db
    hz = np.where(silent, np.nan, hz)
    t = (starts + frame / 2.0) / fs
    return np.column_stack([t, hz])


def sonogram(signal, fs: float) -> list[SonogramFrame]:
    """256-point Hann STFT with hop 128; magnitudes in dB floored at -120."""
    return [SonogramFrame(i, row) for i, row in enumerate(sonogram_matrix(signal, fs))]


def sonogram_matrix(signal, fs: float) -> np.ndarray:
    x = np.asarray(signal, dtype=np.float64)
    if x.size < SONOGRAM_WINDOW:
        raise DomainError(f"signal shorter than {SONOGRAM_WINDOW} samples")
    win = np.hanning(SONOGRAM_WINDOW)
    frames = np.lib.stride_tricks.sliding_window_view(x, SONOGRAM_WINDOW)[::SONOGRAM_HOP]
    # scaled so a full-scale sine reads 0 dB
    mag = np.abs(np.fft.rfft(frames * win, axis=1)) * (2.0 / win.sum())
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag)
    return np.maximum(db, SONOGRAM_FLOOR_DB)


def band_level_db(son: np.ndarray, fs: float, f_lo: float, f_hi: float | None = None) -> np.ndarray:
    """Per-frame power mean over a frequency band of a sonogram matrix, in dB."""
    nb = son.shape[1]
    freqs = np.arange(nb) * fs / (2 * (nb - 1))
    f_hi = fs / 2 if f_hi is None else f_hi
    sel = (freqs >= f_lo) & (freqs <= f_hi)
    power = 10.0 ** (son[:, sel] / 10.0)
    return 10.0 * np.log10(power.mean(axis=1))


def darkness_evenness(level_db: np.ndarray, reference_db: np.ndarray) -> float:
    """How evenly the attenuation ("dark area") is spread along the time axis.

    Per-frame darkness is the drop of `level_db` below `reference_db`
    (clipped at zero); the result is the normalized Shannon entropy of its
    distribution over frames: 1.0 for perfectly even, lower when the dark
    frames bunch up.
    """
    dark = np.clip(np.asarray(reference_db) - np.asarray(level_db), 0.0, None)
    total = dark.sum()
    if total <= 0.0 or dark.size < 2:
        return 1.0
    p = dark[dark > 0] / total
    return float(-(p * np.log(p)).sum() / math.log(dark.size))


def settle_time(track: np.ndarray, target: float, tol: float, t0: float = 0.0) -> float:
    """First time >= t0 after which the tracked value stays within `tol` (relative) of `target`.

    Only frames up to the last in-band frame are considered, so the track can
    be cut before a later transient.
    """
    t, v = track[:, 0], track[:, 1]
    ok = np.abs(v - target) <= tol * abs(target)
    idx = np.flatnonzero(ok & (t >= t0))
    if idx.size == 0:
        return math.nan
    last = idx[-1]
    # walk back from the last in-band frame to the start of that run
    first = last
    while first - 1 >= 0 and ok[first - 1] and t[first - 1] >= t0:
        first -= 1
    return float(t[first])
