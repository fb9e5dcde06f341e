"""Experiment runners: each returns plain arrays/records and can write its CSV files."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import NamedTuple

import numpy as np

from fadline import measure, modmodel, waveguide
from fadline.fad_line import FadLine
from fadline.fir_line import FirLine

FS = 44100.0
# delay ramp 0.99 s -> 0.5 s over 1.11 s
RAMP_TAU0 = 0.99
RAMP_TAU_END = 0.5
RAMP_SECONDS = 1.11


def ramp_rate(tau0: float = RAMP_TAU0, tau_end: float = RAMP_TAU_END,
              seconds: float = RAMP_SECONDS) -> float:
    return (tau0 - tau_end) / seconds


def fad_steady_ratio(k: float) -> float:
    """Steady pitch ratio of a single-pointer line under a delay ramp of rate `k`."""
    return math.exp(k)


def fad_transit_time(tau0: float, k: float) -> float:
    """Exit time of an impulse entering at the start of the ramp."""
    return tau0 / k * (1.0 - math.exp(-k))


def fir_ratio(k: float) -> float:
    return 1.0 + k


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow(r)
    return path


# --------------------------------------------------------------------------
# delay ramps
# --------------------------------------------------------------------------

class RampRun(NamedTuple):
    kind: str
    fs: float
    f0: float
    k: float
    t: np.ndarray  # seconds relative to ramp start
    x: np.ndarray
    y: np.ndarray
    delay_s: np.ndarray


def ramp_delay_track(n: int, pre: int, fs: float, tau0: float, tau_end: float,
                     seconds: float) -> np.ndarray:
    """Delay in seconds per sample: constant during the pre-roll, then the ramp, then held."""
    t = (np.arange(n) - pre) / fs
    k = ramp_rate(tau0, tau_end, seconds)
    return np.clip(tau0 - k * np.clip(t, 0.0, seconds), tau_end, tau0)


def run_ramp(kind: str, signal="sine", *, f0: float = 200.0, fs: float = FS,
             tau0: float = RAMP_TAU0, tau_end: float = RAMP_TAU_END,
             seconds: float = RAMP_SECONDS, pre_s: float | None = None,
             post_s: float = 0.4) -> RampRun:
    """Drive a line with a steady input, then ramp its delay down.

    The pre-roll (default `tau0` + 0.1 s) fills the line at the initial delay
    so the ramp starts from steady state. With ``signal="impulse"`` the input
    is a single unit sample at the start of the ramp.
    """
    pre_s = tau0 + 0.1 if pre_s is None else pre_s
    pre = int(round(pre_s * fs))
    n = pre + int(round((seconds + post_s) * fs))
    delay = ramp_delay_track(n, pre, fs, tau0, tau_end, seconds)
    t = (np.arange(n) - pre) / fs
    if signal == "sine":
        x = np.sin(2.0 * np.pi * f0 * np.arange(n) / fs)
    elif signal == "impulse":
        x = np.zeros(n)
        x[pre] = 1.0
    else:
        raise ValueError(f"unknown ramp input {signal!r}")

    size = int(round(fs))  # buffer of one second: increment 1/T stays in [1, 2]
    if kind == "fad":
        line = FadLine(size, fs, tau0)
        y = line.process_delays(x, delay)
    elif kind == "fir":
        line = FirLine(size, tau0 * fs)
        y = line.process(x, delay * fs)
    else:
        raise ValueError(f"unknown line kind {kind!r}")
    return RampRun(kind, fs, f0, ramp_rate(tau0, tau_end, seconds), t, x, y, delay)


def ratio_track(run: RampRun, frame: int = 2048, hop: int = 256) -> np.ndarray:
    """Rows (t_s relative to ramp start, pitch ratio to the input frequency)."""
    tr = measure.pitch_track(run.y, run.fs, frame, hop)
    t0 = run.t[0]
    return np.column_stack([tr[:, 0] + t0, tr[:, 1] / run.f0])


def frames_within(track: np.ndarray, t_lo: float, t_hi: float, frame_s: float) -> np.ndarray:
    """Track rows whose analysis frame lies entirely inside [t_lo, t_hi]."""
    half = frame_s / 2.0
    sel = (track[:, 0] - half >= t_lo) & (track[:, 0] + half <= t_hi)
    return track[sel]


def impulse_exit_time(run: RampRun) -> float:
    """Time of the output peak relative to ramp start, refined by a parabola."""
    i = int(np.argmax(np.abs(run.y)))
    a, b, c = np.abs(run.y[i - 1:i + 2])
    den = a - 2 * b + c
    off = 0.5 * (a - c) / den if den != 0 else 0.0
    return run.t[i] + off / run.fs


# --------------------------------------------------------------------------
# sine SNR / attenuation sweeps
# --------------------------------------------------------------------------

def default_frequency_grid(delay: int, fs: float, count: int = 16,
                           f_lo: float | None = None, f_hi: float | None = None) -> list[float]:
    """About `count` commensurate frequencies spread log-uniformly over [fs/512, fs/8]."""
    f_lo = fs / 512 if f_lo is None else f_lo
    f_hi = fs / 8 if f_hi is None else f_hi
    cands = np.array(measure.commensurate_frequencies(delay, fs, f_lo, f_hi))
    targets = np.geomspace(cands[0], cands[-1], count)
    picked = sorted({float(cands[np.argmin(np.abs(np.log(cands / t)))]) for t in targets})
    return picked


def snr_sweep(freqs=None, *, fs: float = FS, size: int = 44100, increment: float = 1.5,
              phases=(0.0, 0.25, 0.5, 0.75), d_interval=(-0.5, 0.5)):
    """Measured SNR per (frequency, initial phase) next to the model bound.

    Returns rows (freq_hz, phase, snr_db, predicted_db).
    """
    line = FadLine(size, fs, increment=increment)
    if freqs is None:
        freqs = default_frequency_grid(int(round(line.nominal_delay)), fs)
    rows = []
    for f in freqs:
        pred = modmodel.predicted_snr_at(f, fs, d_interval)
        for ph in phases:
            r = measure.measure_snr(line, f, fs, ph)
            rows.append((f, ph, r.snr_db, pred))
    return rows


def attenuation_sweep(freqs=None, *, fs: float = FS, size: int = 44100, delay_s: float = 2.0 / 3.0,
                      phase_grid=None):
    line = FadLine(size, fs, delay_s)
    if freqs is None:
        freqs = default_frequency_grid(int(round(line.nominal_delay)), fs)
    return [measure.measure_attenuation(line, f, fs, phase_grid) for f in freqs]


# --------------------------------------------------------------------------
# delay-length dithering
# --------------------------------------------------------------------------

class DitherRun(NamedTuple):
    sonogram_plain: np.ndarray
    sonogram_dithered: np.ndarray
    reference: np.ndarray
    level_plain: np.ndarray
    level_dithered: np.ndarray
    evenness_plain: float
    evenness_dithered: float
    fs: float


def pulse_train(n: int, period: int) -> np.ndarray:
    x = np.zeros(n)
    x[::period] = 1.0
    return x


def dither_experiment(*, fs: float = FS, seconds: float = 2.0, base_delay: float = 100.0,
                      sweep_samples: float = 4.0, pulse_period: int = 32,
                      dither_depth: float = 0.5, dither_period: float = 113.1,
                      band_lo: float | None = None) -> DitherRun:
    """Pulse train through a slowly lengthening FIR line, with and without fast delay dither.

    The delay grows linearly by `sweep_samples` over the run, so the fractional
    offset sweeps through its whole range several times. The dithered run adds
    a sinusoidal delay modulation of `dither_depth` samples with a period of
    `dither_period` samples. The default period is incommensurate with the
    pulse period so the dither does not lock onto the pulses.
    """
    n = int(round(seconds * fs))
    x = pulse_train(n, pulse_period)
    ramp = base_delay + sweep_samples * np.arange(n) / n
    dither = dither_depth * np.sin(2.0 * np.pi * np.arange(n) / dither_period)
    cap = int(base_delay + sweep_samples + 8)
    y_plain = FirLine(cap, ramp[0]).process(x, ramp)
    y_dith = FirLine(cap, ramp[0] + dither[0]).process(x, ramp + dither)

    son_ref = measure.sonogram_matrix(x, fs)
    son_p = measure.sonogram_matrix(y_plain, fs)
    son_d = measure.sonogram_matrix(y_dith, fs)
    band_lo = fs / 4 if band_lo is None else band_lo
    ref = measure.band_level_db(son_ref, fs, band_lo)
    lp = measure.band_level_db(son_p, fs, band_lo)
    ld = measure.band_level_db(son_d, fs, band_lo)
    # skip frames that still see the empty line
    skip = int(math.ceil((base_delay + 2) / measure.SONOGRAM_HOP)) + 2
    return DitherRun(son_p, son_d, ref, lp, ld,
                     measure.darkness_evenness(lp[skip:], ref[skip:]),
                     measure.darkness_evenness(ld[skip:], ref[skip:]), fs)


# --------------------------------------------------------------------------
# waveguide note transitions
# --------------------------------------------------------------------------

def waveguide_transitions(**kw):
    """Run the three pitch-lowering variants; returns {kind: (report, waveform, change_index)}."""
    return {k.value: waveguide.note_transition(k, **kw) for k in waveguide.LineKind}
