"""Figure rendering for experiment reports. Files only; never opens a window."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.0,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def size(scale=1.0, ratio=None):
    width = 6.0 * scale
    ratio = (math.sqrt(5.0) - 1.0) / 2.0 if ratio is None else ratio
    return width, width * ratio


def new(scale=1.0, nrows=1, ncols=1, ratio=None, **kw):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(nrows, ncols, figsize=size(scale, ratio), **kw)
    return fig, ax


def save(fig, path) -> Path:
    path = Path(path)
    with plt.rc_context(RC):
        fig.savefig(path)
    plt.close(fig)
    return path


def snr_figure(rows, path):
    """rows: (freq_hz, phase, snr_db, predicted_db)."""
    a = np.asarray(rows, dtype=float)
    freqs = np.unique(a[:, 0])
    mean = [a[a[:, 0] == f, 2].mean() for f in freqs]
    pred = [a[a[:, 0] == f, 3][0] for f in freqs]
    fig, ax = new()
    ax.semilogx(a[:, 0], a[:, 2], ".", color="0.6", label="measured (each phase)")
    ax.semilogx(freqs, mean, "-o", ms=3, label="measured (phase mean)")
    ax.semilogx(freqs, pred, "--", label="model lower bound")
    ax.set_xlabel("sine frequency [Hz]")
    ax.set_ylabel("SNR [dB]")
    ax.legend()
    return save(fig, path)


def attenuation_figure(results, path):
    a = np.array([(r.freq_hz, r.min_gain_db, r.max_gain_db, r.mean_gain_db) for r in results])
    fig, ax = new()
    ax.semilogx(a[:, 0], a[:, 1], "v-", ms=3, label="min")
    ax.semilogx(a[:, 0], a[:, 2], "^-", ms=3, label="max")
    ax.semilogx(a[:, 0], a[:, 3], "o-", ms=3, label="mean")
    ax.set_xlabel("sine frequency [Hz]")
    ax.set_ylabel("main-peak gain [dB]")
    ax.legend()
    return save(fig, path)


def sideband_figure(curve, path):
    c = np.asarray(curve)
    fig, ax = new()
    for col, name in ((1, "carrier A0"), (2, "first sideband A1"), (3, "second sideband A2")):
        with np.errstate(divide="ignore"):
            ax.plot(c[:, 0], 20 * np.log10(np.maximum(c[:, col], 1e-12)), label=name)
    ax.set_xlabel("carrier frequency [Hz]")
    ax.set_ylabel("amplitude [dB]")
    ax.set_ylim(-140, 5)
    ax.legend()
    return save(fig, path)


def sonogram_figure(plain, dithered, fs, path):
    fig, axes = new(1.0, 2, 1, ratio=0.9, sharex=True)
    hop = 128
    for ax, son, title in ((axes[0], plain, "non-modulated"), (axes[1], dithered, "modulated")):
        extent = (0, son.shape[0] * hop / fs, 0, fs / 2000)
        ax.imshow(son.T, origin="lower", aspect="auto", extent=extent, cmap="gray",
                  vmin=np.percentile(son, 5), vmax=son.max())
        ax.set_ylabel("frequency [kHz]")
        ax.set_title(title)
        ax.grid(False)
    axes[1].set_xlabel("time [s]")
    return save(fig, path)


def pitch_figure(tracks, path, expected=None):
    """tracks: {label: rows (t_s, ratio)}; expected: {label: ratio}."""
    fig, ax = new()
    for label, tr in tracks.items():
        ax.plot(tr[:, 0], tr[:, 1], label=label)
    for label, v in (expected or {}).items():
        ax.axhline(v, ls=":", color="0.4")
        ax.annotate(label, (0, v), fontsize=7, va="bottom")
    ax.set_xlabel("time from ramp start [s]")
    ax.set_ylabel("pitch ratio")
    ax.legend()
    return save(fig, path)


def waveguide_figure(runs, path):
    """runs: {kind: (report, waveform, change_index)}."""
    fig, axes = new(1.0, len(runs), 1, ratio=0.25 * len(runs), sharex=True)
    for ax, (kind, (rep, y, ch)) in zip(np.atleast_1d(axes), runs.items()):
        lo = max(ch - int(2 * rep.period_before), 0)
        hi = min(ch + int(4 * rep.period_after), len(y))
        ax.plot(np.arange(lo, hi) - ch, y[lo:hi])
        ax.axvline(0, color="r", ls=":")
        ax.set_ylabel(kind)
    np.atleast_1d(axes)[-1].set_xlabel("samples from pitch change")
    return save(fig, path)


def bench_figure(results, path):
    a = np.array([(r.buffer_size, r.fad_ns, r.fir_ns, r.fir_no_increment_ns) for r in results])
    fig, ax = new()
    ax.semilogx(a[:, 0], a[:, 1], "o-", ms=3, label="FAD", base=2)
    ax.semilogx(a[:, 0], a[:, 2], "s-", ms=3, label="FIR", base=2)
    ax.semilogx(a[:, 0], a[:, 3], "^-", ms=3, label="FIR, no increment", base=2)
    ax.set_xlabel("buffer size [samples]")
    ax.set_ylabel("time per sample [ns]")
    ax.legend()
    return save(fig, path)
