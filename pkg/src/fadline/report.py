"""Run an experiment by name and write its CSVs, a key=value manifest and figures."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from fadline import experiments as ex
from fadline import measure, modmodel, plotting
from fadline.bench import BenchResult
from fadline.experiments import write_csv
from fadline.waveguide import packet_events

EXPERIMENTS = ("snr", "attenuation", "sidebands", "dither_sonogram", "ramp_pitch", "waveguide")

SNR_HEADER = ("freq_hz", "snr_db", "phase")
ATT_HEADER = ("freq_hz", "min_db", "max_db", "mean_db")
CURVE_HEADER = ("frequency_hz", "A0", "A1", "A2", "snr_db")
SONOGRAM_HEADER = ("frame", "bin", "db")
PITCH_HEADER = ("t_s", "hz")
BENCH_HEADER = ("buffer_size", "fad_ns", "fir_ns", "fir_no_increment_ns", "caching_cost_pct",
                "repetitions", "statistic")


def write_manifest(path, params: dict) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        for k, v in params.items():
            fh.write(f"{k}={v}\n")
    return path


def read_manifest(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            out[k] = v
    return out


def _capped(db: float) -> float:
    return min(db, measure.SNR_CAP_DB)


def _snr(out: Path, fs: float, size: int, plots: bool) -> dict:
    rows = ex.snr_sweep(fs=fs, size=size, increment=1.5)
    write_csv(out / "snr.csv", SNR_HEADER, [(f, _capped(s), ph) for f, ph, s, _ in rows])
    freqs = sorted({r[0] for r in rows})
    curve = modmodel.sideband_spectrum_curve((-0.5, 0.5), fs, freqs)
    write_csv(out / "snr_model.csv", CURVE_HEADER, curve.tolist())
    margin = min(s - p for _, _, s, p in rows)
    if plots:
        plotting.snr_figure(rows, out / "snr.png")
    return {"increment": 1.5, "frequencies": len(freqs), "phases": 4, "cycles": 4,
            "min_margin_over_model_db": round(margin, 4), "d_interval": "-0.5..0.5"}


def _attenuation(out: Path, fs: float, size: int, plots: bool) -> dict:
    res = ex.attenuation_sweep(fs=fs, size=size, delay_s=size / (1.5 * fs))
    write_csv(out / "att.csv", ATT_HEADER,
              [(r.freq_hz, r.min_gain_db, r.max_gain_db, r.mean_gain_db) for r in res])
    if plots:
        plotting.attenuation_figure(res, out / "att.png")
    return {"delay_s": size / (1.5 * fs), "phase_grid": 8}


def _sidebands(out: Path, fs: float, size: int, plots: bool) -> dict:
    grid = np.linspace(0.0, fs / 2, 257)[1:]
    curve = modmodel.sideband_spectrum_curve((-0.5, 0.5), fs, grid)
    write_csv(out / "sidebands.csv", CURVE_HEADER, curve.tolist())
    if plots:
        plotting.sideband_figure(curve, out / "sidebands.png")
    return {"d_interval": "-0.5..0.5", "points": len(grid)}


def _sonogram_rows(son):
    frames, bins = np.indices(son.shape)
    return zip(frames.ravel(), bins.ravel(), np.round(son.ravel(), 4))


def _dither(out: Path, fs: float, size: int, plots: bool) -> dict:
    r = ex.dither_experiment(fs=fs)
    write_csv(out / "sonogram_plain.csv", SONOGRAM_HEADER, _sonogram_rows(r.sonogram_plain))
    write_csv(out / "sonogram_dithered.csv", SONOGRAM_HEADER, _sonogram_rows(r.sonogram_dithered))
    if plots:
        plotting.sonogram_figure(r.sonogram_plain, r.sonogram_dithered, fs, out / "sonogram.png")
    return {"window": measure.SONOGRAM_WINDOW, "hop": measure.SONOGRAM_HOP, "window_type": "hann",
            "evenness_plain": round(r.evenness_plain, 6),
            "evenness_dithered": round(r.evenness_dithered, 6)}


def _ramp(out: Path, fs: float, size: int, plots: bool) -> dict:
    fad = ex.run_ramp("fad", fs=fs)
    fir = ex.run_ramp("fir", fs=fs)
    imp = ex.run_ramp("fad", "impulse", fs=fs)
    k = fad.k
    tr_fad = measure.pitch_track(fad.y, fs)
    tr_fir = measure.pitch_track(fir.y, fs)
    t0 = fad.t[0]
    write_csv(out / "pitch.csv", PITCH_HEADER, ((t + t0, h) for t, h in tr_fad))
    write_csv(out / "pitch_fir.csv", PITCH_HEADER, ((t + t0, h) for t, h in tr_fir))
    ratio = ex.ratio_track(fad)
    steady = ex.frames_within(ratio, ex.fad_transit_time(ex.RAMP_TAU0, k), ex.RAMP_SECONDS, 2048 / fs)
    if plots:
        plotting.pitch_figure({"FAD": ratio, "FIR": ex.ratio_track(fir)}, out / "pitch.png",
                              {"e^k": math.exp(k), "1+k": 1 + k})
    return {"f0_hz": fad.f0, "tau0_s": ex.RAMP_TAU0, "tau_end_s": ex.RAMP_TAU_END,
            "ramp_s": ex.RAMP_SECONDS, "k": k, "expected_fad_ratio": math.exp(k),
            "measured_fad_ratio": float(np.median(steady[:, 1])),
            "expected_transit_s": ex.fad_transit_time(ex.RAMP_TAU0, k),
            "measured_transit_s": ex.impulse_exit_time(imp)}


def _waveguide(out: Path, fs: float, size: int, plots: bool) -> dict:
    runs = ex.waveguide_transitions(fs=fs)
    events = []
    params = {}
    for kind, (rep, y, ch) in runs.items():
        write_csv(out / f"waveguide_{kind}.csv", ("sample", "amplitude"), enumerate(y))
        for e in packet_events(y):
            events.append((kind, round(e.onset, 3), round(e.offset, 3), round(e.peak, 6)))
        params[f"{kind}.change_sample"] = ch
        params[f"{kind}.period_ratio"] = round(rep.period_ratio, 6)
        params[f"{kind}.duration_ratio"] = round(rep.duration_ratio, 6)
        params[f"{kind}.events_per_period"] = rep.events_per_period
    write_csv(out / "waveguide_events.csv", ("kind", "onset", "offset", "peak"), events)
    if plots:
        plotting.waveguide_figure(runs, out / "waveguide.png")
    return params


_RUNNERS = {
    "snr": _snr,
    "attenuation": _attenuation,
    "sidebands": _sidebands,
    "dither_sonogram": _dither,
    "ramp_pitch": _ramp,
    "waveguide": _waveguide,
}


def run_experiment(name: str, out_dir, *, fs: float = 44100.0, buffer: int | None = None,
                   plots: bool = True) -> dict:
    if name not in _RUNNERS:
        raise KeyError(name)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    size = int(buffer) if buffer else int(round(fs))
    params = {"experiment": name, "fs": fs, "buffer": size}
    params.update(_RUNNERS[name](out, fs, size, plots))
    write_manifest(out / f"manifest_{name}.txt", params)
    return params


def write_bench(results: list[BenchResult], path, plots: bool = True) -> Path:
    path = Path(path)
    rows = [(r.buffer_size, round(r.fad_ns, 4), round(r.fir_ns, 4), round(r.fir_no_increment_ns, 4),
             round(r.caching_cost_pct, 3), r.repetitions, r.statistic) for r in results]
    write_csv(path, BENCH_HEADER, rows)
    if plots:
        plotting.bench_figure(results, path.with_suffix(".png"))
    return path
