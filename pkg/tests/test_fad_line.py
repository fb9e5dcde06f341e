import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fadline.core import DomainError
from fadline.fad_line import FadLine
from fadline.measure import measure_snr
from fadline.modmodel import modulation_frequency, predicted_snr_at


def tick_all(line, x, incs=None):
    out = []
    for i, v in enumerate(x):
        if incs is not None:
            line.set_increment(float(incs[i]))
        out.append(line.tick(float(v)))
    return np.array(out)


class TestConstruction:
    def test_two_thirds(self):
        assert FadLine(44100, 44100, 2 / 3).increment == pytest.approx(1.5)

    def test_one_second(self):
        assert FadLine(44100, 44100, 1.0).increment == 1.0

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            FadLine(1000, 1000, 0.4)
        with pytest.raises(DomainError):
            FadLine(1000, 1000, increment=0.99)

    def test_needs_one_of(self):
        with pytest.raises((DomainError, TypeError, ValueError)):
            FadLine(64, 64)
        with pytest.raises((DomainError, TypeError, ValueError)):
            FadLine(64, 64, 1.0, increment=1.0)

    def test_set_delay(self):
        line = FadLine(1000, 1000, 1.0)
        line.set_delay(0.8)
        assert line.increment == pytest.approx(1.25)
        with pytest.raises(DomainError):
            line.set_delay(0.45)


class TestDegenerate:
    def test_unity_bit_exact(self):
        x = np.random.default_rng(0).standard_normal(5000)
        y = FadLine(512, 512, increment=1.0).process(x)
        assert np.array_equal(y[512:], x[:-512])
        assert not y[:512].any()

    def test_double_rate_dc(self):
        y = FadLine(64, 64, increment=2.0).process(np.ones(400))
        assert np.max(np.abs(y[100:] - 1.0)) < 1e-9

    @pytest.mark.parametrize("inc", [1.0, 1.25, 1.5, 2.0])
    def test_static_delay_xcorr(self, inc):
        B = 800
        rng = np.random.default_rng(2)
        burst = np.convolve(rng.standard_normal(400), np.hanning(9), "same")
        x = np.zeros(3000)
        x[100:500] = burst
        y = FadLine(B, B, increment=inc).process(x)
        lag = int(np.argmax(np.correlate(y, x, "full"))) - (len(x) - 1)
        assert abs(lag - B / inc) <= 1


class TestWrites:
    def test_three_per_two(self):
        line = FadLine(1000, 1000, increment=1.5, count_writes=True)
        line.process(np.zeros(2 * 5000))
        assert abs(line.writes - 3 * 5000) <= 1

    def test_no_holes_random(self):
        B = 997
        rng = np.random.default_rng(4)
        incs = rng.uniform(1, 2, 50_000)
        line = FadLine(B, B, increment=incs[0], count_writes=True)
        for chunk in np.array_split(np.arange(incs.size), 50):
            line.process(np.zeros(chunk.size), incs[chunk])
        total = float(np.sum(incs[:-1])) + 1
        laps = int(total // B)
        counts = line.write_counts
        assert counts.min() >= laps and counts.max() <= laps + 1
        assert abs(line.writes - round(np.sum(incs[:-1]))) <= 1

    def test_tick_matches_process(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal(700)
        incs = rng.uniform(1, 2, 700)
        a = FadLine(97, 97, increment=incs[0], initial_phase=0.3)
        b = FadLine(97, 97, increment=incs[0], initial_phase=0.3)
        assert np.array_equal(tick_all(a, x, incs), b.process(x, incs))

    def test_fast_floor_equal(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(20_000)
        incs = 1.5 + 0.49 * np.sin(np.arange(20_000) / 700)
        a = FadLine(4410, 4410, increment=1.5).process(x, incs)
        b = FadLine(4410, 4410, increment=1.5, fast_floor=True).process(x, incs)
        assert np.array_equal(a, b)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(1.0, 2.0), st.integers(16, 300))
    def test_write_conservation(self, inc, n):
        line = FadLine(64, 64, increment=inc, count_writes=True)
        line.process(np.zeros(n))
        assert n <= line.writes + 1 and line.writes <= 2 * n
        assert abs(line.writes - round(inc * (n - 1) + 1)) <= 1


class TestQuality:
    def test_snr_105hz_above_model(self):
        # 105 Hz is the commensurate neighbour of 100 Hz for a 29400-sample delay
        fs = 44100.0
        r = measure_snr(FadLine(44100, fs, increment=1.5), 105.0, fs)
        assert r.snr_db >= predicted_snr_at(105.0, fs)

    # periods that divide the 29400-sample delay, all at or below fs/64
    @pytest.mark.parametrize("n_per", [70, 98, 196, 420, 1470])
    def test_low_frequency_fidelity(self, n_per):
        fs = 44100.0
        r = measure_snr(FadLine(44100, fs, increment=1.5), fs / n_per, fs)
        assert r.snr_db >= 40.0

    def test_modulation_product_position(self):
        fs, inc = 48000.0, 1.3
        B = 4800
        n = 1 << 15
        f0 = 300.0
        x = np.sin(2 * np.pi * f0 * np.arange(n + B) / fs)
        y = FadLine(B, fs, increment=inc).process(x)[-n:]
        spec = np.abs(np.fft.rfft(y * np.hanning(n)))
        freqs = np.fft.rfftfreq(n, 1 / fs)
        spec[np.abs(freqs - f0) < 200] = 0
        peak = freqs[np.argmax(spec)]
        fold = modulation_frequency(inc, fs).folded_hz
        assert min(abs(peak - (fold - f0)), abs(peak - (fold + f0))) < 20


def test_ramp_pitch_k02():
    from fadline.experiments import fad_transit_time, frames_within, ratio_track, run_ramp
    run = run_ramp("fad", tau0=0.99, tau_end=0.79, seconds=1.0)
    k = run.k
    steady = frames_within(ratio_track(run), fad_transit_time(0.99, k), 1.0, 2048 / run.fs)
    assert np.median(steady[:, 1]) == pytest.approx(math.exp(k), rel=0.01)
