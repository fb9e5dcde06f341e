import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import jv

from fadline.core import DomainError
from fadline.modmodel import (
    ModulationParams,
    SidebandModel,
    bessel_j,
    model_at,
    modulation_frequency,
    predicted_snr,
    sideband_amplitudes,
    sideband_spectrum_curve,
)

FS = 44100.0

# Frozen: sideband table evaluated with scipy's Bessel functions, A_min=0.9, x=0.5
TRIPLE_09_05 = (0.8930765180517064, 0.22409832334925836, 0.05253556746676882)
# Frozen: independent grid-scan extrema at fs/4 over [-0.5, 0.5] fed to the table with scipy
A2_QUARTER = 0.0290289350918129
SNR_QUARTER_DB = 10.327817246058029


def series_j(n, x, terms=30):
    return sum((-1) ** k * (x / 2) ** (2 * k + n) / (math.factorial(k) * math.factorial(k + n))
               for k in range(terms))


class TestBessel:
    def test_origin(self):
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(1, 0.0) == 0.0
        assert bessel_j(2, 0.0) == 0.0

    def test_j0_one(self):
        assert bessel_j(0, 1.0) == pytest.approx(series_j(0, 1.0), abs=1e-15)
        assert bessel_j(0, 1.0) == pytest.approx(0.7651976865579666, abs=1e-15)

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    @pytest.mark.parametrize("x", [0.01, 0.5, 2.0, 7.3, 12.0, 20.0])
    def test_against_scipy(self, n, x):
        # cancellation in the alternating series limits absolute accuracy at large x
        tol = 1e-12 if x <= 10 else 1e-9
        assert bessel_j(n, x) == pytest.approx(jv(n, x), abs=tol)

    @pytest.mark.parametrize("n, x", [(4, 1.0), (-1, 1.0), (0, -0.1), (0, 20.5)])
    def test_domain(self, n, x):
        with pytest.raises(DomainError):
            bessel_j(n, x)

    @given(st.floats(0, 2))
    def test_partial_sum_bound(self, x):
        s = bessel_j(0, x) ** 2 + 2 * sum(bessel_j(n, x) ** 2 for n in (1, 2, 3))
        assert s <= 1 + 1e-6


class TestSidebands:
    def test_no_modulation(self):
        s = sideband_amplitudes(ModulationParams(1.0, 0.0, 1.0))
        assert (s.m, s.a_m) == (0.0, 1.0)
        assert (s.a0, s.a1, s.a2) == (1.0, 0.0, 0.0)

    def test_pure_phase(self):
        s = sideband_amplitudes(ModulationParams(1.0, 0.3, 2.0))
        assert s.a2 == pytest.approx(jv(2, 0.6), abs=1e-15)

    def test_regression_triple(self):
        s = sideband_amplitudes(ModulationParams(0.9, 0.5, 1.0))
        assert (s.a0, s.a1, s.a2) == pytest.approx(TRIPLE_09_05, abs=1e-14)

    @given(st.floats(1e-6, 1.0))
    def test_mean_gain_identity(self, a_min):
        s = sideband_amplitudes(ModulationParams(a_min, 0.1, 1.0))
        assert s.a_m * (1 + s.m) == pytest.approx(1.0, abs=1e-12)
        assert 0 <= s.m < 1 and 0.5 < s.a_m <= 1

    def test_invalid(self):
        with pytest.raises(DomainError):
            sideband_amplitudes(ModulationParams(0.0, 0.1, 1.0))
        with pytest.raises(DomainError):
            sideband_amplitudes(ModulationParams(0.9, -0.1, 1.0))


class TestSnr:
    def test_unbounded(self):
        assert math.isinf(predicted_snr(SidebandModel(0.0, 1.0, 1.0, 0.0, 0.0)))

    def test_formula(self):
        snr = predicted_snr(SidebandModel(0.0, 1.0, 1.0, 0.1, 0.0))
        assert snr == pytest.approx(20 * math.log10(1 / (2 * math.sqrt(2) * 0.1)), abs=1e-12)
        assert snr == pytest.approx(10.97, abs=0.005)

    def test_quarter_rate_chain(self):
        s = model_at(FS / 4, FS)
        assert s.a2 == pytest.approx(A2_QUARTER, abs=1e-6)
        assert predicted_snr(s) == pytest.approx(SNR_QUARTER_DB, abs=1e-3)


class TestModulationFrequency:
    def test_integer(self):
        assert modulation_frequency(1.0, FS).omega_m == 0.0

    def test_half(self):
        assert modulation_frequency(1.5, FS).omega_m == pytest.approx(2 * math.pi * 0.5 * FS)

    def test_fold(self):
        r = modulation_frequency(1.3, 48000.0)
        assert r.omega_m == pytest.approx(2 * math.pi * 0.3 * 48000.0)
        assert r.folded_hz == pytest.approx(14400.0)
        assert modulation_frequency(1.7, 48000.0).folded_hz == pytest.approx(14400.0)

    def test_range(self):
        with pytest.raises(DomainError):
            modulation_frequency(2.5, FS)


class TestCurve:
    def test_dc_limit(self):
        c = sideband_spectrum_curve((-0.5, 0.5), FS, [1e-3])
        assert c[0, 1] == pytest.approx(1.0, abs=1e-9)
        assert c[0, 2] < 1e-6 and c[0, 3] < 1e-6

    def test_lowpass(self):
        grid = np.linspace(10.0, FS / 4, 200)
        c = sideband_spectrum_curve((-0.5, 0.5), FS, grid)
        assert np.all(np.diff(c[:, 1]) <= 1e-12)

    def test_columns(self):
        c = sideband_spectrum_curve((-0.5, 0.5), FS, [FS / 4])
        assert c.shape == (1, 5)
        assert c[0, 3] == pytest.approx(A2_QUARTER, abs=1e-6)
        assert c[0, 4] == pytest.approx(SNR_QUARTER_DB, abs=1e-3)
