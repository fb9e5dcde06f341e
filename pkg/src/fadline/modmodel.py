"""Approximate sideband model of a length-modulated interpolated delay.

The interpolator error is treated as a phase modulation of depth
``tau_max * omega0`` at rate ``omega_M`` combined with an amplitude
modulation of index ``m`` at rate ``2 * omega_M``; sidebands beyond the
second order are dropped.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from fadline.core import DomainError, response_extrema

MAX_BESSEL_TERMS = 80
# stand-in for an infinite SNR (no sideband energy)
UNBOUNDED_DB = math.inf


class ModulationParams(NamedTuple):
    a_min: float
    tau_max: float
    omega0: float  # carrier, rad/sample
    omega_m: float = 0.0  # modulating frequency, rad/s (does not enter the amplitudes)


class SidebandModel(NamedTuple):
    m: float
    a_m: float
    a0: float
    a1: float
    a2: float


class ModulationFrequency(NamedTuple):
    omega_m: float  # rad/s
    folded_hz: float  # offset of the first sideband after folding into [0, fs/2]


def bessel_j(n: int, x: float) -> float:
    """J_n(x) for n in 0..3 and 0 <= x <= 20 by the ascending series."""
    if n not in (0, 1, 2, 3):
        raise DomainError(f"Bessel order {n} not supported")
    if not 0.0 <= x <= 20.0:
        raise DomainError(f"Bessel argument {x} outside [0, 20]")
    half = x / 2.0
    term = half**n / math.factorial(n)
    total = term
    q = -half * half
    # summed until terms stop mattering: a fixed 30 terms leaves ~1e-5 truncation error at x = 20
    for k in range(1, MAX_BESSEL_TERMS):
        term *= q / (k * (k + n))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1.0) and k > half:
            break
    return total


def sideband_amplitudes(p: ModulationParams) -> SidebandModel:
    if not 0.0 < p.a_min <= 1.0:
        raise DomainError(f"A_min {p.a_min} outside (0, 1]")
    if p.tau_max < 0:
        raise DomainError(f"tau_max {p.tau_max} must be >= 0")
    m = (1.0 - p.a_min) / (1.0 + p.a_min)
    a_m = (1.0 + p.a_min) / 2.0
    x = p.tau_max * p.omega0
    j0, j1, j2 = (bessel_j(k, x) for k in range(3))
    # magnitudes only: the lower first sideband carries a minus sign that power sums ignore
    return SidebandModel(
        m=m,
        a_m=a_m,
        a0=a_m * j0 + m * a_m * j2,
        a1=abs(a_m * j1 - m * a_m / 2.0 * j1),
        a2=abs(a_m * j2 + m * a_m / 2.0 * j0),
    )


def snr_ratio(s: SidebandModel) -> float:
    """Linear SNR, carrier squared over twice-root-two times the sideband root-sum-square."""
    side = math.hypot(s.a1, s.a2)
    if side < 1e-15:
        return math.inf
    return s.a0**2 / (2.0 * math.sqrt(2.0) * side)


def predicted_snr(s: SidebandModel) -> float:
    """Predicted SNR in dB; ``inf`` when both sidebands vanish."""
    r = snr_ratio(s)
    return UNBOUNDED_DB if math.isinf(r) else 20.0 * math.log10(r)


def modulation_frequency(increment: float, fs: float) -> ModulationFrequency:
    if not 1.0 <= increment <= 2.0:
        raise DomainError(f"increment {increment} outside [1, 2]")
    frac = increment - math.floor(increment)
    if increment == 2.0:
        frac = 0.0
    offset = (frac * fs) % fs
    folded = min(offset, fs - offset)
    return ModulationFrequency(2.0 * math.pi * frac * fs, folded)


def model_at(f: float, fs: float, d_interval=(-0.5, 0.5)) -> SidebandModel:
    ex = response_extrema(f, fs, d_interval)
    return sideband_amplitudes(ModulationParams(ex.a_min, ex.tau_max, 2.0 * math.pi * f / fs))


def predicted_snr_at(f: float, fs: float, d_interval=(-0.5, 0.5)) -> float:
    """Chain extrema -> sidebands -> SNR for one carrier frequency."""
    return predicted_snr(model_at(f, fs, d_interval))


def sideband_spectrum_curve(d_interval, fs: float, f_grid) -> np.ndarray:
    """Rows of (frequency_hz, A0, A1, A2, snr_db) over a carrier-frequency grid."""
    rows = []
    for f in f_grid:
        s = model_at(float(f), fs, d_interval)
        rows.append((float(f), s.a0, s.a1, s.a2, predicted_snr(s)))
    return np.array(rows, dtype=np.float64).reshape(-1, 5)
