"""Fractional delay lines: a two-pointer interpolated line and a single-pointer
fractionally-addressed line, with analysis and benchmark tools."""

from fadline.core import DelayBuffer, DomainError, lagrange2_coeffs, lagrange2_response, response_extrema
from fadline.fad_line import FadLine
from fadline.fir_line import FirLine

__all__ = [
    "DelayBuffer",
    "DomainError",
    "FadLine",
    "FirLine",
    "lagrange2_coeffs",
    "lagrange2_response",
    "response_extrema",
]
__version__ = "0.1.0"
