"""Delay-modulation effects: configuration, per-sample delay tracks, and block processing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fadline.fad_line import MAX_INCREMENT, MIN_INCREMENT, FadLine
from fadline.fir_line import FirLine

LINE_KINDS = ("fir", "fir-erase", "fad")
MOD_KINDS = ("none", "ramp", "sine", "walk")


class ConfigError(ValueError):
    """An effect configuration drives the line outside its legal range."""


@dataclass
class EffectConfig:
    line: str = "fad"
    delay_s: float = 2.0 / 3.0
    mod: str = "none"
    fs: float = 44100.0
    buffer: int | None = None  # defaults: one second of samples
    # ramp
    ramp_k: float = 0.0
    ramp_seconds: float = 0.0
    # sine
    depth_s: float = 0.0
    rate_hz: float = 0.0
    # random walk
    step_interval: int = 100
    seed: int | None = None

    def __post_init__(self):
        if self.line not in LINE_KINDS:
            raise ConfigError(f"unknown line kind {self.line!r}; pick one of {LINE_KINDS}")
        if self.mod not in MOD_KINDS:
            raise ConfigError(f"unknown modulation {self.mod!r}; pick one of {MOD_KINDS}")
        if self.step_interval < 1:
            raise ConfigError("step_interval must be >= 1")

    @property
    def buffer_size(self) -> int:
        return int(self.buffer) if self.buffer else int(round(self.fs))


def delay_track(cfg: EffectConfig, n: int) -> np.ndarray:
    """Per-sample delay in seconds for `n` samples."""
    t = np.arange(n) / cfg.fs
    if cfg.mod == "none":
        return np.full(n, cfg.delay_s)
    if cfg.mod == "ramp":
        return cfg.delay_s - cfg.ramp_k * np.clip(t, 0.0, cfg.ramp_seconds)
    if cfg.mod == "sine":
        return cfg.delay_s + cfg.depth_s * np.sin(2.0 * np.pi * cfg.rate_hz * t)
    # random walk: a random target every step_interval samples, joined by straight lines
    rng = np.random.default_rng(cfg.seed)
    n_knots = n // cfg.step_interval + 2
    knots = cfg.delay_s + cfg.depth_s * rng.uniform(-1.0, 1.0, n_knots)
    knots[0] = cfg.delay_s
    return np.interp(np.arange(n), np.arange(n_knots) * cfg.step_interval, knots)


def _first_bad(mask) -> int | None:
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


def validate_track(cfg: EffectConfig, delays_s: np.ndarray) -> None:
    """Raise ConfigError naming the first sample whose delay the line cannot realize."""
    B = cfg.buffer_size
    if cfg.line == "fad":
        inc = B / (delays_s * cfg.fs)
        # tolerate rounding right at the ends of the range
        bad = _first_bad((inc < MIN_INCREMENT - 1e-12) | (inc > MAX_INCREMENT + 1e-12)
                         | ~np.isfinite(inc))
        lo, hi = B / (MAX_INCREMENT * cfg.fs), B / (MIN_INCREMENT * cfg.fs)
    else:
        d = delays_s * cfg.fs
        bad = _first_bad((d < 2.0) | (d > B - 2) | ~np.isfinite(d))
        lo, hi = 2.0 / cfg.fs, (B - 2) / cfg.fs
    if bad is not None:
        raise ConfigError(
            f"delay {delays_s[bad]:.6g} s at sample {bad} outside [{lo:.6g}, {hi:.6g}] s "
            f"for a {cfg.line} line with buffer {B}")


def make_line(cfg: EffectConfig):
    B = cfg.buffer_size
    if cfg.line == "fad":
        inc = np.clip(B / (cfg.delay_s * cfg.fs), MIN_INCREMENT, MAX_INCREMENT)
        return FadLine(B, cfg.fs, increment=inc)
    return FirLine(B, np.clip(cfg.delay_s * cfg.fs, 2.0, B - 2), erase_after_read=cfg.line == "fir-erase")


def apply_effect(cfg: EffectConfig, x) -> np.ndarray:
    """Stream `x` through the configured line and return the delayed signal."""
    x = np.asarray(x, dtype=np.float64)
    delays = delay_track(cfg, x.size)
    validate_track(cfg, delays)
    line = make_line(cfg)
    if cfg.line == "fad":
        inc = np.clip(cfg.buffer_size / (delays * cfg.fs), MIN_INCREMENT, MAX_INCREMENT)
        return line.process(x, inc)
    return line.process(x, delays * cfg.fs)
