"""16-bit PCM mono WAV in and out; everything inside the package is float64."""

from __future__ import annotations

import wave

import numpy as np


class WavFormatError(IOError):
    pass


def read_wav(path) -> tuple[np.ndarray, int]:
    """Return samples scaled to [-1, 1) and the sample rate."""
    try:
        with wave.open(str(path), "rb") as w:
            ch, width, rate, n = w.getnchannels(), w.getsampwidth(), w.getframerate(), w.getnframes()
            comp = w.getcomptype()
            raw = w.readframes(n)
    except (wave.Error, EOFError) as exc:
        raise WavFormatError(f"{path}: not a readable PCM WAV file ({exc})") from exc
    if comp != "NONE" or width != 2 or ch != 1:
        raise WavFormatError(
            f"{path}: need 16-bit PCM mono, got {ch} channel(s), {8 * width}-bit, compression {comp}")
    return np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0, rate


def to_int16(x) -> np.ndarray:
    """Saturating conversion of [-1, 1) floats to int16."""
    return np.clip(np.round(np.asarray(x, dtype=np.float64) * 32768.0), -32768, 32767).astype("<i2")


def write_wav(path, x, rate: int) -> None:
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(rate))
        w.writeframes(to_int16(x).tobytes())
