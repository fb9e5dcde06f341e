"""Compiled per-sample kernels for both line types.

The same step functions back the block `process` methods of the line
classes and the throughput benchmark, so timed code is the code under test.
Buffer indices wrap by a single conditional add/subtract, never `%`.
"""

from __future__ import annotations

import math

import numba
import numpy as np

# 1.5 * 2**52: adding it rounds a double to an integer in the low mantissa bits
_MAGIC = 6755399441055744.0


@numba.njit(cache=True, inline="always")
def fast_floor(x):
    """Floor via the magic-number rounding trick plus a one-step correction."""
    r = (x + _MAGIC) - _MAGIC
    if r > x:
        r -= 1.0
    return int(r)


@numba.njit(cache=True, inline="always")
def _floor(x, fast):
    if fast:
        return fast_floor(x)
    return int(math.floor(x))


@numba.njit(cache=True, inline="always")
def _interp(d, newest, mid, oldest):
    return d * (1.0 + d) / 2.0 * newest + (1.0 + d) * (1.0 - d) * mid - d * (1.0 - d) / 2.0 * oldest


# --------------------------------------------------------------------------
# FAD line
# --------------------------------------------------------------------------

@numba.njit(cache=True, inline="always")
def fad_step(buf, counts, phase, phase_old, step, x1, x2, xn, fast):
    """One tick of the single-pointer line. Returns (output, phase_old, n_writes)."""
    B = buf.shape[0]
    fph = _floor(phase, fast)
    frac = phase - fph
    i1 = fph + 1
    if i1 >= B:
        i1 -= B
    i2 = i1 + 1
    if i2 >= B:
        i2 -= B
    y = _interp(1.0 - frac, buf[fph], buf[i1], buf[i2])

    nw = fph - phase_old
    if nw < 0:
        nw += B
    c = phase_old
    for j in range(nw):
        c += 1
        if c >= B:
            c -= B
        dw = 1.0 - (frac + (nw - 1 - j)) / step
        buf[c] = _interp(dw, xn, x1, x2)
        if counts.shape[0] > 0:
            counts[c] += 1
    return y, fph, nw


@numba.njit(cache=True)
def fad_process(buf, state, x, inc, out, counts, fast):
    """Run a block. `state` = [phase, phase_old, step, x1, x2, writes], updated in place."""
    B = buf.shape[0]
    phase = state[0]
    phase_old = int(state[1])
    step = state[2]
    x1 = state[3]
    x2 = state[4]
    writes = 0
    for n in range(x.shape[0]):
        xn = x[n]
        y, phase_old, nw = fad_step(buf, counts, phase, phase_old, step, x1, x2, xn, fast)
        out[n] = y
        writes += nw
        x2 = x1
        x1 = xn
        step = inc[n]
        phase += step
        if phase >= B:
            phase -= B
    state[0] = phase
    state[1] = phase_old
    state[2] = step
    state[3] = x1
    state[4] = x2
    state[5] += writes


# --------------------------------------------------------------------------
# FIR (two-pointer) line
# --------------------------------------------------------------------------

@numba.njit(cache=True, inline="always")
def fir_read(buf, w, delay, fast):
    """Interpolated read `delay` samples behind write index `w`. Returns (y, oldest cell offset)."""
    B = buf.shape[0]
    m = _floor(delay + 0.5, fast)
    d = m - delay
    r = w - m
    if r < 0:
        r += B
    rn = r + 1
    if rn >= B:
        rn -= B
    ro = r - 1
    if ro < 0:
        ro += B
    return _interp(d, buf[rn], buf[r], buf[ro]), m + 1


@numba.njit(cache=True)
def fir_process(buf, state, x, delays, out, erase, fast):
    """Run a block. `state` = [write_idx, erase_frontier_lag] (int64), updated in place.

    Write first, then read. With erase on, every cell older than the read
    stencil that the stencil has moved past since the last tick is zeroed.
    `state[1]` holds how many samples behind the write index the erase
    frontier sits (-1 before the first tick).
    """
    B = buf.shape[0]
    w = state[0]
    lag = state[1]
    for n in range(x.shape[0]):
        buf[w] = x[n]
        y, oldest = fir_read(buf, w, delays[n], fast)
        out[n] = y
        if erase:
            # frontier lag grows by one per tick as the writer moves on
            if lag < 0:
                lag = oldest
            elif lag > oldest:
                k = lag - oldest
                if k > B:
                    k = B
                c = w - lag
                while c < 0:
                    c += B
                for _ in range(k):
                    buf[c] = 0.0
                    c += 1
                    if c >= B:
                        c -= B
                lag = oldest
        w += 1
        if w >= B:
            w -= B
        if erase and lag >= 0:
            lag += 1
    state[0] = w
    state[1] = lag


# --------------------------------------------------------------------------
# benchmark kernels: cyclic read of a fixed input table, outputs folded into a checksum
# --------------------------------------------------------------------------

@numba.njit(cache=True)
def bench_fad(buf, x, n_ticks, inc, fast):
    B = buf.shape[0]
    L = x.shape[0]
    counts = np.zeros(0, dtype=np.int64)
    phase = 0.0
    phase_old = B - 1
    step = inc
    x1 = 0.0
    x2 = 0.0
    acc = 0.0
    k = 0
    for _ in range(n_ticks):
        xn = x[k]
        k += 1
        if k >= L:
            k = 0
        y, phase_old, nw = fad_step(buf, counts, phase, phase_old, step, x1, x2, xn, fast)
        acc += y
        x2 = x1
        x1 = xn
        phase += inc
        if phase >= B:
            phase -= B
    return acc


@numba.njit(cache=True)
def bench_fir(buf, x, n_ticks, delay, fast):
    B = buf.shape[0]
    L = x.shape[0]
    acc = 0.0
    w = 0
    k = 0
    for _ in range(n_ticks):
        buf[w] = x[k]
        k += 1
        if k >= L:
            k = 0
        y, _o = fir_read(buf, w, delay, fast)
        acc += y
        w += 1
        if w >= B:
            w -= B
    return acc


@numba.njit(cache=True)
def bench_fir_no_increment(buf, x, n_ticks, delay, fast):
    """FIR kernel with the pointer update removed: every access hits the same cells."""
    L = x.shape[0]
    acc = 0.0
    w = buf.shape[0] - 1
    k = 0
    for _ in range(n_ticks):
        buf[w] = x[k]
        k += 1
        if k >= L:
            k = 0
        y, _o = fir_read(buf, w, delay, fast)
        acc += y
    return acc
