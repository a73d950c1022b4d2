"""Numba-jitted kernels, value-identical to the numpy backend.

Compiled artifacts are cached on disk, so the JIT cost is paid once per
environment. All loops are serial: determinism matters more here than the
extra cores.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def sosfilt(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = x.astype(np.float64).copy()
    n_samples = y.shape[0]
    for s in range(sos.shape[0]):
        b0 = sos[s, 0]
        b1 = sos[s, 1]
        b2 = sos[s, 2]
        a1 = sos[s, 3]
        a2 = sos[s, 4]
        s1 = 0.0
        s2 = 0.0
        for n in range(n_samples):
            xn = y[n]
            yn = b0 * xn + s1
            s1 = b1 * xn - a1 * yn + s2
            s2 = b2 * xn - a2 * yn
            y[n] = yn
    return y


@njit(cache=True)
def pack_frame(header: np.ndarray, channels: np.ndarray, out: np.ndarray) -> None:
    counter = header[0]
    is_battery = header[1]
    battery_pct = header[2]
    if is_battery:
        out[0] = np.uint8(0x80 | battery_pct)
    else:
        out[0] = np.uint8(counter)
    bitpos = 0
    for i in range(14):
        v = channels[i]
        for b in range(13, -1, -1):
            if (v >> b) & 1:
                out[1 + (bitpos >> 3)] |= np.uint8(1 << (7 - (bitpos & 7)))
            bitpos += 1
    out[26] = np.uint8(header[3] + 128)
    out[27] = np.uint8(header[4] + 128)
    quality = header[5]
    out[28] = np.uint8((quality >> 8) & 0x3F)
    out[29] = np.uint8(quality & 0xFF)


@njit(cache=True)
def unpack_frame(raw: np.ndarray, header_out: np.ndarray, channels_out: np.ndarray) -> None:
    byte0 = raw[0]
    if byte0 & 0x80:
        header_out[0] = 0
        header_out[1] = 1
        header_out[2] = byte0 & 0x7F
    else:
        header_out[0] = byte0
        header_out[1] = 0
        header_out[2] = 0
    bitpos = 0
    for i in range(14):
        v = np.uint16(0)
        for _ in range(14):
            bit = (raw[1 + (bitpos >> 3)] >> (7 - (bitpos & 7))) & 1
            v = np.uint16((v << 1) | bit)
            bitpos += 1
        channels_out[i] = v
    header_out[3] = np.int64(raw[26]) - 128
    header_out[4] = np.int64(raw[27]) - 128
    header_out[5] = (np.int64(raw[28] & 0x3F) << 8) | np.int64(raw[29])
    header_out[6] = 1 if (raw[25] & 0x0F) else 0
    header_out[7] = 1 if (raw[30] or raw[31] or raw[32]) else 0
    header_out[8] = 1 if (raw[28] & 0xC0) else 0
