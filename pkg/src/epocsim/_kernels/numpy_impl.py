"""Pure-numpy implementations of the hot kernels.

Reference semantics for the numba backend: both backends must return the
same values (see tests/test_kernels.py). The biquad cascade is a genuinely
sequential recursion, so this version runs a Python loop and is the slow
path; frame packing vectorizes cleanly with packbits/unpackbits.
"""

from __future__ import annotations

import numpy as np

_BIT_WEIGHTS = (1 << np.arange(13, -1, -1)).astype(np.uint16)  # MSB-first 14-bit weights


def sosfilt(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Run a cascade of biquad sections over ``x`` (direct form II transposed).

    ``sos`` rows are (b0, b1, b2, a1, a2) with a0 already normalized to 1.
    """
    y = np.asarray(x, dtype=np.float64).copy()
    for b0, b1, b2, a1, a2 in sos:
        s1 = 0.0
        s2 = 0.0
        for n in range(y.shape[0]):
            xn = y[n]
            yn = b0 * xn + s1
            s1 = b1 * xn - a1 * yn + s2
            s2 = b2 * xn - a2 * yn
            y[n] = yn
    return y


def pack_frame(header: np.ndarray, channels: np.ndarray, out: np.ndarray) -> None:
    """Pack one frame into ``out`` (33 zeroed uint8).

    header: int64[6] = counter, is_battery, battery_pct, gyro_x, gyro_y, quality_value.
    """
    counter, is_battery, battery_pct, gyro_x, gyro_y, quality = (int(v) for v in header)
    if is_battery:
        out[0] = 0x80 | battery_pct
    else:
        out[0] = counter
    bits = np.zeros(200, dtype=np.uint8)
    bits[:196] = ((channels[:, None].astype(np.uint16) >> np.arange(13, -1, -1)) & 1).ravel()
    out[1:26] = np.packbits(bits)
    out[26] = gyro_x + 128
    out[27] = gyro_y + 128
    out[28] = (quality >> 8) & 0x3F
    out[29] = quality & 0xFF
    # bytes 30-32 stay zero (reserved)


def unpack_frame(raw: np.ndarray, header_out: np.ndarray, channels_out: np.ndarray) -> None:
    """Unpack one 33-byte frame.

    header_out: int64[9] = counter, is_battery, battery_pct, gyro_x, gyro_y,
    quality_value, warn_pad_bits, warn_reserved, warn_quality_bits.
    """
    byte0 = int(raw[0])
    if byte0 & 0x80:
        header_out[0] = 0
        header_out[1] = 1
        header_out[2] = byte0 & 0x7F
    else:
        header_out[0] = byte0
        header_out[1] = 0
        header_out[2] = 0
    bits = np.unpackbits(raw[1:26])
    channels_out[:] = bits[:196].reshape(14, 14).astype(np.uint16) @ _BIT_WEIGHTS
    header_out[3] = int(raw[26]) - 128
    header_out[4] = int(raw[27]) - 128
    header_out[5] = ((int(raw[28]) & 0x3F) << 8) | int(raw[29])
    header_out[6] = 1 if bits[196:].any() else 0
    header_out[7] = 1 if (raw[30] or raw[31] or raw[32]) else 0
    header_out[8] = 1 if (int(raw[28]) & 0xC0) else 0
