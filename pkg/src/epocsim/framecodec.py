"""Wire-frame codec for the 14-channel headset stream.

One frame is 33 octets:

    | Offset | Size | Field                                              |
    |--------|------|----------------------------------------------------|
    | 0      | 1    | bit7=0: data frame, bits0-6 = counter (0..127)     |
    |        |      | bit7=1: battery frame, bits0-6 = battery % (0..100)|
    | 1-25   | 25   | 14 channels x 14 bits, MSB-first, in channel order |
    |        |      | AF3..AF4; final 4 bits are zero padding            |
    | 26     | 1    | gyro_x + 128                                       |
    | 27     | 1    | gyro_y + 128                                       |
    | 28-29  | 2    | contact-quality value, 14 bits big-endian (top 2   |
    |        |      | bits zero); applies to channel (counter mod 14)    |
    | 30-32  | 3    | reserved, zero                                     |

Battery frames carry no counter; they are out-of-band status updates and
normalize to counter 0. Channel counts are unsigned 14-bit with mid-scale
(8192) representing 0 uV.

Transport applies a reversible byte mask: a 33-octet keystream derived
from a 16-octet key by a splitmix-style 64-bit mixer, XORed over the
frame. ``unmask_frame`` is the same operation. Capture files (``.efr``)
are masked frames concatenated back to back with no header.

Stream reassembly tolerates dropped frames: counter gaps up to 64 frames
(0.5 s) are filled by per-channel linear interpolation between the
bracketing samples so the 128 Hz grid is preserved; larger gaps are
treated as a disconnection and rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .channels import (
    ADC_MAX,
    ADC_MIDSCALE,
    CHANNEL_NAMES,
    LSB_MICROVOLTS,
    N_CHANNELS,
    SAMPLE_RATE,
)
from .recording import EegRecording

FRAME_SIZE = 33
KEY_SIZE = 16
COUNTER_MOD = 128
MAX_REPAIRABLE_GAP = 64

RawFrame = bytes
"""A frame on the wire: exactly 33 octets."""


class FrameError(ValueError):
    """Malformed frame, invalid field value, or unrecoverable stream damage."""


@dataclass(frozen=True)
class DecodedFrame:
    """One decoded frame.

    ``quality_channel`` is fixed by the protocol to ``counter mod 14`` and
    is validated rather than stored on the wire. ``warnings`` lists
    recoverable wire anomalies (nonzero padding or reserved bytes) noticed
    while decoding; it does not participate in equality.
    """

    counter: int
    channels: tuple[int, ...]
    gyro_x: int = 0
    gyro_y: int = 0
    quality_value: int = 0
    quality_channel: Optional[int] = None
    is_battery: bool = False
    battery_pct: int = 0
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(int(c) for c in self.channels))
        if self.quality_channel is None:
            object.__setattr__(self, "quality_channel", self.counter % N_CHANNELS)
        _validate_frame(self)


def _validate_frame(f: DecodedFrame) -> None:
    if f.is_battery:
        if f.counter != 0:
            raise FrameError("battery frames carry no counter; normalize it to 0")
        if not 0 <= f.battery_pct <= 100:
            raise FrameError(f"battery_pct {f.battery_pct} outside 0..100")
    else:
        if not 0 <= f.counter < COUNTER_MOD:
            raise FrameError(f"counter {f.counter} outside 0..127")
        if f.battery_pct != 0:
            raise FrameError("battery_pct only valid on battery frames")
    if len(f.channels) != N_CHANNELS:
        raise FrameError(f"expected {N_CHANNELS} channel counts, got {len(f.channels)}")
    for i, c in enumerate(f.channels):
        if not 0 <= c <= ADC_MAX:
            raise FrameError(f"channel {CHANNEL_NAMES[i]} count {c} outside 0..{ADC_MAX}")
    if not -128 <= f.gyro_x <= 127 or not -128 <= f.gyro_y <= 127:
        raise FrameError(f"gyro values ({f.gyro_x}, {f.gyro_y}) outside -128..127")
    if not 0 <= f.quality_value <= ADC_MAX:
        raise FrameError(f"quality_value {f.quality_value} outside 0..{ADC_MAX}")
    if f.quality_channel != f.counter % N_CHANNELS:
        raise FrameError(
            f"quality_channel {f.quality_channel} inconsistent with counter "
            f"{f.counter} (must be counter mod {N_CHANNELS})"
        )


def encode_frame(frame: DecodedFrame) -> RawFrame:
    """Serialize a frame to its 33-octet wire form."""
    _validate_frame(frame)
    header = np.array(
        [frame.counter, int(frame.is_battery), frame.battery_pct,
         frame.gyro_x, frame.gyro_y, frame.quality_value],
        dtype=np.int64,
    )
    chans = np.array(frame.channels, dtype=np.uint16)
    out = np.zeros(FRAME_SIZE, dtype=np.uint8)
    _kernels.pack_frame(header, chans, out)
    return out.tobytes()


def decode_frame(raw: RawFrame) -> DecodedFrame:
    """Parse 33 octets into a DecodedFrame.

    Nonzero padding or reserved bytes are tolerated and reported through
    the frame's ``warnings`` field instead of failing the decode.
    """
    if len(raw) != FRAME_SIZE:
        raise FrameError(f"frame must be {FRAME_SIZE} octets, got {len(raw)}")
    arr = np.frombuffer(raw, dtype=np.uint8)
    header = np.zeros(9, dtype=np.int64)
    chans = np.zeros(N_CHANNELS, dtype=np.uint16)
    _kernels.unpack_frame(arr, header, chans)
    warnings = []
    if header[6]:
        warnings.append("nonzero channel padding bits")
    if header[8]:
        warnings.append("nonzero quality padding bits")
    if header[7]:
        warnings.append("nonzero reserved bytes")
    return DecodedFrame(
        counter=int(header[0]),
        channels=tuple(int(c) for c in chans),
        gyro_x=int(header[3]),
        gyro_y=int(header[4]),
        quality_value=int(header[5]),
        is_battery=bool(header[1]),
        battery_pct=int(header[2]),
        warnings=tuple(warnings),
    )


# --- transport masking -------------------------------------------------

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def keystream(key: bytes) -> bytes:
    """33-octet keystream for ``key`` (16 octets).

    The two little-endian 64-bit key halves are absorbed into the mixer
    state, then five successive splitmix outputs are emitted little-endian
    and truncated to 33 octets.
    """
    if len(key) != KEY_SIZE:
        raise FrameError(f"mask key must be {KEY_SIZE} octets, got {len(key)}")
    state = 0
    for half in (key[:8], key[8:]):
        state = _mix64(state ^ int.from_bytes(half, "little"))
    out = bytearray()
    for _ in range(5):
        state = (state + _GAMMA) & _MASK64
        out += _mix64(state).to_bytes(8, "little")
    return bytes(out[:FRAME_SIZE])


def mask_frame(raw: RawFrame, key: bytes) -> RawFrame:
    """XOR the frame with the key-derived keystream (its own inverse)."""
    if len(raw) != FRAME_SIZE:
        raise FrameError(f"frame must be {FRAME_SIZE} octets, got {len(raw)}")
    ks = keystream(key)
    return bytes(a ^ b for a, b in zip(raw, ks))


def unmask_frame(raw: RawFrame, key: bytes) -> RawFrame:
    return mask_frame(raw, key)


# --- count/microvolt conversion ----------------------------------------


def counts_to_microvolts(count, lsb_uv: float = LSB_MICROVOLTS):
    """Map raw ADC counts to microvolts: ``(count - 8192) * lsb_uv``.

    Accepts a scalar or an ndarray; rejects counts outside 0..16383.
    """
    arr = np.asarray(count)
    if arr.min() < 0 or arr.max() > ADC_MAX:
        raise FrameError(f"count outside 0..{ADC_MAX}")
    uv = (arr.astype(np.float64) - ADC_MIDSCALE) * lsb_uv
    return float(uv) if np.isscalar(count) else uv


def microvolts_to_counts(uv, lsb_uv: float = LSB_MICROVOLTS):
    """Quantize microvolts to ADC counts, rounding and clamping to 14 bits."""
    counts = np.rint(np.asarray(uv, dtype=np.float64) / lsb_uv) + ADC_MIDSCALE
    counts = np.clip(counts, 0, ADC_MAX).astype(np.int64)
    return int(counts) if np.isscalar(uv) else counts


# --- stream reassembly --------------------------------------------------


@dataclass
class DropReport:
    """Accounting of dropped frames over one assembled stream.

    ``gaps`` holds ``(position, missing_count)`` pairs where position is
    the output sample index of the first interpolated sample of that gap.
    """

    expected_frames: int
    received_frames: int
    gaps: list[tuple[int, int]]
    repaired: int

    def __post_init__(self) -> None:
        missing = sum(m for _, m in self.gaps)
        if self.expected_frames != self.received_frames + missing:
            raise ValueError(
                f"drop report does not balance: expected {self.expected_frames} "
                f"!= received {self.received_frames} + missing {missing}"
            )


def assemble_stream(
    frames: Sequence[DecodedFrame], lsb_uv: float = LSB_MICROVOLTS
) -> tuple[EegRecording, DropReport]:
    """Rebuild a recording from decoded frames.

    Counter gaps of up to 64 consecutive frames are repaired by linear
    interpolation per channel (gyro likewise, rounded to integers), so the
    output always has one sample per counter tick. Battery frames update
    the battery state and contribute no sample. Gaps beyond 64 frames mean
    the headset disconnected; those raise FrameError.
    """
    battery_pct: Optional[int] = None
    data_frames = []
    for f in frames:
        if f.is_battery:
            battery_pct = f.battery_pct
        else:
            data_frames.append(f)
    if not data_frames:
        raise FrameError("stream contains no data frames")

    counters = np.array([f.counter for f in data_frames], dtype=np.int64)
    missing = (np.diff(counters) - 1) % COUNTER_MOD
    if missing.size and missing.max() > MAX_REPAIRABLE_GAP:
        raise FrameError(
            f"counter gap of {int(missing.max())} frames exceeds the repairable "
            f"maximum of {MAX_REPAIRABLE_GAP}; treating stream as disconnected"
        )

    pos = np.concatenate([[0], np.cumsum(missing + 1)])
    total = int(pos[-1]) + 1
    counts = np.array([f.channels for f in data_frames], dtype=np.float64)
    uv = (counts - ADC_MIDSCALE) * lsb_uv

    idx = np.arange(total)
    data = np.empty((N_CHANNELS, total), dtype=np.float64)
    for ch in range(N_CHANNELS):
        data[ch] = np.interp(idx, pos, uv[:, ch])

    gx = np.array([f.gyro_x for f in data_frames], dtype=np.float64)
    gy = np.array([f.gyro_y for f in data_frames], dtype=np.float64)
    gyro = np.stack(
        [
            np.rint(np.interp(idx, pos, gx)).astype(np.int16),
            np.rint(np.interp(idx, pos, gy)).astype(np.int16),
        ],
        axis=1,
    )

    gaps = [
        (int(pos[i]) + 1, int(m))
        for i, m in enumerate(missing)
        if m > 0
    ]
    report = DropReport(
        expected_frames=total,
        received_frames=len(data_frames),
        gaps=gaps,
        repaired=total - len(data_frames),
    )
    rec = EegRecording(
        data=data,
        rate=SAMPLE_RATE,
        labels=CHANNEL_NAMES,
        gyro=gyro,
        battery_pct=battery_pct,
    )
    return rec, report


def frames_from_recording(
    recording: EegRecording,
    lsb_uv: float = LSB_MICROVOLTS,
    start_counter: int = 0,
    quality_value: int = 16000,
) -> list[DecodedFrame]:
    """Quantize a recording into a contiguous frame sequence.

    The inverse of assemble_stream up to 14-bit quantization, which is the
    only lossy step of the acquisition round trip.
    """
    if recording.n_channels != N_CHANNELS:
        raise FrameError(f"need a {N_CHANNELS}-channel recording, got {recording.n_channels}")
    counts = microvolts_to_counts(recording.data, lsb_uv)
    gyro = recording.gyro
    frames = []
    for n in range(recording.n_samples):
        counter = (start_counter + n) % COUNTER_MOD
        frames.append(
            DecodedFrame(
                counter=counter,
                channels=tuple(int(c) for c in counts[:, n]),
                gyro_x=int(gyro[n, 0]) if gyro is not None else 0,
                gyro_y=int(gyro[n, 1]) if gyro is not None else 0,
                quality_value=quality_value,
            )
        )
    return frames


# --- capture files -------------------------------------------------------


def write_efr(path, raw_frames: Iterable[RawFrame]) -> None:
    """Write raw frames to a capture file (concatenated, no header)."""
    with open(path, "wb") as fh:
        for raw in raw_frames:
            if len(raw) != FRAME_SIZE:
                raise FrameError(f"frame must be {FRAME_SIZE} octets, got {len(raw)}")
            fh.write(raw)


def read_efr(path) -> list[RawFrame]:
    """Read a capture file back into a list of raw frames."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) % FRAME_SIZE:
        raise FrameError(
            f"capture length {len(blob)} is not a multiple of {FRAME_SIZE} octets"
        )
    return [blob[i : i + FRAME_SIZE] for i in range(0, len(blob), FRAME_SIZE)]
