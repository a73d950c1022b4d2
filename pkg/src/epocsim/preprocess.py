"""Baseline removal and zero-phase IIR filtering.

Filters are second-order biquad sections (audio-cookbook coefficients)
run forward then backward per channel, so the net phase response is zero
and event timing survives filtering. Band-pass cascades a high-pass and a
low-pass section. Before filtering, each channel is padded by odd
reflection for three settle lengths of the slowest pole so the short
1-second epochs this pipeline works with don't show startup transients.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .recording import EegRecording


class FilterKind(enum.Enum):
    LOW_PASS = "lowpass"
    HIGH_PASS = "highpass"
    BAND_PASS = "bandpass"
    NOTCH = "notch"


BUTTERWORTH_Q = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class FilterSpec:
    kind: FilterKind
    f_lo: Optional[float] = None
    f_hi: Optional[float] = None
    notch_freq: Optional[float] = None
    q: float = BUTTERWORTH_Q

    def __post_init__(self) -> None:
        if self.q <= 0:
            raise ValueError(f"q must be positive, got {self.q}")
        needed = {
            FilterKind.LOW_PASS: ("f_hi",),
            FilterKind.HIGH_PASS: ("f_lo",),
            FilterKind.BAND_PASS: ("f_lo", "f_hi"),
            FilterKind.NOTCH: ("notch_freq",),
        }[self.kind]
        for name in needed:
            val = getattr(self, name)
            if val is None or val <= 0:
                raise ValueError(f"{self.kind.value} filter needs positive {name}, got {val}")
        if self.kind is FilterKind.BAND_PASS and not self.f_lo < self.f_hi:
            raise ValueError(f"band-pass needs f_lo < f_hi, got {self.f_lo} >= {self.f_hi}")

    @classmethod
    def low_pass(cls, f_hi: float, q: float = BUTTERWORTH_Q) -> "FilterSpec":
        return cls(FilterKind.LOW_PASS, f_hi=f_hi, q=q)

    @classmethod
    def high_pass(cls, f_lo: float, q: float = BUTTERWORTH_Q) -> "FilterSpec":
        return cls(FilterKind.HIGH_PASS, f_lo=f_lo, q=q)

    @classmethod
    def band_pass(cls, f_lo: float, f_hi: float, q: float = BUTTERWORTH_Q) -> "FilterSpec":
        return cls(FilterKind.BAND_PASS, f_lo=f_lo, f_hi=f_hi, q=q)

    @classmethod
    def notch(cls, notch_freq: float, q: float = 10.0) -> "FilterSpec":
        return cls(FilterKind.NOTCH, notch_freq=notch_freq, q=q)


def _biquad(kind: str, f0: float, q: float, rate: float) -> tuple[float, float, float, float, float]:
    """One cookbook biquad, normalized to a0 = 1: returns (b0, b1, b2, a1, a2)."""
    w0 = 2.0 * math.pi * f0 / rate
    cos_w0 = math.cos(w0)
    alpha = math.sin(w0) / (2.0 * q)
    if kind == "lowpass":
        b0 = (1.0 - cos_w0) / 2.0
        b1 = 1.0 - cos_w0
        b2 = b0
    elif kind == "highpass":
        b0 = (1.0 + cos_w0) / 2.0
        b1 = -(1.0 + cos_w0)
        b2 = b0
    elif kind == "notch":
        b0 = 1.0
        b1 = -2.0 * cos_w0
        b2 = 1.0
    else:
        raise ValueError(f"unknown biquad kind {kind!r}")
    a0 = 1.0 + alpha
    a1 = -2.0 * cos_w0
    a2 = 1.0 - alpha
    return (b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0)


def design_sos(spec: FilterSpec, rate: float) -> np.ndarray:
    """Second-order sections for ``spec`` at ``rate``; rows are (b0,b1,b2,a1,a2)."""
    nyquist = rate / 2.0
    for name in ("f_lo", "f_hi", "notch_freq"):
        val = getattr(spec, name)
        if val is not None and val >= nyquist:
            raise ValueError(f"{name}={val} Hz is at or above Nyquist ({nyquist} Hz)")
    if spec.kind is FilterKind.LOW_PASS:
        rows = [_biquad("lowpass", spec.f_hi, spec.q, rate)]
    elif spec.kind is FilterKind.HIGH_PASS:
        rows = [_biquad("highpass", spec.f_lo, spec.q, rate)]
    elif spec.kind is FilterKind.BAND_PASS:
        rows = [
            _biquad("highpass", spec.f_lo, spec.q, rate),
            _biquad("lowpass", spec.f_hi, spec.q, rate),
        ]
    else:
        rows = [_biquad("notch", spec.notch_freq, spec.q, rate)]
    return np.array(rows, dtype=np.float64)


def _settle_samples(spec: FilterSpec, rate: float) -> int:
    # Characteristic frequency: the slowest cutoff, or the notch bandwidth.
    if spec.kind is FilterKind.LOW_PASS:
        f_char = spec.f_hi
    elif spec.kind is FilterKind.NOTCH:
        f_char = spec.notch_freq / spec.q
    else:
        f_char = spec.f_lo
    return int(math.ceil(3.0 * rate / f_char))


def filter_signal(x: np.ndarray, spec: FilterSpec, rate: float) -> np.ndarray:
    """Zero-phase filter one channel: pad, run the cascade forward and backward, trim."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("need a 1-D signal of at least 2 samples")
    sos = design_sos(spec, rate)
    n = x.shape[0]
    pad = min(n - 1, _settle_samples(spec, rate))
    if pad > 0:
        left = 2.0 * x[0] - x[pad:0:-1]
        right = 2.0 * x[-1] - x[-2 : -pad - 2 : -1]
        padded = np.concatenate([left, x, right])
    else:
        padded = x
    y = _kernels.sosfilt(sos, np.ascontiguousarray(padded))
    y = _kernels.sosfilt(sos, np.ascontiguousarray(y[::-1]))
    y = y[::-1]
    return np.ascontiguousarray(y[pad : pad + n])


def apply_filter(recording: EegRecording, spec: FilterSpec) -> EegRecording:
    """Zero-phase filter every channel of a recording."""
    out = np.empty_like(recording.data)
    for ch in range(recording.n_channels):
        out[ch] = filter_signal(recording.data[ch], spec, recording.rate)
    return recording.with_data(out)


def remove_baseline(recording: EegRecording) -> EegRecording:
    """Subtract each channel's mean so every channel is zero-centered."""
    if recording.n_samples == 0:
        raise ValueError("cannot remove baseline from an empty recording")
    return recording.with_data(recording.data - recording.data.mean(axis=1, keepdims=True))
