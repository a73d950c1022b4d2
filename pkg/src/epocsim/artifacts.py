"""Detectors for the three artifact classes visible in raw traces.

* disconnection: the slow drift wave shows a sudden, persistent level
  jump on one channel. Detected on a 5 Hz low-passed copy by comparing
  0.25 s trailing and leading medians and requiring the shift to persist
  for a further 0.25 s.
* ocular: eye movements are slow transients with opposite polarity over
  the left and right frontal sites. Detected on a 0.2-5 Hz band-passed
  copy when the two frontal hemisphere means exceed the threshold with
  opposite signs.
* muscle: a broadband burst. Detected as 0.25 s windows whose 20-45 Hz
  power exceeds a multiple of that channel's median window power, on at
  least ``min_channels`` channels at once (a lone channel spike is a
  disconnection edge, not muscle activity).

All detectors are pure functions of the recording and invariant to a
constant offset on every channel.
"""

from __future__ import annotations

import numpy as np

from .channels import OCULAR_LEFT, OCULAR_RIGHT
from .events import ArtifactEvent, ArtifactKind
from .preprocess import FilterSpec, filter_signal
from .recording import EegRecording

DISCONNECT_JUMP_UV = 150.0
OCULAR_AMP_UV = 30.0
MUSCLE_POWER_RATIO = 5.0

_SHIFT_WINDOW_S = 0.25
_MUSCLE_BAND = (20.0, 45.0)


def _require_min_duration(recording: EegRecording, seconds: float) -> None:
    if recording.duration_s < seconds:
        raise ValueError(
            f"recording of {recording.duration_s:.3f} s is shorter than the "
            f"{seconds} s the detector needs"
        )


def _merge_runs(flags: np.ndarray, max_gap: int) -> list[tuple[int, int]]:
    """Contiguous [start, end) index runs of True, merging gaps <= max_gap."""
    idx = np.flatnonzero(flags)
    if idx.size == 0:
        return []
    runs = []
    start = prev = int(idx[0])
    for i in idx[1:]:
        if i - prev <= max_gap:
            prev = int(i)
        else:
            runs.append((start, prev + 1))
            start = prev = int(i)
    runs.append((start, prev + 1))
    return runs


def detect_disconnection(
    recording: EegRecording, jump_threshold: float = DISCONNECT_JUMP_UV
) -> list[ArtifactEvent]:
    """Find persistent level jumps, one event per channel per shift."""
    _require_min_duration(recording, 1.0)
    w = int(round(_SHIFT_WINDOW_S * recording.rate))
    n = recording.n_samples
    events = []
    spec = FilterSpec.low_pass(5.0)
    for row, label in enumerate(recording.labels):
        x = filter_signal(recording.data[row], spec, recording.rate)
        meds = np.median(np.lib.stride_tricks.sliding_window_view(x, w), axis=1)
        # meds[i] covers x[i : i+w]; candidate boundary at sample i+w.
        trail = meds[: n - 3 * w + 1]
        lead1 = meds[w : n - 2 * w + 1]
        lead2 = meds[2 * w : n - w + 1]
        shift = np.abs(lead1 - trail)
        flags = (shift > jump_threshold) & (np.abs(lead2 - trail) > jump_threshold)
        for start, end in _merge_runs(flags, max_gap=w):
            # Boundary indices of the run, then refine onset to the
            # steepest slope of the low-passed trace (zero-phase filtering
            # keeps that aligned with the true jump).
            b0 = start + w
            b1 = min(end + w + w, n - 1)
            seg_diff = np.abs(np.diff(x[max(b0 - w, 0) : b1]))
            onset = max(b0 - w, 0) + int(np.argmax(seg_diff)) + 1
            score = float(shift[start:end].max() / jump_threshold)
            events.append(
                ArtifactEvent(
                    kind=ArtifactKind.DISCONNECTION,
                    t_start=onset / recording.rate,
                    t_end=recording.duration_s,
                    channels=frozenset({label}),
                    score=score,
                )
            )
    return sorted(events, key=lambda e: (e.t_start, sorted(e.channels)))


def detect_ocular(
    recording: EegRecording, amp_threshold: float = OCULAR_AMP_UV
) -> list[ArtifactEvent]:
    """Find opposite-polarity slow transients over the frontal hemispheres."""
    spec = FilterSpec.band_pass(0.2, 5.0)
    filtered = {}
    for label in OCULAR_LEFT + OCULAR_RIGHT:
        filtered[label] = filter_signal(recording.channel(label), spec, recording.rate)
    left = np.mean([filtered[c] for c in OCULAR_LEFT], axis=0)
    right = np.mean([filtered[c] for c in OCULAR_RIGHT], axis=0)
    flags = ((left > amp_threshold) & (right < -amp_threshold)) | (
        (left < -amp_threshold) & (right > amp_threshold)
    )
    gap = int(round(_SHIFT_WINDOW_S * recording.rate))
    events = []
    strength = np.minimum(np.abs(left), np.abs(right))
    for start, end in _merge_runs(flags, max_gap=gap):
        events.append(
            ArtifactEvent(
                kind=ArtifactKind.OCULAR,
                t_start=start / recording.rate,
                t_end=end / recording.rate,
                channels=frozenset(OCULAR_LEFT + OCULAR_RIGHT),
                score=float(strength[start:end].max() / amp_threshold),
            )
        )
    return events


def detect_muscle(
    recording: EegRecording,
    power_ratio_threshold: float = MUSCLE_POWER_RATIO,
    min_channels: int = 2,
) -> list[ArtifactEvent]:
    """Find broadband high-frequency bursts shared across channels."""
    _require_min_duration(recording, 1.0)
    w = int(round(_SHIFT_WINDOW_S * recording.rate))
    spec = FilterSpec.band_pass(*_MUSCLE_BAND)
    n_windows = recording.n_samples // w
    power = np.empty((recording.n_channels, n_windows))
    for row in range(recording.n_channels):
        bp = filter_signal(recording.data[row], spec, recording.rate)
        trimmed = bp[: n_windows * w].reshape(n_windows, w)
        power[row] = np.mean(trimmed**2, axis=1)
    med = np.median(power, axis=1, keepdims=True)
    ratio = power / np.maximum(med, 1e-12)
    chan_flags = (ratio > power_ratio_threshold) & (power > 0)
    win_flags = chan_flags.sum(axis=0) >= min_channels
    events = []
    for start, end in _merge_runs(win_flags, max_gap=1):
        chans = {
            recording.labels[row]
            for row in range(recording.n_channels)
            if chan_flags[row, start:end].any()
        }
        events.append(
            ArtifactEvent(
                kind=ArtifactKind.MUSCLE,
                t_start=start * w / recording.rate,
                t_end=end * w / recording.rate,
                channels=frozenset(chans),
                score=float(ratio[:, start:end].max()),
            )
        )
    return events
