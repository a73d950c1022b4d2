"""Ground-truthed synthetic recordings for the eyes-open/closed protocol.

Every channel is the sum of three parts: pink background noise (1/f
amplitude shaping, independent per channel), a slow drift sinusoid shared
by all channels, and an alpha-band oscillation whose amplitude depends on
the recorded condition and on where the channel sits (occipital sites get
the full amplitude, everything else a reduced gain). The alpha oscillation
is one waveform scaled per channel, with optional per-sample frequency
jitter that widens its spectral peak.

Closing the eyes raises the alpha amplitude; a background-conversation
distractor condition keeps the eyes closed but shrinks the amplitude to
60% and doubles the frequency jitter, so the peak is weaker and broader.

Everything is deterministic given (profile, seed, condition).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channels import (
    CHANNEL_NAMES,
    LEFT_CHANNELS,
    N_CHANNELS,
    OCCIPITAL_CHANNELS,
    SAMPLE_RATE,
)
from .events import ArtifactEvent, ArtifactKind
from .recording import EegRecording

DISTRACTOR_AMP_FACTOR = 0.6
DISTRACTOR_JITTER_FACTOR = 2.0

OCULAR_DURATION_S = 0.8
MUSCLE_DURATION_S = 0.5


class Condition(enum.Enum):
    EYES_OPEN = "eyes_open"
    EYES_CLOSED = "eyes_closed"
    EYES_CLOSED_DISTRACTOR = "eyes_closed_distractor"


@dataclass(frozen=True)
class SubjectProfile:
    """Tunable generator parameters for one synthetic subject."""

    alpha_freq: float = 10.0          # Hz, must sit in the 8-12 alpha band
    alpha_amp_closed: float = 20.0    # uV, occipital alpha with eyes closed
    alpha_amp_open: float = 4.0       # uV, residual alpha with eyes open
    alpha_bw_jitter: float = 0.5      # Hz std-dev of per-sample frequency jitter
    occipital_gain: float = 1.0
    frontal_gain: float = 0.4
    noise_rms: float = 8.0            # uV, pink-noise floor per channel
    drift_amp: float = 200.0          # uV, slow common-mode wander
    drift_freq: float = 0.3           # Hz
    seed: int = 0

    def __post_init__(self) -> None:
        if not 8.0 <= self.alpha_freq <= 12.0:
            raise ValueError(f"alpha_freq must lie in 8..12 Hz, got {self.alpha_freq}")
        for name in (
            "alpha_amp_closed", "alpha_amp_open", "alpha_bw_jitter",
            "occipital_gain", "frontal_gain", "noise_rms", "drift_amp", "drift_freq",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass
class GroundTruth:
    condition: Condition
    artifact_events: list[ArtifactEvent] = field(default_factory=list)
    alpha_amp_used: np.ndarray = field(default_factory=lambda: np.zeros(N_CHANNELS))


def _condition_params(profile: SubjectProfile, condition: Condition) -> tuple[float, float]:
    """(alpha amplitude, frequency jitter std) for a condition."""
    if condition is Condition.EYES_OPEN:
        return profile.alpha_amp_open, profile.alpha_bw_jitter
    if condition is Condition.EYES_CLOSED:
        return profile.alpha_amp_closed, profile.alpha_bw_jitter
    return (
        profile.alpha_amp_closed * DISTRACTOR_AMP_FACTOR,
        profile.alpha_bw_jitter * DISTRACTOR_JITTER_FACTOR,
    )


def _pink_noise(rng: np.random.Generator, n: int, rms: float, rate: float) -> np.ndarray:
    """1/f-amplitude-shaped noise, normalized to the requested RMS."""
    if rms == 0.0:
        return np.zeros(n)
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, 1.0 / rate)
    shape = np.zeros_like(freqs)
    shape[1:] = 1.0 / np.sqrt(freqs[1:])
    x = np.fft.irfft(spec * shape, n)
    std = x.std()
    if std == 0.0:
        return np.zeros(n)
    return x * (rms / std)


def generate_recording(
    profile: SubjectProfile,
    condition: Condition,
    duration_s: float,
    rate: float = SAMPLE_RATE,
) -> tuple[EegRecording, GroundTruth]:
    """Synthesize one condition block of ``duration_s`` seconds."""
    if duration_s <= 0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    n = int(round(duration_s * rate))
    cond_index = list(Condition).index(condition)
    rng = np.random.default_rng([profile.seed, cond_index])
    t = np.arange(n) / rate

    amp, jitter = _condition_params(profile, condition)

    # Draw order is fixed: alpha jitter, drift phase, per-channel noise, gyro.
    if jitter > 0:
        freqs = profile.alpha_freq + jitter * rng.standard_normal(n)
        inc = 2.0 * np.pi * freqs / rate
        phase = np.cumsum(inc) - inc[0]
    else:
        phase = 2.0 * np.pi * profile.alpha_freq * t
    alpha = np.sin(phase)

    drift_phase = rng.uniform(0.0, 2.0 * np.pi) if profile.drift_amp > 0 else 0.0
    drift = profile.drift_amp * np.sin(2.0 * np.pi * profile.drift_freq * t + drift_phase)

    gains = np.array(
        [
            profile.occipital_gain if name in OCCIPITAL_CHANNELS else profile.frontal_gain
            for name in CHANNEL_NAMES
        ]
    )
    data = np.empty((N_CHANNELS, n))
    for ch in range(N_CHANNELS):
        noise = _pink_noise(rng, n, profile.noise_rms, rate)
        data[ch] = noise + drift + amp * gains[ch] * alpha

    gyro_steps = np.rint(rng.standard_normal((n, 2)) * 0.8).astype(np.int64)
    gyro = np.clip(np.cumsum(gyro_steps, axis=0), -128, 127).astype(np.int16)

    rec = EegRecording(data=data, rate=rate, labels=CHANNEL_NAMES, gyro=gyro)
    truth = GroundTruth(condition=condition, alpha_amp_used=amp * gains)
    return rec, truth


def inject_mains(recording: EegRecording, freq: float, amplitude: float) -> EegRecording:
    """Add a mains-interference sinusoid (phase 0 at t=0) to every channel."""
    nyquist = recording.rate / 2.0
    if not 0.0 < freq < nyquist:
        raise ValueError(f"mains frequency must be in (0, {nyquist}) Hz, got {freq}")
    tone = amplitude * np.sin(2.0 * np.pi * freq * recording.times())
    return recording.with_data(recording.data + tone)


def inject_artifact(
    recording: EegRecording,
    kind: ArtifactKind,
    t0: float,
    channels: Optional[Sequence[str]] = None,
    amplitude: float = 50.0,
    burst_floor_uv: float = 10.0,
    jump_uv: float = 2000.0,
    seed: int = 0,
    ground_truth: Optional[GroundTruth] = None,
) -> tuple[EegRecording, ArtifactEvent]:
    """Inject one artifact and return the updated recording plus its event.

    * ocular: 0.8 s half-sine, positive over the left hemisphere and
      negative over the right (eye-movement polarity).
    * muscle: 0.5 s white-noise burst at 5x the scoped channels' RMS
      (at least ``burst_floor_uv`` when the background is silent).
    * disconnection: a level jump of ``jump_uv`` on a single channel that
      persists to the end of the recording.

    The event is appended to the recording's annotations (and to
    ``ground_truth`` when given).
    """
    duration = recording.duration_s
    if kind is ArtifactKind.OCULAR:
        t_end = t0 + OCULAR_DURATION_S
    elif kind is ArtifactKind.MUSCLE:
        t_end = t0 + MUSCLE_DURATION_S
    else:
        t_end = duration
    if t0 < 0 or t_end > duration:
        raise ValueError(
            f"artifact [{t0}, {t_end}] s does not fit a {duration} s recording"
        )

    if channels is None:
        if kind is ArtifactKind.DISCONNECTION:
            scope = ("P8",)
        else:
            scope = recording.labels
    else:
        scope = tuple(channels)
    rows = [recording.labels.index(c) for c in scope]
    if kind is ArtifactKind.DISCONNECTION and len(rows) != 1:
        raise ValueError("disconnection affects exactly one channel")

    i0 = int(round(t0 * recording.rate))
    i1 = min(int(round(t_end * recording.rate)), recording.n_samples)
    data = recording.data.copy()
    score = 0.0

    if kind is ArtifactKind.OCULAR:
        local_t = (np.arange(i1 - i0) / recording.rate) / OCULAR_DURATION_S
        wave = amplitude * np.sin(np.pi * local_t)
        for row in rows:
            sign = 1.0 if recording.labels[row] in LEFT_CHANNELS else -1.0
            data[row, i0:i1] += sign * wave
    elif kind is ArtifactKind.MUSCLE:
        background = float(recording.data[rows].std())
        burst_rms = max(5.0 * background, burst_floor_uv)
        rng = np.random.default_rng(seed)
        for row in rows:
            data[row, i0:i1] += burst_rms * rng.standard_normal(i1 - i0)
        score = burst_rms
    else:
        data[rows[0], i0:] += jump_uv
        score = jump_uv

    event = ArtifactEvent(
        kind=kind,
        t_start=t0,
        t_end=t_end,
        channels=frozenset(scope),
        score=score,
    )
    out = recording.with_data(data)
    out.annotations.append(event)
    if ground_truth is not None:
        ground_truth.artifact_events.append(event)
    return out, event
