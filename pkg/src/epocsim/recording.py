"""In-memory EEG recording: channels x samples in microvolts.

The matrix is stored channels-first (row per electrode) so per-channel
operations are contiguous slices. An optional gyro trace (one yaw/pitch
pair per sample) and the last reported battery level ride along so a
recording reassembled from wire frames keeps everything the frames carried.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .channels import CHANNEL_NAMES, SAMPLE_RATE
from .events import ArtifactEvent


@dataclass
class EegRecording:
    data: np.ndarray  # (n_channels, n_samples) float64, microvolts
    rate: float = SAMPLE_RATE
    labels: tuple[str, ...] = CHANNEL_NAMES
    annotations: list[ArtifactEvent] = field(default_factory=list)
    gyro: Optional[np.ndarray] = None  # (n_samples, 2) int16, yaw/pitch
    battery_pct: Optional[int] = None

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ValueError(f"data must be 2-D (channels x samples), got shape {self.data.shape}")
        if len(self.labels) != self.data.shape[0]:
            raise ValueError(
                f"{len(self.labels)} labels for {self.data.shape[0]} channel rows"
            )
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        if self.gyro is not None:
            self.gyro = np.asarray(self.gyro)
            if self.gyro.shape != (self.data.shape[1], 2):
                raise ValueError(f"gyro trace must be (n_samples, 2), got {self.gyro.shape}")

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.rate

    def times(self) -> np.ndarray:
        """Sample times in seconds, starting at 0."""
        return np.arange(self.n_samples) / self.rate

    def channel(self, label: str) -> np.ndarray:
        """View of one channel's samples by label."""
        try:
            idx = self.labels.index(label)
        except ValueError:
            raise ValueError(f"recording has no channel {label!r}") from None
        return self.data[idx]

    def with_data(self, data: np.ndarray) -> "EegRecording":
        """Copy of this recording with ``data`` swapped in (annotations shared copy)."""
        return replace(self, data=data, annotations=list(self.annotations))
