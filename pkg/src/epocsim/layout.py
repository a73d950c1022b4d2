"""Electrode locations: ``.elp`` parsing and 2D scalp projection.

The ``.elp`` file is whitespace-separated text: one numeric header line
(ignored), then one row per electrode with fields

    kind  label  theta  phi  radius

where theta/phi are spherical angles in degrees and radius is a head-scale
constant. A copy of the headset's standard montage ships with the package
(``data/epoc.elp``).

Projection to the unit head disk: ``r = |theta| / 90`` and the sign of
theta selects the hemisphere, so ``x = sign(theta) * r * cos(phi)``,
``y = sign(theta) * r * sin(phi)``. Positive x is the right ear side,
positive y the nasion side. Only relative geometry matters for the
band-power maps built on top of this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .channels import CHANNEL_NAMES, N_CHANNELS, channel_index

__all__ = [
    "ChannelLocation",
    "Montage",
    "ElpParseError",
    "parse_elp",
    "project_2d",
    "channel_index",
    "default_montage",
]


class ElpParseError(ValueError):
    """Raised for malformed ``.elp`` content, with the offending line number."""


@dataclass(frozen=True)
class ChannelLocation:
    kind: str
    label: str
    theta: float
    phi: float
    radius: float


@dataclass(frozen=True)
class Montage:
    """The 14 electrode locations in fixed channel order (AF3 .. AF4)."""

    locations: tuple[ChannelLocation, ...]

    def __post_init__(self) -> None:
        labels = [loc.label for loc in self.locations]
        if len(labels) != N_CHANNELS:
            raise ValueError(f"montage needs {N_CHANNELS} channels, got {len(labels)}")
        if tuple(labels) != CHANNEL_NAMES:
            raise ValueError(
                f"montage must list channels in the order {CHANNEL_NAMES}, got {tuple(labels)}"
            )

    def __getitem__(self, i: int) -> ChannelLocation:
        return self.locations[i]

    def positions(self) -> np.ndarray:
        """(14, 2) array of projected x/y per channel."""
        return np.array([project_2d(loc) for loc in self.locations])


def parse_elp(text: str) -> Montage:
    """Parse ``.elp`` text into a Montage.

    The header line is read and discarded. Rows must have exactly five
    whitespace-separated fields and unique labels.
    """
    lines = text.splitlines()
    rows: list[ChannelLocation] = []
    seen: set[str] = set()
    header_done = False
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if not header_done:
            try:
                float(stripped)
            except ValueError:
                raise ElpParseError(
                    f"line {lineno}: expected a numeric header line, got {stripped!r}"
                ) from None
            header_done = True
            continue
        fields = stripped.split()
        if len(fields) != 5:
            raise ElpParseError(
                f"line {lineno}: expected 5 fields (kind label theta phi radius), got {len(fields)}"
            )
        kind, label = fields[0], fields[1]
        try:
            theta, phi, radius = (float(v) for v in fields[2:])
        except ValueError:
            raise ElpParseError(f"line {lineno}: non-numeric coordinate in {fields[2:]}") from None
        if abs(theta) > 180:
            raise ElpParseError(f"line {lineno}: |theta| must be <= 180, got {theta}")
        if label in seen:
            raise ElpParseError(f"line {lineno}: duplicate channel label {label!r}")
        seen.add(label)
        rows.append(ChannelLocation(kind=kind, label=label, theta=theta, phi=phi, radius=radius))
    if not header_done:
        raise ElpParseError("empty file: missing header line")
    if not rows:
        raise ElpParseError("no channels after the header line")
    return Montage(locations=tuple(rows))


def project_2d(loc: ChannelLocation) -> tuple[float, float]:
    """Project one electrode onto unit-head coordinates (x right, y anterior)."""
    r = abs(loc.theta) / 90.0
    s = 1.0 if loc.theta >= 0 else -1.0
    phi_rad = math.radians(loc.phi)
    return (s * r * math.cos(phi_rad), s * r * math.sin(phi_rad))


def default_montage() -> Montage:
    """The montage shipped with the package."""
    text = resources.files("epocsim").joinpath("data/epoc.elp").read_text()
    return parse_elp(text)
