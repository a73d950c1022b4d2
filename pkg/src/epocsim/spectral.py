"""Spectra, Welch density estimates, band power and scalp band-power maps.

``amplitude_spectrum`` mirrors the classic FFT recipe: zero-pad to the
next power of two, scale by the source length, and report the single-sided
amplitude with everything except the DC and Nyquist bins doubled.
``welch_psd`` averages Hann-windowed periodograms and is normalized as a
density: integrating it over frequency recovers the signal variance for
broadband input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .layout import Montage

ALPHA_BAND = (8.0, 12.0)


@dataclass(frozen=True)
class Spectrum:
    freqs: np.ndarray  # Hz, 0 .. rate/2, nfft/2 + 1 points
    amps: np.ndarray   # single-sided amplitude, same units as the signal
    nfft: int
    source_len: int


@dataclass(frozen=True)
class PsdEstimate:
    freqs: np.ndarray    # Hz
    density: np.ndarray  # power per Hz
    segment_len: int
    overlap: float
    window: str = "hann"


@dataclass(frozen=True)
class TopoMap:
    grid: np.ndarray  # (n, n), NaN outside the unit head disk
    band: tuple[float, float]
    montage: Montage


def amplitude_spectrum(signal: np.ndarray, rate: float) -> Spectrum:
    """Single-sided amplitude spectrum of one channel.

    An integer-bin sinusoid of amplitude A comes back as A at its bin when
    the signal length is a whole number of periods and a power of two.
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("need a 1-D signal of at least 2 samples")
    length = x.shape[0]
    nfft = 1 << (length - 1).bit_length()
    spec = np.fft.fft(x, nfft) / length
    half = nfft // 2 + 1
    amps = np.abs(spec[:half])
    amps[1:-1] *= 2.0
    freqs = rate / 2.0 * np.linspace(0.0, 1.0, half)
    return Spectrum(freqs=freqs, amps=amps, nfft=nfft, source_len=length)


def welch_psd(
    signal: np.ndarray,
    rate: float,
    segment_len: int = 128,
    overlap: float = 0.5,
) -> PsdEstimate:
    """Averaged-periodogram power spectral density of one channel."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("need a 1-D signal")
    if segment_len < 2:
        raise ValueError(f"segment_len must be >= 2, got {segment_len}")
    if segment_len > x.shape[0]:
        raise ValueError(f"segment_len {segment_len} longer than signal ({x.shape[0]} samples)")
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap must be in [0, 1), got {overlap}")
    hop = max(1, int(round(segment_len * (1.0 - overlap))))
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(segment_len) / segment_len)
    norm = rate * np.sum(window**2)
    acc = np.zeros(segment_len // 2 + 1)
    count = 0
    for start in range(0, x.shape[0] - segment_len + 1, hop):
        seg = x[start : start + segment_len] * window
        p = np.abs(np.fft.rfft(seg)) ** 2 / norm
        acc += p
        count += 1
    density = acc / count
    nyquist_bin = -1 if segment_len % 2 == 0 else None
    density[1:nyquist_bin] *= 2.0
    freqs = np.fft.rfftfreq(segment_len, 1.0 / rate)
    return PsdEstimate(
        freqs=freqs, density=density, segment_len=segment_len, overlap=overlap
    )


def band_power(psd: PsdEstimate, f_lo: float, f_hi: float) -> float:
    """Trapezoidal integral of the density over [f_lo, f_hi] Hz."""
    if not 0.0 <= f_lo < f_hi:
        raise ValueError(f"need 0 <= f_lo < f_hi, got [{f_lo}, {f_hi}]")
    mask = (psd.freqs >= f_lo) & (psd.freqs <= f_hi)
    if mask.sum() < 2:
        raise ValueError(f"band [{f_lo}, {f_hi}] Hz covers fewer than 2 frequency bins")
    return float(np.trapezoid(psd.density[mask], psd.freqs[mask]))


def find_alpha_peak(
    psd: PsdEstimate,
    band: tuple[float, float] = ALPHA_BAND,
    min_prominence: float = 2.0,
) -> Optional[tuple[float, float]]:
    """Locate the alpha peak, if one stands out.

    Returns (frequency, prominence) for the densest bin in the 8-12 Hz
    band, where prominence is the ratio of that bin to the median density
    of the flanking bands (4-8 and 12-16 Hz). Peaks below the prominence
    floor are reported as None: flat spectra have no alpha rhythm to find.
    """
    f_lo, f_hi = band
    in_band = (psd.freqs >= f_lo) & (psd.freqs <= f_hi)
    if not in_band.any():
        raise ValueError(f"spectrum does not cover the {f_lo}-{f_hi} Hz band")
    flank = ((psd.freqs >= f_lo - 4.0) & (psd.freqs < f_lo)) | (
        (psd.freqs > f_hi) & (psd.freqs <= f_hi + 4.0)
    )
    band_density = psd.density[in_band]
    peak_idx = int(np.argmax(band_density))
    peak_val = float(band_density[peak_idx])
    if peak_val <= 0.0:
        return None
    baseline = float(np.median(psd.density[flank])) if flank.any() else 0.0
    prominence = math.inf if baseline == 0.0 else peak_val / baseline
    if prominence < min_prominence:
        return None
    freq = float(psd.freqs[in_band][peak_idx])
    return (freq, prominence)


def topomap(
    band_powers: np.ndarray,
    montage: Montage,
    grid_n: int = 64,
    band: tuple[float, float] = ALPHA_BAND,
) -> TopoMap:
    """Interpolate 14 per-channel powers over the head disk.

    Inverse-distance weighting with exponent 2 at each grid cell inside
    the unit disk; cells outside are NaN. Electrodes sitting outside the
    disk (low on the head) still contribute: only evaluation points are
    clipped.
    """
    values = np.asarray(band_powers, dtype=np.float64)
    if values.shape != (len(montage.locations),):
        raise ValueError(f"need one power per channel, got shape {values.shape}")
    if not np.isfinite(values).all() or (values < 0).any():
        raise ValueError("band powers must be finite and non-negative")
    if grid_n < 8:
        raise ValueError(f"grid_n must be >= 8, got {grid_n}")
    coords = np.linspace(-1.0, 1.0, grid_n)
    xx, yy = np.meshgrid(coords, coords)
    inside = xx**2 + yy**2 <= 1.0
    pos = montage.positions()
    d2 = (xx[None, :, :] - pos[:, 0, None, None]) ** 2 + (
        yy[None, :, :] - pos[:, 1, None, None]
    ) ** 2
    d2 = np.maximum(d2, 1e-12)  # exact hits collapse to the channel value anyway
    weights = 1.0 / d2
    grid = (weights * values[:, None, None]).sum(axis=0) / weights.sum(axis=0)
    grid[~inside] = np.nan
    return TopoMap(grid=grid, band=band, montage=montage)


# --- file exports ---------------------------------------------------------


def write_freq_csv(freqs: np.ndarray, values: np.ndarray, path) -> None:
    """Write a ``freq_hz,value`` CSV (used for both spectra and densities)."""
    with open(path, "w") as fh:
        fh.write("freq_hz,value\n")
        for f, v in zip(freqs, values):
            fh.write(f"{f:.12g},{v:.12g}\n")


def write_spectrum_csv(spectrum: Spectrum, path) -> None:
    write_freq_csv(spectrum.freqs, spectrum.amps, path)


def write_psd_csv(psd: PsdEstimate, path) -> None:
    write_freq_csv(psd.freqs, psd.density, path)


def write_topomap_csv(topo: TopoMap, path) -> None:
    """Grid dump, one CSV row per grid row; NaN marks outside-disk cells."""
    with open(path, "w") as fh:
        for row in topo.grid:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def write_topomap_pgm(topo: TopoMap, path) -> None:
    """ASCII PGM (P2) rendering: inside-disk power scaled to 0..255."""
    grid = topo.grid
    inside = np.isfinite(grid)
    img = np.zeros(grid.shape, dtype=np.int64)
    if inside.any():
        lo = float(grid[inside].min())
        hi = float(grid[inside].max())
        if hi > lo:
            img[inside] = np.rint((grid[inside] - lo) / (hi - lo) * 255.0).astype(np.int64)
        else:
            img[inside] = 128
    n_rows, n_cols = grid.shape
    with open(path, "w") as fh:
        fh.write(f"P2\n{n_cols} {n_rows}\n255\n")
        for row in img:
            fh.write(" ".join(str(v) for v in row) + "\n")
