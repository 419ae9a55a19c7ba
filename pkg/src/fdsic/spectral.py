"""Averaged periodogram spectral analysis.

The estimator is Welch-style: windowed segments with 50% overlap,
periodograms averaged, bins centered with ``fftshift``. Normalization is
chosen so that the *sum* of linear bin powers equals the time-domain mean
power (Parseval consistency). A spectral line therefore spreads its power
over the window main lobe; :func:`measure_line_db` integrates the lobe to
read back the exact line power ("windowing loss compensated").
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import get_window

from .signals import ComplexBasebandSignal

# Lowest representable bin power; keeps power_db finite for silent bins.
FLOOR_DB = -300.0

# Half-width (in bins) of the window main lobe integrated by measure_line_db.
LINE_HALFWIDTH_BINS = 3


@dataclass(frozen=True)
class Spectrum:
    """Averaged power spectrum of a complex baseband signal.

    Attributes
    ----------
    bin_freqs : np.ndarray
        Strictly increasing bin center frequencies in Hz, symmetric
        about 0 for complex input.
    power_db : np.ndarray
        Power per bin in dBFS, normalized so the linear bin powers sum to
        the signal mean power.
    resolution_bw : float
        Equivalent noise bandwidth of one analysis bin in Hz.
    """

    bin_freqs: np.ndarray
    power_db: np.ndarray
    resolution_bw: float

    def __post_init__(self):
        freqs = np.asarray(self.bin_freqs, dtype=np.float64)
        powers = np.asarray(self.power_db, dtype=np.float64)
        if freqs.shape != powers.shape or freqs.ndim != 1:
            raise ValueError("bin_freqs and power_db must be matching 1-D arrays")
        if np.any(np.diff(freqs) <= 0):
            raise ValueError("bin_freqs must be strictly increasing")
        if not np.all(np.isfinite(powers)):
            raise ValueError("power_db must be finite for all bins")
        object.__setattr__(self, "bin_freqs", freqs)
        object.__setattr__(self, "power_db", powers)

    @property
    def bin_spacing(self) -> float:
        return float(self.bin_freqs[1] - self.bin_freqs[0])

    def power_linear(self) -> np.ndarray:
        return 10.0 ** (self.power_db / 10.0)

    def total_power_db(self) -> float:
        return 10.0 * math.log10(float(np.sum(self.power_linear())))

    def nearest_bin(self, freq: float) -> int:
        return int(np.argmin(np.abs(self.bin_freqs - freq)))


def spectrum(
    signal: ComplexBasebandSignal,
    n_fft: int = 4096,
    averaging: int | None = None,
    window: str = "hann",
) -> Spectrum:
    """Welch-averaged power spectrum with 50% segment overlap.

    ``averaging`` selects the number of segments (default: as many as the
    signal allows). Normalization is Parseval-consistent: the linear bin
    powers sum to the signal mean power to within the window bias.
    """
    n = len(signal)
    if n_fft > n:
        raise ValueError(f"n_fft {n_fft} exceeds signal length {n}")
    if n_fft < 2:
        raise ValueError("n_fft must be >= 2")
    hop = n_fft // 2
    max_segments = 1 + (n - n_fft) // hop
    if averaging is None:
        averaging = max_segments
    if not (1 <= averaging <= max_segments):
        raise ValueError(
            f"averaging must be in [1, {max_segments}] for length {n}, got {averaging}"
        )

    win = get_window(window, n_fft, fftbins=True).astype(np.float64)
    win_power = float(np.sum(win**2))
    acc = np.zeros(n_fft, dtype=np.float64)
    for k in range(averaging):
        seg = signal.samples[k * hop : k * hop + n_fft]
        spec = np.fft.fft(seg * win)
        acc += np.abs(spec) ** 2
    # Per-bin power such that sum over bins == mean |x|^2 (per segment).
    pxx = acc / (averaging * n_fft * win_power)
    pxx = np.fft.fftshift(pxx)
    freqs = np.fft.fftshift(np.fft.fftfreq(n_fft, d=1.0 / signal.sample_rate))

    enbw_bins = n_fft * win_power / float(np.sum(win)) ** 2
    power_db = 10.0 * np.log10(np.maximum(pxx, 10.0 ** (FLOOR_DB / 10.0)))
    return Spectrum(freqs, power_db, enbw_bins * signal.sample_rate / n_fft)


def measure_line_db(spec: Spectrum, freq: float, halfwidth: int = LINE_HALFWIDTH_BINS) -> float:
    """Power of the spectral line nearest ``freq``, in dBFS.

    Sums the linear power over the window main lobe (+-``halfwidth``
    bins), which for a coherently placed tone recovers the exact tone
    power under the Parseval normalization.
    """
    k = spec.nearest_bin(freq)
    lo = max(0, k - halfwidth)
    hi = min(len(spec.power_db), k + halfwidth + 1)
    p = float(np.sum(spec.power_linear()[lo:hi]))
    return 10.0 * math.log10(max(p, 10.0 ** (FLOOR_DB / 10.0)))


def skirt_peak_dbc(
    spec: Spectrum,
    tone_freq: float,
    search_bins: int = 32,
    exclude_bins: int = LINE_HALFWIDTH_BINS,
) -> float:
    """Strongest bin near a tone, excluding the tone's own main lobe.

    Returns the peak bin power within +-``search_bins`` of the tone,
    relative to the tone line power (dBc). This is the quantity used to
    quantify an oscillator phase-noise skirt around a carrier.
    """
    k = spec.nearest_bin(tone_freq)
    lo = max(0, k - search_bins)
    hi = min(len(spec.power_db), k + search_bins + 1)
    mask = np.ones(hi - lo, dtype=bool)
    ex_lo = max(lo, k - exclude_bins) - lo
    ex_hi = min(hi, k + exclude_bins + 1) - lo
    mask[ex_lo:ex_hi] = False
    if not np.any(mask):
        raise ValueError("search window contains no bins outside the line lobe")
    peak = float(np.max(spec.power_db[lo:hi][mask]))
    return peak - measure_line_db(spec, tone_freq)


def floor_estimate_db(spec: Spectrum) -> float:
    """Robust per-bin noise floor estimate (median bin power)."""
    return float(np.median(spec.power_db))


def band_power_fraction(spec: Spectrum, f_lo: float, f_hi: float) -> float:
    """Fraction of total power inside [f_lo, f_hi] (bin centers, inclusive)."""
    lin = spec.power_linear()
    half = spec.bin_spacing / 2
    sel = (spec.bin_freqs >= f_lo - half) & (spec.bin_freqs <= f_hi + half)
    return float(np.sum(lin[sel]) / np.sum(lin))


def write_spectrum_csv(spec: Spectrum, path) -> Path:
    """Export a spectrum as CSV with columns freq_hz, power_db."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["freq_hz", "power_db"])
        for f, p in zip(spec.bin_freqs, spec.power_db):
            writer.writerow([f"{f:.6f}", f"{p:.6f}"])
    return path
