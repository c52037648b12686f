"""Figures of merit for radar images: PSLR, image SNR, processing gain, normalization."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .imaging import RadarImage
from .params import AfdmParams

PSLR_CAP_DB = 300.0
DEFAULT_GUARD = (1, 1)


@dataclass(frozen=True)
class MetricReport:
    pslr_db: float
    image_snr_db: float
    peak_location: tuple[int, int]
    peak_mag: float
    noise_floor: float
    processing_gain_db: float

    def as_row(self) -> dict:
        return {"image_snr_db": self.image_snr_db, "pslr_db": self.pslr_db}


def processing_gain_db(params: AfdmParams) -> float:
    """``10 log10(N N_sym)``."""
    return 10 * math.log10(params.n_subcarriers * params.n_symbols)


def _data(image: RadarImage | np.ndarray) -> np.ndarray:
    return image.data if isinstance(image, RadarImage) else np.asarray(image)


def noise_mask(
    shape: tuple[int, int],
    peaks: Sequence[tuple[int, int]],
    guard: tuple[int, int] = DEFAULT_GUARD,
    leakage_rows: int = 0,
) -> np.ndarray:
    """Cells that count as noise: everything outside a cyclic guard box around each peak.

    ``leakage_rows`` additionally excludes that many rows either side of each
    peak in the peak column (fractional-Doppler taps of DAFT-domain images).
    """
    rows, cols = shape
    keep = np.ones(shape, dtype=bool)
    for p, k in peaks:
        r_idx = np.arange(p - guard[0], p + guard[0] + 1) % rows
        c_idx = np.arange(k - guard[1], k + guard[1] + 1) % cols
        keep[np.ix_(r_idx, c_idx)] = False
        if leakage_rows:
            keep[np.arange(p - leakage_rows, p + leakage_rows + 1) % rows, k] = False
    return keep


def image_snr_db(
    image: RadarImage | np.ndarray,
    peak: tuple[int, int] | Sequence[tuple[int, int]] | None = None,
    guard: tuple[int, int] = DEFAULT_GUARD,
    leakage_rows: int | None = None,
) -> float:
    """Peak power over mean power of the cells outside the guard windows, in dB.

    Args:
        image: radar image (``RadarImage`` or complex/real array).
        peak: one ``(row, col)`` or a list of declared peaks; the first one is
            the reference. Defaults to the largest cell.
        guard: half-widths (rows, cols) of the exclusion box.
        leakage_rows: extra row taps to exclude; defaults to ``k_v`` for
            DAFT-domain images and 0 otherwise.
    """
    data = _data(image)
    power = np.abs(data) ** 2
    if peak is None:
        peaks = [np.unravel_index(int(np.argmax(power)), power.shape)]
    elif len(peak) == 2 and np.isscalar(peak[0]):
        peaks = [tuple(peak)]
    else:
        peaks = [tuple(p) for p in peak]
    if leakage_rows is None:
        leakage_rows = image.params.k_v if isinstance(image, RadarImage) and image.method == "afdm_daft" else 0
    if 2 * guard[0] + 1 >= power.shape[0] and 2 * guard[1] + 1 >= power.shape[1]:
        raise ValueError(f"guard {guard} covers the whole {power.shape} image")
    keep = noise_mask(power.shape, peaks, guard, leakage_rows)
    if not keep.any():
        raise ValueError("guard windows cover the whole image")
    floor = float(power[keep].mean())
    p0 = power[peaks[0]]
    if floor == 0:
        return math.inf if p0 > 0 else math.nan
    return 10 * math.log10(p0 / floor)


def pslr_db(profile: np.ndarray, halfwidth: int = 1) -> float:
    """Peak over the largest magnitude outside +/-``halfwidth`` bins of the peak (cyclic), in dB.

    Profiles with nothing outside the mainlobe return ``PSLR_CAP_DB``.
    """
    mag = np.abs(np.asarray(profile)).ravel()
    if mag.size == 0:
        raise ValueError("empty profile")
    if halfwidth < 1:
        raise ValueError("halfwidth must be >= 1")
    i = int(np.argmax(mag))
    peak = mag[i]
    if peak == 0:
        raise ValueError("PSLR undefined for an all-zero profile")
    side = np.ones(mag.size, dtype=bool)
    side[np.arange(i - halfwidth, i + halfwidth + 1) % mag.size] = False
    worst = mag[side].max() if side.any() else 0.0
    if worst == 0:
        return PSLR_CAP_DB
    return min(20 * math.log10(peak / worst), PSLR_CAP_DB)


def image_pslr_db(image: RadarImage | np.ndarray, halfwidth: tuple[int, int] = (1, 1)) -> float:
    """PSLR of a 2-D image: the mainlobe is a cyclic box of half-widths (rows, cols) around the peak."""
    mag = np.abs(_data(image))
    if mag.size == 0:
        raise ValueError("empty image")
    p, k = np.unravel_index(int(np.argmax(mag)), mag.shape)
    peak = mag[p, k]
    if peak == 0:
        raise ValueError("PSLR undefined for an all-zero image")
    side = noise_mask(mag.shape, [(p, k)], halfwidth)
    worst = mag[side].max() if side.any() else 0.0
    if worst == 0:
        return PSLR_CAP_DB
    return min(20 * math.log10(peak / worst), PSLR_CAP_DB)


def peak_profile(image: RadarImage | np.ndarray, axis: int = 1, peak: tuple[int, int] | None = None) -> np.ndarray:
    """Cut through the peak: ``axis=1`` gives the Doppler profile (a row), ``axis=0`` the range profile."""
    data = np.abs(_data(image))
    if peak is None:
        peak = np.unravel_index(int(np.argmax(data)), data.shape)
    return data[peak[0], :] if axis == 1 else data[:, peak[1]]


def normalize(image: RadarImage | np.ndarray) -> RadarImage | np.ndarray:
    """Divide by the peak magnitude so the peak sits at 0 dB."""
    data = _data(image)
    peak = float(np.max(np.abs(data))) if data.size else 0.0
    if peak == 0:
        raise ValueError("cannot normalize an all-zero image")
    out = data / peak
    if isinstance(image, RadarImage):
        return replace(image, data=out, normalized=True)
    return out


def to_db(image: RadarImage | np.ndarray, floor_db: float = -300.0) -> np.ndarray:
    mag = np.abs(_data(image))
    with np.errstate(divide="ignore"):
        return np.maximum(20 * np.log10(mag), floor_db)


def report(image: RadarImage, guard: tuple[int, int] = DEFAULT_GUARD) -> MetricReport:
    """Metrics around the strongest cell of ``image`` (2-D PSLR with a 3 x 3 mainlobe)."""
    mag = np.abs(image.data)
    peak = tuple(int(v) for v in np.unravel_index(int(np.argmax(mag)), mag.shape))
    snr = image_snr_db(image, peak, guard)
    pk = float(mag[peak])
    floor = pk**2 / 10 ** (snr / 10) if math.isfinite(snr) else 0.0
    return MetricReport(
        pslr_db=image_pslr_db(image) if pk > 0 else math.nan,
        image_snr_db=snr,
        peak_location=peak,
        peak_mag=pk,
        noise_floor=floor,
        processing_gain_db=processing_gain_db(image.params),
    )
