"""Time-domain range-Doppler processing by fast cyclic correlation (FCCR).

Per symbol the received and transmitted columns are correlated cyclically via
the FFT (transmit spectrum conjugated), giving range profiles; a DFT across
symbols then resolves Doppler. The Doppler axis spans one ``1/T_AFDM`` period,
so larger shifts alias.
"""

from __future__ import annotations

import math

import numpy as np

from .detection import CfarConfig, exceedances, group_peaks
from .imaging import Detection, DetectionList, RadarImage, column_to_fraction
from .params import AfdmParams
from .transforms import ShapeError


def _check_pair(a: np.ndarray, b: np.ndarray, params: AfdmParams) -> None:
    expected = (params.n_subcarriers, params.n_symbols)
    if a.shape != expected or b.shape != expected:
        raise ShapeError(f"expected {expected} matrices, got {a.shape} and {b.shape}")


def cyclic_correlation(r: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Column-wise ``c[p] = sum_n r[n] conj(s[n - p])`` (cyclic), via FFT."""
    return np.fft.ifft(np.fft.fft(r, axis=0) * np.conj(np.fft.fft(s, axis=0)), axis=0)


def doppler_transform(corr: np.ndarray) -> np.ndarray:
    """DFT along the symbol axis with zero Doppler moved to column ``N_sym / 2``."""
    return np.fft.fftshift(np.fft.fft(corr, axis=1), axes=1)


def fccr_rdm(received: np.ndarray, transmitted: np.ndarray, params: AfdmParams) -> RadarImage:
    """Range-Doppler image from prefix-free received/transmitted matrices.

    A target at delay ``l`` with Doppler ``nu'`` cycles per symbol peaks at
    row ``l``, column ``(N_sym/2 + round(nu' N_sym)) mod N_sym``.
    """
    received = np.asarray(received, dtype=np.complex128)
    transmitted = np.asarray(transmitted, dtype=np.complex128)
    _check_pair(received, transmitted, params)
    rdm = doppler_transform(cyclic_correlation(received, transmitted))
    return RadarImage(data=rdm, params=params, method="afdm_time")


def doppler_from_column(col: int, params: AfdmParams) -> float:
    """Doppler in Hz for a centred column, wrapped into (-1/(2 T_AFDM), 1/(2 T_AFDM)]."""
    return column_to_fraction(col, params.n_symbols) * params.alt_spacing_hz


def rdm_peaks(image: RadarImage, threshold_db: float = 13.0, detector: CfarConfig | None = None) -> DetectionList:
    """Peaks of a range-Doppler image converted to range / radial velocity."""
    params = image.params
    if image.data.size == 0:
        return []
    detector = detector or CfarConfig(threshold_db=threshold_db)
    mag = np.abs(image.data)
    if not np.any(mag):
        return []
    power = mag**2
    mask = exceedances(power, detector)
    ref = float(np.max(mag))
    out = []
    for row, col, m in group_peaks(mag, mask):
        fd = doppler_from_column(col, params)
        out.append(
            Detection(
                delay_bins=row,
                doppler_hz=fd,
                range_m=params.delay_bins_to_range(row),
                velocity_mps=params.doppler_to_velocity(fd),
                peak_mag=m,
                image_index=0,
                row=row,
                col=col,
                b_hat=column_to_fraction(col, params.n_symbols),
                peak_db=20 * math.log10(m / ref),
            )
        )
    out.sort(key=lambda d: (-d.peak_mag, d.row, d.col))
    return out
