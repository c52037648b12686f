"""Radar image and detection containers shared by all estimators."""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .params import AfdmParams


@dataclass
class RadarImage:
    """Complex ``N x N_sym`` image; rows are the fast-time axis, columns Doppler.

    Column ``k`` corresponds to ``(k - N_sym/2) / N_sym`` cycles per symbol,
    i.e. the Doppler axis is already centred. For time-domain and OFDM images
    row ``p`` is range bin ``p``; for DAFT-domain images row ``p`` is the
    cyclic-shift index and ``delay_bins`` names the delay hypothesis.
    """

    data: np.ndarray
    params: AfdmParams
    method: str = "afdm_time"
    delay_bins: int | None = None
    normalized: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.data)

    def range_axis_m(self) -> np.ndarray:
        return self.params.delay_bins_to_range(np.arange(self.shape[0]))

    def doppler_axis_hz(self) -> np.ndarray:
        nsym = self.shape[1]
        return (np.arange(nsym) - nsym // 2) / nsym * self.params.alt_spacing_hz

    def velocity_axis_mps(self) -> np.ndarray:
        return self.params.doppler_to_velocity(self.doppler_axis_hz())

    def peak(self) -> tuple[int, int]:
        """Row/column of the largest magnitude (first in C order on ties)."""
        idx = int(np.argmax(np.abs(self.data)))
        return divmod(idx, self.shape[1])


def column_to_fraction(col: int, n_symbols: int) -> float:
    """Doppler column to cycles per symbol in (-1/2, 1/2]."""
    b = (col % n_symbols - n_symbols // 2) / n_symbols
    # column 0 is the +1/2 edge, not -1/2
    return 0.5 if b == -0.5 else b


@dataclass
class Detection:
    """One target estimate.

    Doppler fields follow the two normalizations: ``alpha_hat``/``a_hat`` in
    units of the subcarrier spacing, ``beta_hat``/``b_hat`` in units of
    ``1 / T_AFDM``. Time-domain detections leave the integer/fraction split
    at ``alpha_hat = 0`` and ``beta_hat = 0``.
    """

    delay_bins: int
    doppler_hz: float
    range_m: float
    velocity_mps: float
    peak_mag: float
    image_index: int
    row: int
    col: int
    alpha_hat: int = 0
    a_hat: float = 0.0
    beta_hat: int = 0
    b_hat: float = 0.0
    peak_db: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


DetectionList = list[Detection]
