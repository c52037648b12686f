"""OFDM comparison baseline: CP-OFDM modulator and symbol-division radar processing."""

from __future__ import annotations

import numpy as np

from .estimator_time import doppler_transform
from .imaging import RadarImage
from .params import AfdmParams
from .transforms import ShapeError, SymbolGrid, TimeFrame, _check_grid, _grid_data, serialize


def ofdm_modulate(x_grid: SymbolGrid | np.ndarray, params: AfdmParams) -> TimeFrame:
    """Unitary IDFT per column, plain cyclic prefix of ``N_cp`` samples, serialization."""
    x = _grid_data(x_grid)
    _check_grid(x, params)
    s = np.fft.ifft(x, axis=0, norm="ortho")
    ncp = params.n_cpp
    with_cp = np.concatenate([s[s.shape[0] - ncp:], s], axis=0) if ncp else s
    return TimeFrame(samples=serialize(with_cp), matrix=s)


def symbol_division_rdm(received: np.ndarray, x_grid: SymbolGrid | np.ndarray, params: AfdmParams) -> RadarImage:
    """Divide received subcarrier values by the sent symbols, then IDFT (range) and DFT (Doppler)."""
    x = _grid_data(x_grid)
    received = np.asarray(received, dtype=np.complex128)
    _check_grid(x, params)
    if received.shape != x.shape:
        raise ShapeError(f"received block {received.shape} != symbol grid {x.shape}")
    if np.any(x == 0):
        raise ValueError("symbol division needs every transmitted symbol to be nonzero")
    spectrum = np.fft.fft(received, axis=0, norm="ortho") / x
    profiles = np.fft.ifft(spectrum, axis=0, norm="ortho")
    return RadarImage(data=doppler_transform(profiles), params=params, method="ofdm_division")
