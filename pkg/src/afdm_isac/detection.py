"""Thresholding, CA-CFAR and peak grouping on radar images.

Images are treated as cyclic in both axes (range and Doppler axes of the
estimators are circular correlations / DFTs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class CfarConfig:
    """Detector settings.

    ``mode="global"`` flags cells whose power exceeds the image noise floor
    by ``threshold_db``. ``mode="cfar"`` runs a 2-D cell-averaging CFAR with
    ``guard``/``train`` half-widths (rows, cols) and false-alarm rate ``pfa``.
    """

    mode: str = "global"
    threshold_db: float = 13.0
    pfa: float = 1e-4
    guard: tuple[int, int] = (2, 2)
    train: tuple[int, int] = (4, 4)

    def __post_init__(self):
        if self.mode not in ("global", "cfar"):
            raise ValueError(f"unknown detector mode {self.mode!r}")
        if not 0 < self.pfa < 1:
            raise ValueError("pfa must lie in (0, 1)")

    @property
    def n_train(self) -> int:
        outer = (2 * (self.guard[0] + self.train[0]) + 1) * (2 * (self.guard[1] + self.train[1]) + 1)
        inner = (2 * self.guard[0] + 1) * (2 * self.guard[1] + 1)
        return outer - inner

    @property
    def cfar_scale(self) -> float:
        """Multiplier on the local mean power for the requested pfa (exponential cells)."""
        n = self.n_train
        return n * (self.pfa ** (-1.0 / n) - 1.0)


def noise_floor(power: np.ndarray) -> float:
    """Mean noise power estimated as median / ln 2 (exact for exponential cells, robust to peaks)."""
    return float(np.median(power)) / math.log(2)


def cfar_threshold(power: np.ndarray, config: CfarConfig) -> np.ndarray:
    """Per-cell CA-CFAR threshold map with wrap-around boundaries."""
    g, t = config.guard, config.train
    outer = (2 * (g[0] + t[0]) + 1, 2 * (g[1] + t[1]) + 1)
    inner = (2 * g[0] + 1, 2 * g[1] + 1)
    # uniform_filter returns means; convert back to box sums before differencing
    s_outer = ndimage.uniform_filter(power, size=outer, mode="wrap") * (outer[0] * outer[1])
    s_inner = ndimage.uniform_filter(power, size=inner, mode="wrap") * (inner[0] * inner[1])
    return config.cfar_scale * (s_outer - s_inner) / config.n_train


def exceedances(power: np.ndarray, config: CfarConfig) -> np.ndarray:
    """Boolean mask of cells that cross the detector threshold."""
    if config.mode == "cfar":
        return power > cfar_threshold(power, config)
    floor = noise_floor(power)
    if floor <= 0:
        # noiseless image with a zero median: anything nonzero is an exceedance
        return power > 0
    return power > floor * 10 ** (config.threshold_db / 10)


# ---------------------------------------------------------------------------
# peak grouping
# ---------------------------------------------------------------------------

SHARP_SIDE_DB = -15.0


def _roll(a: np.ndarray, shift: int, axis: int) -> np.ndarray:
    return np.roll(a, shift, axis=axis)


def _resolved_pairs(mag: np.ndarray) -> np.ndarray:
    """Mask of cells in a pair of Doppler-adjacent peaks that are two targets, not one.

    A single target between two Doppler bins leaks at least -9.5 dB into the
    next bin on the far side; two on-grid targets one bin apart do not.
    """
    sharp = 10 ** (SHARP_SIDE_DB / 20)
    left = _roll(mag, 1, 1)  # mag[p, k-1]
    right = _roll(mag, -1, 1)  # mag[p, k+1]
    right2 = _roll(mag, -2, 1)  # mag[p, k+2]
    comparable = (right > sharp * mag) & (mag > sharp * right)
    pair = comparable & (left <= sharp * mag) & (right2 <= sharp * right)
    return pair | _roll(pair, 1, 1)


def local_peak_mask(mag: np.ndarray) -> np.ndarray:
    """Cells that are maxima along both axes (ties go to the lower index), or resolved pairs."""
    up, down = _roll(mag, 1, 0), _roll(mag, -1, 0)
    left, right = _roll(mag, 1, 1), _roll(mag, -1, 1)
    along_rows = (mag > up) & (mag >= down)
    along_cols = (mag > left) & (mag >= right)
    return along_rows & (along_cols | _resolved_pairs(mag))


def _cyclic_gap(a: int, b: int, n: int) -> int:
    d = abs(a - b) % n
    return min(d, n - d)


def _envelope(d: int) -> float:
    """Upper bound (with 6 dB margin) on Dirichlet leakage ``d`` bins from a peak, relative to it."""
    return 1.0 if d <= 1 else 1.0 / (d - 0.5)


def group_peaks(mag: np.ndarray, mask: np.ndarray) -> list[tuple[int, int, float]]:
    """Reduce a mask of threshold crossings to one ``(row, col, magnitude)`` per target.

    Only local peaks survive; a weaker peak is then dropped when it fits
    under the separable 1/distance leakage envelope of a stronger one
    (fractional Doppler spreads along rows, off-grid Doppler along columns).
    Directly adjacent peaks are merged unless they form a resolved pair.
    """
    rows, cols = mag.shape
    cand = mask & local_peak_mask(mag)
    resolved = _resolved_pairs(mag)
    ps, ks = np.nonzero(cand)
    order = sorted(zip(ps.tolist(), ks.tolist()), key=lambda pk: (-mag[pk], pk))
    kept: list[tuple[int, int, float]] = []
    for p, k in order:
        m = float(mag[p, k])
        explained = False
        for kp, kk, km in kept:
            dp = _cyclic_gap(p, kp, rows)
            dk = _cyclic_gap(k, kk, cols)
            if dp == 0 and dk == 1 and resolved[p, k] and resolved[kp, kk]:
                continue
            if m <= km * _envelope(dp) * _envelope(dk):
                explained = True
                break
        if not explained:
            kept.append((p, k, m))
    return kept
