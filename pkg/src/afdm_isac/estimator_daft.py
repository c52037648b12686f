"""Four-step target parameter estimation in the DAFT domain.

1. For each delay hypothesis ``l`` remove the delay-induced linear phase
   along the DAFT index.
2. Correlate against the known symbols (cyclic matched filter per column)
   and take a DFT across symbols.
3. A peak at row ``p0``, column ``k0`` of image ``l`` gives the delay
   ``l``, the integer Doppler ``alpha`` (from the cyclic shift
   ``p0 = (2 N c1 l - alpha) mod N``) and the fractional slow-time Doppler
   ``b`` (from ``k0``).
4. ``alpha`` (units of the subcarrier spacing) and ``b`` (units of
   ``1/T_AFDM``) are fused into one unambiguous Doppler estimate.

Index conventions are 0-based throughout.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .detection import CfarConfig, exceedances, group_peaks
from .estimator_time import doppler_transform
from .imaging import Detection, DetectionList, RadarImage, column_to_fraction
from .params import AfdmParams
from .transforms import ShapeError, SymbolGrid, _grid_data, chirp

log = logging.getLogger(__name__)


class DopplerRangeError(ValueError):
    """Peak implies an integer Doppler outside ``[-alpha_max, alpha_max]``."""


class ConsistencyError(RuntimeError):
    """Fused Doppler fraction fell outside (-1/2, 1/2]; conventions are miscalibrated."""


def _check_delay(l: int, params: AfdmParams) -> None:
    if not 0 <= l < max(params.n_cpp, 1):
        raise ValueError(f"delay hypothesis {l} outside [0, {params.n_cpp})")


def compensation_phase(l: int, params: AfdmParams) -> np.ndarray:
    """Diagonal of ``L_l``: ``exp(j 2 pi l p / N)``."""
    n = params.n_subcarriers
    return np.exp(2j * np.pi * np.mod(l * np.arange(n), n) / n)


def compensate(y: np.ndarray, l: int, params: AfdmParams) -> np.ndarray:
    """``Z_l = L_l Y``."""
    _check_delay(l, params)
    y = np.asarray(y, dtype=np.complex128)
    if y.shape[0] != params.n_subcarriers:
        raise ShapeError(f"expected {params.n_subcarriers} rows, got {y.shape[0]}")
    return compensation_phase(l, params)[:, None] * y


def _spectra(y: np.ndarray, x: np.ndarray, params: AfdmParams, dechirp: bool) -> tuple[np.ndarray, np.ndarray]:
    """Column spectra of the received DAFT block and of the reference symbols.

    With ``dechirp`` the ``c2`` chirp is taken off both sides, so the
    received block is an exact cyclic shift of the references times a
    linear phase, whatever the value of ``c2``.
    """
    if dechirp and params.c2 != 0:
        c2 = chirp(params.n_subcarriers, params.c2)[:, None]
        y = y * c2
        x = x * c2
    return np.fft.fft(y, axis=0), np.fft.fft(x, axis=0)


def _image_from_spectra(y_f: np.ndarray, x_f: np.ndarray, l: int, params: AfdmParams) -> np.ndarray:
    n = params.n_subcarriers
    # L_l shifts each column spectrum cyclically by l bins
    z_f = np.roll(y_f, l, axis=0) if l else y_f
    # c[p] = sum_m Z[m] conj(X[(m + p) mod N]), so row p0 = loc and the Doppler phase keeps its sign
    corr = np.conj(np.fft.ifft(np.conj(z_f) * x_f, axis=0))
    return doppler_transform(corr) / n


def matched_filter(
    y: np.ndarray,
    x_grid: SymbolGrid | np.ndarray,
    l: int,
    params: AfdmParams,
    dechirp: bool = True,
) -> np.ndarray:
    """DAFT-domain matched-filter image ``W_l`` (N x N_sym).

    A target with delay ``l`` and integer Doppler ``alpha`` peaks at row
    ``(2 N c1 l - alpha) mod N``; its slow-time Doppler fraction ``b`` puts
    the peak at column ``N_sym/2 + round(b N_sym)``.
    """
    _check_delay(l, params)
    y = np.asarray(y, dtype=np.complex128)
    x = _grid_data(x_grid)
    expected = (params.n_subcarriers, params.n_symbols)
    if y.shape != expected or x.shape != expected:
        raise ShapeError(f"expected {expected} matrices, got {y.shape} and {x.shape}")
    y_f, x_f = _spectra(y, x, params, dechirp)
    return _image_from_spectra(y_f, x_f, l, params)


def iter_images(y, x_grid, params: AfdmParams, dechirp: bool = True):
    """Yield ``(l, W_l)`` for every delay hypothesis ``l = 0..N_cp-1``."""
    y = np.asarray(y, dtype=np.complex128)
    x = _grid_data(x_grid)
    expected = (params.n_subcarriers, params.n_symbols)
    if y.shape != expected or x.shape != expected:
        raise ShapeError(f"expected {expected} matrices, got {y.shape} and {x.shape}")
    y_f, x_f = _spectra(y, x, params, dechirp)
    for l in range(max(params.n_cpp, 1)):
        yield l, _image_from_spectra(y_f, x_f, l, params)


# ---------------------------------------------------------------------------
# step 3: detection and extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    image_index: int
    row: int
    col: int
    mag: float


def detect(images, detector: CfarConfig | None = None) -> list[Candidate]:
    """Every threshold crossing of every image, tagged with its delay hypothesis.

    ``images`` is a sequence of ``W_l`` for ``l = 0, 1, ...`` or of
    ``(l, W_l)`` pairs. Each image is thresholded against its own noise
    floor.
    """
    detector = detector or CfarConfig()
    out = []
    for i, item in enumerate(images):
        l, w = item if isinstance(item, tuple) else (i, item)
        mag = np.abs(w)
        mask = exceedances(mag**2, detector)
        for p, k in zip(*np.nonzero(mask)):
            out.append(Candidate(l, int(p), int(k), float(mag[p, k])))
    out.sort(key=lambda c: (c.image_index, c.row, c.col))
    return out


def wrap_signed(v: int, n: int) -> int:
    """Representative of ``v mod n`` in ``(-n/2, n/2]``."""
    v %= n
    return v - n if v > n // 2 else v


def extract(candidate: Candidate | tuple, params: AfdmParams) -> tuple[int, int, float]:
    """Delay, integer Doppler and slow-time Doppler fraction for one peak."""
    if isinstance(candidate, Candidate):
        l, p0, k0 = candidate.image_index, candidate.row, candidate.col
    else:
        l, p0, k0 = candidate[:3]
    alpha = wrap_signed(params.chirp_index * l - p0, params.n_subcarriers)
    if abs(alpha) > params.alpha_max:
        raise DopplerRangeError(
            f"peak row {p0} in image {l} implies alpha={alpha}, outside +/-{params.alpha_max}"
        )
    return l, alpha, column_to_fraction(k0, params.n_symbols)


# ---------------------------------------------------------------------------
# step 4: integer / fractional combination
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DopplerFusion:
    beta_hat: int
    a_hat: float
    doppler_hz: float
    beta_min: int
    beta_max: int
    alpha_hat: int = 0


def beta_bounds(alpha_hat: int, b_hat: float, params: AfdmParams, slack: float = 0.0) -> tuple[int, int]:
    """Integers ``beta`` in ``(r alpha - b - r/2 - slack, r alpha - b + r/2 + slack]`` with ``r = (N + N_cp)/N``."""
    r = params.symbol_ratio
    centre = r * alpha_hat - b_hat
    eps = 1e-9
    lo = math.floor(centre - r / 2 - slack + eps) + 1  # open at the lower end
    hi = math.floor(centre + r / 2 + slack + eps)
    return lo, hi


def combine_doppler(
    alpha_hat: int,
    b_hat: float,
    image: np.ndarray | None,
    p0: int,
    k0: int,
    params: AfdmParams,
) -> DopplerFusion:
    """Fuse integer Doppler ``alpha_hat`` and slow-time fraction ``b_hat``.

    ``b_hat`` is read off a DFT bin, so it is off by up to half a bin; the
    admissible ``beta`` range is widened by that much so a fraction near
    +/-1/2 keeps its true branch. When two values of ``beta`` are admissible
    the tie is broken by the fractional-Doppler leakage around the peak: a
    target with positive fractional part ``a`` spreads towards row ``p0 - 1``
    in this image orientation, which selects the larger ``beta``. The
    returned ``alpha_hat``/``a_hat`` pair is renormalized so that ``a_hat``
    lies in (-1/2, 1/2].
    """
    if abs(b_hat) > 0.5 or abs(alpha_hat) > params.alpha_max:
        raise ValueError("alpha_hat / b_hat outside their admissible ranges")
    r = params.symbol_ratio
    slack = 0.5 / params.n_symbols
    lo, hi = beta_bounds(alpha_hat, b_hat, params)
    wide_lo, wide_hi = beta_bounds(alpha_hat, b_hat, params, slack)
    if wide_hi - wide_lo <= 1:
        lo, hi = wide_lo, wide_hi
    if hi == lo:
        beta = hi
    elif hi == lo + 1:
        if image is None:
            raise ValueError("ambiguous beta and no image to break the tie")
        n = image.shape[0]
        before = abs(image[(p0 - 1) % n, k0])
        after = abs(image[(p0 + 1) % n, k0])
        beta = lo if after > before else hi
    else:
        raise ConsistencyError(f"beta interval [{lo}, {hi}] does not hold one or two integers")
    a_hat = (beta + b_hat) / r - alpha_hat
    if not -0.5 - slack / r - 1e-9 < a_hat <= 0.5 + slack / r + 1e-9:
        raise ConsistencyError(f"fused fraction a_hat={a_hat:.4f} outside (-1/2, 1/2]")
    alpha = alpha_hat
    if a_hat <= -0.5:
        alpha, a_hat = alpha - 1, a_hat + 1
    elif a_hat > 0.5:
        alpha, a_hat = alpha + 1, a_hat - 1
    return DopplerFusion(beta, a_hat, (beta + b_hat) * params.alt_spacing_hz, lo, hi, alpha)


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------

@dataclass
class DaftResult:
    detections: DetectionList
    best_index: int = 0
    best_image: np.ndarray | None = None
    rejected: list[str] = field(default_factory=list)

    def image(self, params: AfdmParams) -> RadarImage:
        return RadarImage(self.best_image, params, method="afdm_daft", delay_bins=self.best_index)


def estimate_full(
    y: np.ndarray,
    x_grid: SymbolGrid | np.ndarray,
    params: AfdmParams,
    detector: CfarConfig | None = None,
    dechirp: bool = True,
) -> DaftResult:
    """Run all four steps over every delay hypothesis.

    Also returns the image holding the strongest peak overall, which the
    metrics use. Images are processed one at a time, so memory stays at a
    single ``N x N_sym`` block.
    """
    detector = detector or CfarConfig()
    detections: DetectionList = []
    rejected: list[str] = []
    best = (-1.0, 0, None)
    for l, w in iter_images(y, x_grid, params, dechirp):
        mag = np.abs(w)
        peak = float(mag.max())
        if peak > best[0]:
            best = (peak, l, w)
        if peak == 0:
            continue
        mask = exceedances(mag**2, detector)
        for p0, k0, m in group_peaks(mag, mask):
            try:
                _, alpha, b = extract((l, p0, k0), params)
                fused = combine_doppler(alpha, b, w, p0, k0, params)
            except (DopplerRangeError, ConsistencyError) as exc:
                rejected.append(str(exc))
                log.debug("rejected candidate: %s", exc)
                continue
            detections.append(
                Detection(
                    delay_bins=l,
                    doppler_hz=fused.doppler_hz,
                    range_m=params.delay_bins_to_range(l),
                    velocity_mps=params.doppler_to_velocity(fused.doppler_hz),
                    peak_mag=m,
                    image_index=l,
                    row=p0,
                    col=k0,
                    alpha_hat=fused.alpha_hat,
                    a_hat=fused.a_hat,
                    beta_hat=fused.beta_hat,
                    b_hat=b,
                )
            )
    if detections:
        ref = max(d.peak_mag for d in detections)
        for d in detections:
            d.peak_db = 20 * math.log10(d.peak_mag / ref)
    detections.sort(key=lambda d: (d.image_index, d.row, d.col))
    return DaftResult(detections, best[1], best[2], rejected)


def estimate(
    y: np.ndarray,
    x_grid: SymbolGrid | np.ndarray,
    params: AfdmParams,
    detector: CfarConfig | None = None,
    dechirp: bool = True,
) -> DetectionList:
    """Detections of all targets from the DAFT-domain received block ``y``."""
    return estimate_full(y, x_grid, params, detector, dechirp).detections
