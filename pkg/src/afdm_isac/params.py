"""Waveform and grid parameters for AFDM sensing simulations."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from fractions import Fraction

SPEED_OF_LIGHT = 3.0e8  # m/s, rounded value used throughout the reported tables

# c2 = 1 / (2 N K) with this K unless overridden
DEFAULT_C2_DIVISOR = 64


class ParameterError(ValueError):
    """Raised when waveform parameters violate their constraints."""


def recommended_c1(n_subcarriers: int, alpha_max: int, k_v: int) -> float:
    """Chirp rate that separates all delay/Doppler paths in the DAFT domain.

    Returns ``(2 (alpha_max + k_v) + 1) / (2 N)``, so ``2 N c1`` is an odd
    integer.
    """
    return (2 * (alpha_max + k_v) + 1) / (2 * n_subcarriers)


def default_c2(n_subcarriers: int, divisor: int = DEFAULT_C2_DIVISOR) -> float:
    return float(Fraction(1, 2 * n_subcarriers * divisor))


@dataclass(frozen=True)
class AfdmParams:
    """All constants of one AFDM frame.

    Attributes
    ----------
    n_subcarriers : int
        DAFT size ``N``.
    n_symbols : int
        Number of AFDM symbols per frame (slow-time length).
    n_cpp : int
        Chirp-periodic prefix length in samples.
    c1, c2 : float
        AFDM chirp parameters.
    alpha_max : int
        Largest integer normalized Doppler the design supports.
    k_v : int
        Guard taps reserved for fractional Doppler spread.
    carrier_hz, bandwidth_hz : float
        RF carrier and sampled bandwidth.
    """

    n_subcarriers: int
    n_symbols: int
    n_cpp: int
    c1: float
    c2: float
    alpha_max: int = 2
    k_v: int = 4
    carrier_hz: float = 24e9
    bandwidth_hz: float = 93.1e6

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ParameterError("; ".join(problems))

    @classmethod
    def recommended(
        cls,
        n_subcarriers: int,
        n_symbols: int,
        n_cpp: int,
        alpha_max: int = 2,
        k_v: int = 4,
        carrier_hz: float = 24e9,
        bandwidth_hz: float = 93.1e6,
        c2: float | None = None,
    ) -> "AfdmParams":
        """Build parameters with ``c1`` from the path-separation rule and a small rational ``c2``."""
        return cls(
            n_subcarriers=n_subcarriers,
            n_symbols=n_symbols,
            n_cpp=n_cpp,
            c1=recommended_c1(n_subcarriers, alpha_max, k_v),
            c2=default_c2(n_subcarriers) if c2 is None else c2,
            alpha_max=alpha_max,
            k_v=k_v,
            carrier_hz=carrier_hz,
            bandwidth_hz=bandwidth_hz,
        )

    def problems(self) -> list[str]:
        out = []
        if self.n_subcarriers < 1:
            out.append(f"n_subcarriers must be positive, got {self.n_subcarriers}")
        if self.n_symbols < 1:
            out.append(f"n_symbols must be positive, got {self.n_symbols}")
        if not 0 <= self.n_cpp < max(self.n_subcarriers, 1):
            out.append(f"n_cpp must satisfy 0 <= n_cpp < N, got {self.n_cpp}")
        if self.alpha_max < 0 or self.k_v < 0:
            out.append("alpha_max and k_v must be non-negative")
        if self.carrier_hz <= 0 or self.bandwidth_hz <= 0:
            out.append("carrier_hz and bandwidth_hz must be positive")
        # c2 = 0 is allowed so that the OFDM special case c1 = c2 = 0 can be built
        if self.n_subcarriers >= 1 and not 0 <= self.c2 < 1 / (2 * self.n_subcarriers):
            out.append(f"c2 must satisfy 0 <= c2 < 1/(2N), got {self.c2}")
        return out

    def replace(self, **changes) -> "AfdmParams":
        values = asdict(self)
        values.update(changes)
        return AfdmParams(**values)

    # derived quantities -------------------------------------------------
    @property
    def sample_interval_s(self) -> float:
        return 1.0 / self.bandwidth_hz

    @property
    def subcarrier_spacing_hz(self) -> float:
        return self.bandwidth_hz / self.n_subcarriers

    @property
    def symbol_duration_s(self) -> float:
        return self.n_subcarriers * self.sample_interval_s

    @property
    def cpp_duration_s(self) -> float:
        return self.n_cpp * self.sample_interval_s

    @property
    def total_symbol_duration_s(self) -> float:
        return (self.n_subcarriers + self.n_cpp) * self.sample_interval_s

    @property
    def alt_spacing_hz(self) -> float:
        """Slow-time Doppler span ``1 / T_AFDM``."""
        return 1.0 / self.total_symbol_duration_s

    @property
    def symbol_ratio(self) -> float:
        """``(N + N_cp) / N``, the ratio between the two Doppler normalizations."""
        return (self.n_subcarriers + self.n_cpp) / self.n_subcarriers

    @property
    def frame_length(self) -> int:
        return (self.n_subcarriers + self.n_cpp) * self.n_symbols

    @property
    def chirp_index(self) -> int:
        """``2 N c1`` rounded to the nearest integer."""
        return round(2 * self.n_subcarriers * self.c1)

    @property
    def range_resolution_m(self) -> float:
        return SPEED_OF_LIGHT / (2 * self.bandwidth_hz)

    @property
    def doppler_bin_hz(self) -> float:
        return self.alt_spacing_hz / self.n_symbols

    @property
    def velocity_resolution_mps(self) -> float:
        return self.doppler_to_velocity(self.doppler_bin_hz)

    @property
    def processing_gain_db(self) -> float:
        return 10 * math.log10(self.n_subcarriers * self.n_symbols)

    @property
    def max_unambiguous_doppler_hz(self) -> float:
        return self.alt_spacing_hz / 2

    def doppler_to_velocity(self, doppler_hz: float) -> float:
        return doppler_hz * SPEED_OF_LIGHT / (2 * self.carrier_hz)

    def velocity_to_doppler(self, velocity_mps: float) -> float:
        return 2 * velocity_mps * self.carrier_hz / SPEED_OF_LIGHT

    def delay_bins_to_range(self, bins: float) -> float:
        return bins * SPEED_OF_LIGHT * self.sample_interval_s / 2

    def range_to_delay_bins(self, range_m: float) -> int:
        return round(2 * range_m / SPEED_OF_LIGHT / self.sample_interval_s)


# Reference setup: 24 GHz carrier, 93.1 MHz bandwidth, N = 4096, 256 symbols
# with a 256-sample prefix.
FULL_SCALE = AfdmParams.recommended(n_subcarriers=4096, n_symbols=256, n_cpp=256)

# Same subcarrier spacing (and therefore the same normalized-Doppler to velocity
# map) on a grid small enough for quick Monte Carlo runs.
DESK_SCALE = AfdmParams.recommended(
    n_subcarriers=512,
    n_symbols=64,
    n_cpp=32,
    bandwidth_hz=93.1e6 * 512 / 4096,
)
