"""Point-target echo synthesis and the analytic DAFT-domain channel model.

The time-domain echo follows

    r[n] = sum_i h~_i s~[n - l_i] exp(j 2 pi f_i n) + w[n]

over the whole serialized frame (``n`` counts samples from the first prefix
sample). ``build_daft_model`` evaluates the same echo in closed form after
prefix removal and a per-symbol DAFT; the two agree to rounding error, which
is what ties the simulator to the estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import AfdmParams, SPEED_OF_LIGHT
from .transforms import SymbolGrid, TimeFrame, _grid_data


class ScenarioError(ValueError):
    """A target or scenario violates the simulation assumptions."""


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------

def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox4x64 generator keyed by ``seed``; ``stream`` selects a disjoint substream.

    Substream ``t`` starts ``t * 2**128`` draws into the keyed sequence, so
    trials seeded with the same key and different stream indices never
    overlap and do not depend on the order they are run in.
    """
    bitgen = np.random.Philox(key=int(seed) & (2**64 - 1))
    if stream:
        bitgen = bitgen.jumped(int(stream))
    return np.random.Generator(bitgen)


def gen_noise(shape, sigma2: float, seed: int | np.random.Generator, stream: int = 0) -> np.ndarray:
    """I.i.d. circularly-symmetric complex Gaussian samples with variance ``sigma2``."""
    if sigma2 < 0:
        raise ValueError("noise variance must be non-negative")
    if sigma2 == 0:
        return np.zeros(shape, dtype=np.complex128)
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed, stream)
    scale = math.sqrt(sigma2 / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Target:
    """One point scatterer on the integer delay grid.

    ``delay_bins`` is the round-trip delay in samples and
    ``normalized_doppler`` the Doppler shift divided by the subcarrier
    spacing. ``from_physical`` converts range / radial velocity.
    """

    delay_bins: int
    normalized_doppler: float
    gain: complex = 1.0
    range_m: float | None = None  # absolute range when built from physical units

    @classmethod
    def from_physical(cls, range_m: float, velocity_mps: float, params: AfdmParams, gain: complex = 1.0):
        doppler = params.velocity_to_doppler(velocity_mps)
        return cls(
            delay_bins=params.range_to_delay_bins(range_m),
            normalized_doppler=doppler / params.subcarrier_spacing_hz,
            gain=gain,
            range_m=range_m,
        )

    # derived -------------------------------------------------------------
    def doppler_hz(self, params: AfdmParams) -> float:
        return self.normalized_doppler * params.subcarrier_spacing_hz

    def velocity_mps(self, params: AfdmParams) -> float:
        return params.doppler_to_velocity(self.doppler_hz(params))

    def delay_s(self, params: AfdmParams) -> float:
        if self.range_m is not None:
            return 2 * self.range_m / SPEED_OF_LIGHT
        return self.delay_bins * params.sample_interval_s

    def per_sample_doppler(self, params: AfdmParams) -> float:
        """``f_i = f_d t_s`` in cycles per sample."""
        return self.normalized_doppler / params.n_subcarriers

    def integer_doppler(self) -> int:
        """Integer part ``alpha`` with the fraction in (-1/2, 1/2]."""
        return int(math.ceil(self.normalized_doppler - 0.5))

    def fractional_doppler(self) -> float:
        return self.normalized_doppler - self.integer_doppler()

    def effective_gain(self, params: AfdmParams) -> complex:
        return complex(self.gain) * np.exp(-2j * np.pi * self.doppler_hz(params) * self.delay_s(params))

    def problems(self, params: AfdmParams) -> list[str]:
        out = []
        if not 0 <= self.delay_bins < max(params.n_cpp, 1) or (params.n_cpp == 0 and self.delay_bins != 0):
            out.append(f"delay {self.delay_bins} bins outside [0, N_cp={params.n_cpp})")
        return out


@dataclass
class Scenario:
    params: AfdmParams
    targets: list[Target] = field(default_factory=list)
    snr_db: float = math.inf
    seed: int = 0
    stream: int = 0

    def validate(self) -> None:
        problems = [p for t in self.targets for p in t.problems(self.params)]
        if problems:
            raise ScenarioError("; ".join(problems))


def noise_variance(scenario: Scenario, frame_power: float) -> float:
    """Per-sample noise power giving the requested echo-to-noise ratio."""
    if math.isinf(scenario.snr_db) and scenario.snr_db > 0:
        return 0.0
    signal = sum(abs(t.effective_gain(scenario.params)) ** 2 for t in scenario.targets) * frame_power
    if signal == 0:
        # no echo: interpret the SNR relative to a unit-power reference echo
        signal = frame_power
    return signal / 10 ** (scenario.snr_db / 10)


def synthesize_echo(
    frame: TimeFrame | np.ndarray,
    scenario: Scenario,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Serialized received echo for all targets plus receiver noise."""
    params = scenario.params
    scenario.validate()
    s = np.asarray(frame.samples if isinstance(frame, TimeFrame) else frame, dtype=np.complex128)
    if s.shape != (params.frame_length,):
        raise ScenarioError(f"frame length {s.shape} != ({params.frame_length},)")
    n = np.arange(s.size, dtype=np.float64)
    r = np.zeros_like(s)
    for t in scenario.targets:
        l = t.delay_bins
        f = t.per_sample_doppler(params)
        delayed = np.zeros_like(s)
        delayed[l:] = s[: s.size - l]
        r += t.effective_gain(params) * delayed * np.exp(2j * np.pi * np.mod(f * n, 1.0))
    sigma2 = noise_variance(scenario, float(np.mean(np.abs(s) ** 2)))
    if sigma2 > 0:
        if rng is None:
            rng = make_rng(scenario.seed, scenario.stream)
        r += gen_noise(s.shape, sigma2, rng)
    return r


# ---------------------------------------------------------------------------
# analytic DAFT-domain model
# ---------------------------------------------------------------------------

def _dirichlet_kernel(arg: np.ndarray, n: int) -> np.ndarray:
    """``(exp(-j 2 pi x) - 1) / (exp(-j 2 pi x / N) - 1)`` with the removable singularity set to N."""
    num = np.exp(-2j * np.pi * np.mod(arg, 1.0)) - 1
    den = np.exp(-2j * np.pi * np.mod(arg / n, 1.0)) - 1
    singular = np.abs(den) <= 1e-12
    out = np.empty_like(num)
    out[~singular] = num[~singular] / den[~singular]
    # x = m N: every term of the underlying geometric sum is 1
    out[singular] = n
    return out


def path_matrix(target: Target, params: AfdmParams) -> np.ndarray:
    """Dense ``N x N`` DAFT-domain matrix ``H_i`` for one target."""
    n = params.n_subcarriers
    l = target.delay_bins
    nu = target.normalized_doppler
    p = np.arange(n, dtype=np.float64)[:, None]
    q = np.arange(n, dtype=np.float64)[None, :]
    phase = np.mod(params.c1 * l * l - q * l / n + params.c2 * (q * q - p * p), 1.0)
    kernel = _dirichlet_kernel(p - q - nu + 2 * n * params.c1 * l, n)
    return np.exp(2j * np.pi * phase) * kernel / n


def peak_shift(target: Target, params: AfdmParams) -> int:
    """``loc = (2 N c1 l - alpha) mod N``: column of the peak in row 0 of ``H_i``."""
    return (params.chirp_index * target.delay_bins - target.integer_doppler()) % params.n_subcarriers


def build_daft_model(scenario: Scenario, x_grid: SymbolGrid | np.ndarray) -> np.ndarray:
    """Noiseless DAFT-domain echo ``sum_i h~_i H_i X D_i`` (prefix removed, per-symbol DAFT).

    ``D_i = diag(exp(+j 2 pi f_i (N + N_cp) k))``. Each path also carries
    ``exp(j 2 pi f_i N_cp)``: the first kept sample of every symbol sits
    ``N_cp`` samples into the frame-wide time axis used by the echo.
    """
    params = scenario.params
    scenario.validate()
    x = _grid_data(x_grid)
    n, ncp, nsym = params.n_subcarriers, params.n_cpp, params.n_symbols
    k = np.arange(nsym, dtype=np.float64)
    y = np.zeros((n, nsym), dtype=np.complex128)
    for t in scenario.targets:
        f = t.per_sample_doppler(params)
        d = np.exp(2j * np.pi * np.mod(f * ((n + ncp) * k + ncp), 1.0))
        y += t.effective_gain(params) * (path_matrix(t, params) @ x) * d[None, :]
    return y
