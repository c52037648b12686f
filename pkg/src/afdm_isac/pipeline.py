"""One Monte Carlo trial: symbols, waveform, echo, estimator, image and detections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Scenario, make_rng, synthesize_echo
from .detection import CfarConfig
from .estimator_daft import estimate_full
from .estimator_time import fccr_rdm, rdm_peaks
from .imaging import DetectionList, RadarImage
from .ofdm import ofdm_modulate, symbol_division_rdm
from .transforms import SymbolGrid, daft, deframe, modulate_frame, random_grid

METHODS = ("afdm_time", "afdm_daft", "ofdm_division")

# rng streams inside one trial: symbols and noise never share a sequence
_SYMBOL_STREAM = 0
_NOISE_STREAM = 1


@dataclass
class TrialResult:
    method: str
    image: RadarImage
    detections: DetectionList


def trial_rngs(seed: int, trial: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent symbol and noise generators for trial ``trial``."""
    return make_rng(seed, 2 * trial + _SYMBOL_STREAM), make_rng(seed, 2 * trial + _NOISE_STREAM)


def run_method(
    method: str,
    scenario: Scenario,
    grid: SymbolGrid,
    noise_rng: np.random.Generator,
    detector: CfarConfig | None = None,
) -> TrialResult:
    """Transmit ``grid`` with the waveform of ``method``, echo it and process the echo."""
    params = scenario.params
    detector = detector or CfarConfig()
    if method == "ofdm_division":
        frame = ofdm_modulate(grid, params)
    elif method in ("afdm_time", "afdm_daft"):
        frame = modulate_frame(grid, params)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    received = deframe(synthesize_echo(frame, scenario, noise_rng), params)
    if method == "afdm_daft":
        result = estimate_full(daft(received, params), grid, params, detector)
        return TrialResult(method, result.image(params), result.detections)
    if method == "afdm_time":
        image = fccr_rdm(received, frame.matrix, params)
    else:
        image = symbol_division_rdm(received, grid, params)
    return TrialResult(method, image, rdm_peaks(image, detector=detector))


def run_trial(
    method: str,
    scenario: Scenario,
    trial: int = 0,
    order: int = 16,
    detector: CfarConfig | None = None,
) -> TrialResult:
    """Trial ``trial`` of ``scenario``; depends only on ``(scenario.seed, trial)``."""
    sym_rng, noise_rng = trial_rngs(scenario.seed, trial)
    grid = random_grid(sym_rng, scenario.params, order)
    return run_method(method, scenario, grid, noise_rng, detector)
