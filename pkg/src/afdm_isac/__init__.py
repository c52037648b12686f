"""AFDM-based integrated sensing and communication: waveform, echo model and radar estimators."""

__version__ = "0.1.0"

from .channel import Scenario, Target, synthesize_echo
from .detection import CfarConfig
from .estimator_daft import estimate as estimate_daft
from .estimator_time import fccr_rdm, rdm_peaks
from .imaging import Detection, RadarImage
from .ofdm import ofdm_modulate, symbol_division_rdm
from .params import DESK_SCALE, FULL_SCALE, AfdmParams
from .transforms import daft, deframe, idaft, modulate_frame

__all__ = [
    "AfdmParams",
    "CfarConfig",
    "DESK_SCALE",
    "Detection",
    "FULL_SCALE",
    "RadarImage",
    "Scenario",
    "Target",
    "daft",
    "deframe",
    "estimate_daft",
    "fccr_rdm",
    "idaft",
    "modulate_frame",
    "ofdm_modulate",
    "rdm_peaks",
    "symbol_division_rdm",
    "synthesize_echo",
]
