"""Experiment configuration: key schema, loading, presets and validation.

A config file is YAML (JSON also parses) with these top-level sections::

    params:      scale (full | desk) plus any AfdmParams field to override
    targets:     list of {delay_bins | range_m, normalized_doppler | velocity_mps, gain}
    snr_db:      echo-to-noise ratio in dB (omit or null for noiseless)
    sweep:       {var: snr_db | nu | velocity_mps, values: [...]} or {var, start, stop, step}
    methods:     subset of afdm_time, afdm_daft, ofdm_division
    trials:      Monte Carlo trials per sweep point
    seed:        64-bit key of the counter-based generator
    modulation_order: 4 | 16 | 64
    detector:    CfarConfig fields (mode, threshold_db, pfa, guard, train)
    output:      {dir, format: csv | json, svg: bool, rdm: bool}

A sweep over ``nu`` or ``velocity_mps`` sets the Doppler of the first target.
"""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from .channel import Target
from .detection import CfarConfig
from .params import FULL_SCALE, DESK_SCALE, AfdmParams, ParameterError, default_c2, recommended_c1
from .pipeline import METHODS
from .transforms import SUPPORTED_ORDERS

SCALES = {"full": FULL_SCALE, "desk": DESK_SCALE}
SWEEP_VARS = ("snr_db", "nu", "velocity_mps")
TOP_KEYS = ("params", "targets", "snr_db", "sweep", "methods", "trials", "seed", "modulation_order", "detector", "output")
PARAM_KEYS = ("scale",) + tuple(f.name for f in fields(AfdmParams))
TARGET_KEYS = ("delay_bins", "range_m", "normalized_doppler", "velocity_mps", "gain")
SWEEP_KEYS = ("var", "values", "start", "stop", "step")
DETECTOR_KEYS = tuple(f.name for f in fields(CfarConfig))
OUTPUT_KEYS = ("dir", "format", "svg", "rdm")


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    params: dict = field(default_factory=lambda: {"scale": "desk"})
    targets: list[dict] = field(default_factory=list)
    snr_db: float | None = None
    sweep: dict | None = None
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    trials: int = 1
    seed: int = 0
    modulation_order: int = 16
    detector: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    # -- resolution into library objects ---------------------------------
    def afdm_params(self) -> AfdmParams:
        raw = dict(self.params)
        base = SCALES[raw.pop("scale", "desk")]
        values = asdict(base)
        values.update(raw)
        # keep the recommended chirp rates unless they were given explicitly
        if "c1" not in raw:
            values["c1"] = recommended_c1(values["n_subcarriers"], values["alpha_max"], values["k_v"])
        if "c2" not in raw:
            values["c2"] = default_c2(values["n_subcarriers"])
        return AfdmParams(**values)

    def build_targets(self, params: AfdmParams) -> list[Target]:
        out = []
        for t in self.targets:
            if "range_m" in t and "delay_bins" not in t:
                l = params.range_to_delay_bins(float(t["range_m"]))
            else:
                l = int(t.get("delay_bins", 0))
            if "velocity_mps" in t and "normalized_doppler" not in t:
                nu = params.velocity_to_doppler(float(t["velocity_mps"])) / params.subcarrier_spacing_hz
            else:
                nu = float(t.get("normalized_doppler", 0.0))
            out.append(Target(l, nu, complex(t.get("gain", 1.0))))
        return out

    def detector_config(self) -> CfarConfig:
        d = dict(self.detector)
        for k in ("guard", "train"):
            if k in d:
                d[k] = tuple(int(v) for v in d[k])
        return CfarConfig(**d)

    def sweep_values(self) -> list[float]:
        if not self.sweep:
            return [math.nan]
        if "values" in self.sweep:
            return [float(v) for v in self.sweep["values"]]
        start, stop, step = (float(self.sweep[k]) for k in ("start", "stop", "step"))
        if step <= 0 or stop < start:
            return []
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]

    @property
    def sweep_var(self) -> str:
        return self.sweep["var"] if self.sweep else "none"

    def point(self, value: float, params: AfdmParams) -> tuple[list[Target], float]:
        """Targets and SNR at one sweep point."""
        targets = self.build_targets(params)
        snr = math.inf if self.snr_db is None else float(self.snr_db)
        var = self.sweep_var
        if var == "snr_db":
            snr = value
        elif var in ("nu", "velocity_mps") and targets:
            nu = value if var == "nu" else params.velocity_to_doppler(value) / params.subcarrier_spacing_hz
            t0 = targets[0]
            targets[0] = Target(t0.delay_bins, nu, t0.gain)
        return targets, snr

    @property
    def out_dir(self) -> Path:
        return Path(self.output.get("dir", "results"))

    @property
    def out_format(self) -> str:
        return self.output.get("format", "csv")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["targets"] = [{k: (str(v) if isinstance(v, complex) else v) for k, v in t.items()} for t in d["targets"]]
        return d


def from_dict(raw: dict) -> ExperimentConfig:
    """Build a config from parsed file contents, rejecting unknown keys."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of sections")
    bad = [k for k in raw if k not in TOP_KEYS]
    for section, allowed in (("params", PARAM_KEYS), ("sweep", SWEEP_KEYS), ("detector", DETECTOR_KEYS), ("output", OUTPUT_KEYS)):
        value = raw.get(section) or {}
        if not isinstance(value, dict):
            raise ConfigError(f"section {section!r} must be a mapping")
        bad += [f"{section}.{k}" for k in value if k not in allowed]
    for i, t in enumerate(raw.get("targets") or []):
        if not isinstance(t, dict):
            raise ConfigError(f"targets[{i}] must be a mapping")
        bad += [f"targets[{i}].{k}" for k in t if k not in TARGET_KEYS]
    if bad:
        raise ConfigError("unknown config keys: " + ", ".join(bad))
    cfg = ExperimentConfig()
    for k, v in copy.deepcopy(raw).items():
        if v is not None or k in ("snr_db", "sweep"):
            setattr(cfg, k, v)
    if isinstance(cfg.methods, str):
        cfg.methods = [cfg.methods]
    return cfg


def load_raw(path: str | Path) -> dict:
    """Parsed contents of a YAML/JSON config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping of sections")
    return raw


def load_config(path: str | Path) -> ExperimentConfig:
    return from_dict(load_raw(path))


def merge(base: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    """Section-wise update: mappings are merged key by key, everything else replaced."""
    raw = base.to_dict()
    for k, v in overrides.items():
        # a sweep is replaced whole so values and start/stop/step never mix
        if k != "sweep" and isinstance(v, dict) and isinstance(raw.get(k), dict):
            raw[k] = {**raw[k], **v}
        else:
            raw[k] = v
    return from_dict(raw)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" or "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.level}: {self.message}"


def validate(cfg: ExperimentConfig) -> list[Diagnostic]:
    """All problems with ``cfg``; an empty list means it can be run."""
    diags: list[Diagnostic] = []

    def err(msg):
        diags.append(Diagnostic("error", msg))

    scale = cfg.params.get("scale", "desk")
    if scale not in SCALES:
        err(f"params.scale must be one of {sorted(SCALES)}, got {scale!r}")
        return diags
    try:
        params = cfg.afdm_params()
    except (ParameterError, TypeError, ValueError) as exc:
        err(f"params: {exc}")
        return diags

    if not cfg.methods:
        err("at least one method is required")
    for m in cfg.methods:
        if m not in METHODS:
            err(f"unknown method {m!r}; expected a subset of {list(METHODS)}")
    if not isinstance(cfg.trials, int) or cfg.trials < 1:
        err(f"trials must be an integer >= 1, got {cfg.trials!r}")
    if not isinstance(cfg.seed, int) or cfg.seed < 0:
        err(f"seed must be a non-negative integer, got {cfg.seed!r}")
    if cfg.modulation_order not in SUPPORTED_ORDERS:
        err(f"modulation_order must be one of {SUPPORTED_ORDERS}")
    try:
        cfg.detector_config()
    except (TypeError, ValueError) as exc:
        err(f"detector: {exc}")
    if cfg.out_format not in ("csv", "json"):
        err(f"output.format must be csv or json, got {cfg.out_format!r}")

    if cfg.sweep:
        if cfg.sweep.get("var") not in SWEEP_VARS:
            err(f"sweep.var must be one of {list(SWEEP_VARS)}")
        elif "values" not in cfg.sweep and not all(k in cfg.sweep for k in ("start", "stop", "step")):
            err("sweep needs either values or start/stop/step")
        elif not cfg.sweep_values():
            err("sweep grid is empty")
        elif cfg.sweep["var"] != "snr_db" and not cfg.targets:
            err("a Doppler sweep needs at least one target")

    try:
        targets = cfg.build_targets(params)
    except (TypeError, ValueError) as exc:
        err(f"targets: {exc}")
        return diags
    nus = [t.normalized_doppler for t in targets]
    if cfg.sweep and cfg.sweep.get("var") in ("nu", "velocity_mps") and targets and cfg.sweep_values():
        per_point = [cfg.point(v, params)[0][0].normalized_doppler for v in cfg.sweep_values()]
        nus += per_point
    for i, t in enumerate(targets):
        for p in t.problems(params):
            err(f"target {i}: {p}")
    limit = params.alpha_max + 0.5
    if any(abs(nu) > limit for nu in nus):
        worst = max(nus, key=abs)
        diags.append(Diagnostic("warning", f"normalized Doppler {worst:.3f} beyond +/-{limit} (alpha_max + 1/2)"))
    return diags


def check(cfg: ExperimentConfig) -> None:
    errors = [d for d in validate(cfg) if d.level == "error"]
    if errors:
        raise ConfigError("; ".join(d.message for d in errors))


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _desk_on_grid_doppler(bin_offset: int) -> float:
    """Normalized Doppler that lands exactly on a desk-scale slow-time bin."""
    return bin_offset / (DESK_SCALE.n_symbols * DESK_SCALE.symbol_ratio)


_FIG6_NU = _desk_on_grid_doppler(122)

PRESETS: dict[str, dict] = {
    "table1": {
        "params": {"scale": "full"},
        "targets": [{"delay_bins": 128, "normalized_doppler": 0.0}],
        "methods": ["afdm_time"],
        "output": {"rdm": False},
    },
    "desk": {
        "params": {"scale": "desk"},
        "targets": [{"delay_bins": 12, "normalized_doppler": 0.45}],
        "snr_db": 10.0,
        "methods": list(METHODS),
    },
    "fig3": {
        "params": {"scale": "desk"},
        "targets": [{"delay_bins": 16, "normalized_doppler": 0.1}],
        "snr_db": 10.0,
        "sweep": {"var": "nu", "values": [0.1, 0.98]},
        "methods": list(METHODS),
        "trials": 10,
    },
    "fig4": {
        "params": {"scale": "desk"},
        "targets": [{"delay_bins": 16, "normalized_doppler": 0.1}],
        "sweep": {"var": "snr_db", "start": -20.0, "stop": 20.0, "step": 5.0},
        "methods": list(METHODS),
        "trials": 20,
        "output": {"rdm": False},
    },
    "fig5": {
        "params": {"scale": "desk"},
        "targets": [{"delay_bins": 16, "normalized_doppler": 0.0}],
        "snr_db": 0.0,
        "sweep": {"var": "nu", "start": 0.0, "stop": 2.0, "step": 0.1},
        "methods": list(METHODS),
        "output": {"rdm": False},
    },
    "fig6": {
        "params": {"scale": "desk"},
        "targets": [
            {"delay_bins": 16, "normalized_doppler": _FIG6_NU},
            {"delay_bins": 17, "normalized_doppler": _FIG6_NU},
            {"delay_bins": 17, "normalized_doppler": _desk_on_grid_doppler(123)},
        ],
        "snr_db": 0.0,
        "methods": ["afdm_daft"],
        "trials": 20,
    },
    "table2": {
        "params": {"scale": "full"},
        "targets": [{"delay_bins": 128, "velocity_mps": 63.9}],
        "snr_db": 10.0,
        "sweep": {"var": "velocity_mps", "values": [63.9, 197.6, 284.1]},
        "methods": ["afdm_time", "afdm_daft"],
        "output": {"rdm": False},
    },
}


def preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return from_dict(copy.deepcopy(PRESETS[name]))
