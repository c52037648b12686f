"""Configuration-driven experiment runner.

Every (method, sweep point, trial) task is independent and seeded by
``(seed, trial)`` alone, so tasks run in a thread pool and the outputs are
assembled in index order. Results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, svg
from .channel import Scenario
from .config import ExperimentConfig, check
from .metrics import image_pslr_db, image_snr_db, to_db
from .pipeline import run_trial

log = logging.getLogger(__name__)

THREADS_ENV = "AFDM_ISAC_THREADS"

METRIC_COLUMNS = ["method", "sweep_var", "sweep_value", "trial", "image_snr_db", "pslr_db", "detections"]
DETECTION_COLUMNS = [
    "method", "sweep_var", "sweep_value", "trial", "l_hat", "alpha_hat", "b_hat", "beta_hat",
    "f_d_hat_hz", "range_m", "velocity_mps", "peak_db",
]


@dataclass
class TaskResult:
    metrics: dict
    detections: list[dict]
    image_db: np.ndarray | None = None
    row_axis: str = "range_m"


@dataclass
class ResultBundle:
    out_dir: Path
    metrics: list[dict]
    detections: list[dict]
    summary: dict
    files: list[Path] = field(default_factory=list)


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
    return os.cpu_count() or 1


def _run_task(cfg: ExperimentConfig, params, method: str, value: float, trial: int, keep_image: bool) -> TaskResult:
    targets, snr = cfg.point(value, params)
    scenario = Scenario(params, targets, snr_db=snr, seed=cfg.seed)
    res = run_trial(method, scenario, trial, cfg.modulation_order, cfg.detector_config())
    mag = np.abs(res.image.data)
    has_peak = bool(mag.max() > 0)
    row = {
        "method": method,
        "sweep_var": cfg.sweep_var,
        "sweep_value": value,
        "trial": trial,
        "image_snr_db": image_snr_db(res.image) if has_peak else math.nan,
        "pslr_db": image_pslr_db(res.image) if has_peak else math.nan,
        "detections": len(res.detections),
    }
    dets = [
        {
            "method": method,
            "sweep_var": cfg.sweep_var,
            "sweep_value": value,
            "trial": trial,
            "l_hat": d.delay_bins,
            "alpha_hat": d.alpha_hat,
            "b_hat": d.b_hat,
            "beta_hat": d.beta_hat,
            "f_d_hat_hz": d.doppler_hz,
            "range_m": d.range_m,
            "velocity_mps": d.velocity_mps,
            "peak_db": d.peak_db,
        }
        for d in res.detections
    ]
    image = to_db(res.image) if keep_image else None
    return TaskResult(row, dets, image, "daft_row" if method == "afdm_daft" else "range_m")


def _finite(v):
    if isinstance(v, float):
        return float(v) if math.isfinite(v) else None
    return v


def _aggregate(metrics: list[dict], detections: list[dict], cfg: ExperimentConfig, values: list[float]) -> list[dict]:
    out = []
    for method in cfg.methods:
        for value in values:
            rows = [r for r in metrics if r["method"] == method and _same(r["sweep_value"], value)]
            snrs = np.array([r["image_snr_db"] for r in rows], dtype=float)
            pslrs = np.array([r["pslr_db"] for r in rows], dtype=float)
            first = [d for d in detections if d["method"] == method and _same(d["sweep_value"], value) and d["trial"] == 0]
            strongest = max(first, key=lambda d: d["peak_db"]) if first else None
            out.append({
                "method": method,
                "sweep_var": cfg.sweep_var,
                "sweep_value": _finite(value),
                "trials": len(rows),
                "image_snr_db_mean": _finite(float(np.mean(snrs))),
                "image_snr_db_std": _finite(float(np.std(snrs))),
                "pslr_db_mean": _finite(float(np.mean(pslrs))),
                "pslr_db_std": _finite(float(np.std(pslrs))),
                "detections_mean": float(np.mean([r["detections"] for r in rows])),
                "trial0_velocity_mps": strongest["velocity_mps"] if strongest else None,
                "trial0_range_m": strongest["range_m"] if strongest else None,
            })
    return out


def _same(a: float, b: float) -> bool:
    return a == b or (math.isnan(a) and math.isnan(b))


def _write_csv(path: Path, columns: list[str], rows: list[dict]) -> Path:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: repr(float(v)) if isinstance(v, float) else v for k, v in r.items()})
    return path


def _write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _json_rows(rows: list[dict]) -> list[dict]:
    return [{k: _finite(v) for k, v in r.items()} for r in rows]


def _write_rdm(path: Path, image_db: np.ndarray, params, method: str, value: float, row_axis: str) -> Path:
    nsym = image_db.shape[1]
    v_step = params.velocity_resolution_mps
    row_step = params.range_resolution_m if row_axis == "range_m" else 1.0
    header = (
        f"method={method} sweep_value={value!r} unit=dB rows={row_axis} row_start=0 row_step={row_step!r} "
        f"cols=velocity_mps col_start={-(nsym // 2) * v_step!r} col_step={v_step!r}"
    )
    np.savetxt(path, image_db, fmt="%.6f", delimiter=",", header=header)
    return path


def derived_table(params) -> dict:
    return {
        "subcarrier_spacing_hz": params.subcarrier_spacing_hz,
        "alt_spacing_hz": params.alt_spacing_hz,
        "symbol_duration_s": params.symbol_duration_s,
        "cpp_duration_s": params.cpp_duration_s,
        "total_symbol_duration_s": params.total_symbol_duration_s,
        "range_resolution_m": params.range_resolution_m,
        "velocity_resolution_mps": params.velocity_resolution_mps,
        "processing_gain_db": params.processing_gain_db,
        "max_unambiguous_doppler_hz": params.max_unambiguous_doppler_hz,
        "chirp_index": params.chirp_index,
        "c1": params.c1,
        "c2": params.c2,
    }


def run(cfg: ExperimentConfig, threads: int | None = None) -> ResultBundle:
    """Run every task of ``cfg`` and write the result files into its output directory."""
    check(cfg)
    params = cfg.afdm_params()
    values = cfg.sweep_values()
    keep_rdm = bool(cfg.output.get("rdm", True))
    want_svg = bool(cfg.output.get("svg", False))
    out_dir = cfg.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    tasks = [
        (method, pi, value, trial)
        for method in cfg.methods
        for pi, value in enumerate(values)
        for trial in range(cfg.trials)
    ]
    threads = threads or default_threads()
    log.info("running %d tasks on %d threads", len(tasks), threads)

    def job(task):
        method, _, value, trial = task
        return _run_task(cfg, params, method, value, trial, (keep_rdm or want_svg) and trial == 0)

    if threads == 1:
        results = [job(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, tasks))

    metrics = [r.metrics for r in results]
    detections = [d for r in results for d in r.detections]
    files: list[Path] = []
    if cfg.out_format == "json":
        files.append(_write_json(out_dir / "metrics.json", _json_rows(metrics)))
        files.append(_write_json(out_dir / "detections.json", _json_rows(detections)))
    else:
        files.append(_write_csv(out_dir / "metrics.csv", METRIC_COLUMNS, metrics))
        files.append(_write_csv(out_dir / "detections.csv", DETECTION_COLUMNS, detections))

    for (method, pi, value, trial), r in zip(tasks, results):
        if r.image_db is None:
            continue
        if keep_rdm:
            files.append(_write_rdm(out_dir / f"rdm_{method}_{pi}.csv", r.image_db, params, method, value, r.row_axis))
        if want_svg:
            files.append(svg.heatmap(r.image_db, out_dir / f"rdm_{method}_{pi}.svg",
                                     title=f"{method} point {pi}", ylabel=r.row_axis))

    aggregates = _aggregate(metrics, detections, cfg, values)
    if want_svg and cfg.sweep:
        series = {m: [a["image_snr_db_mean"] if a["image_snr_db_mean"] is not None else math.nan
                      for a in aggregates if a["method"] == m] for m in cfg.methods}
        files.append(svg.line_plot(values, series, out_dir / "image_snr.svg", title="mean image SNR",
                                   xlabel=cfg.sweep_var, ylabel="image SNR (dB)"))

    echo = cfg.to_dict()
    echo["output"] = {k: v for k, v in echo["output"].items() if k != "dir"}
    summary = {
        "version": __version__,
        "config": echo,
        "derived": derived_table(params),
        "aggregates": aggregates,
    }
    files.append(_write_json(out_dir / "summary.json", summary))
    return ResultBundle(out_dir, metrics, detections, summary, files)
