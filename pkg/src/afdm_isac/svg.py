"""Minimal self-contained SVG writers for heatmaps and line plots."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def _colour(v: float) -> str:
    """Dark blue to yellow ramp for v in [0, 1]."""
    v = float(np.clip(v, 0.0, 1.0))
    r = int(round(255 * min(1.0, 2 * v)))
    g = int(round(255 * v))
    b = int(round(255 * (1 - v) * 0.6))
    return f"#{r:02x}{g:02x}{b:02x}"


def _pool(a: np.ndarray, max_cells: int) -> np.ndarray:
    """Max-pool so neither axis exceeds ``max_cells`` (peaks stay visible)."""
    fr = -(-a.shape[0] // max_cells)
    fc = -(-a.shape[1] // max_cells)
    if fr == 1 and fc == 1:
        return a
    rows, cols = -(-a.shape[0] // fr), -(-a.shape[1] // fc)
    padded = np.full((rows * fr, cols * fc), -np.inf)
    padded[: a.shape[0], : a.shape[1]] = a
    return padded.reshape(rows, fr, cols, fc).max(axis=(1, 3))


def heatmap(values_db: np.ndarray, path: str | Path, title: str = "", dynamic_range_db: float = 60.0,
            xlabel: str = "Doppler bin", ylabel: str = "row", max_cells: int = 128) -> Path:
    a = _pool(np.asarray(values_db, dtype=float), max_cells)
    top = float(np.max(a))
    norm = (a - (top - dynamic_range_db)) / dynamic_range_db
    cell = max(2, 384 // max(a.shape))
    w, h = a.shape[1] * cell, a.shape[0] * cell
    m = 50
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w + 2 * m}" height="{h + 2 * m}">',
        f'<text x="{m}" y="{m // 2}" font-size="14">{escape(title)}</text>',
        f'<text x="{m + w // 2}" y="{h + m + 30}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{m + h // 2}" font-size="12" transform="rotate(-90 15 {m + h // 2})">{escape(ylabel)}</text>',
    ]
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            parts.append(
                f'<rect x="{m + j * cell}" y="{m + i * cell}" width="{cell}" height="{cell}" fill="{_colour(norm[i, j])}"/>'
            )
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path


def line_plot(x, series: dict[str, list[float]], path: str | Path, title: str = "",
              xlabel: str = "", ylabel: str = "") -> Path:
    x = np.asarray(x, dtype=float)
    w, h, m = 520, 360, 60
    ys = np.array([v for vals in series.values() for v in vals], dtype=float)
    ys = ys[np.isfinite(ys)]
    lo, hi = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
    if hi == lo:
        lo, hi = lo - 1, hi + 1
    x0, x1 = (float(x.min()), float(x.max())) if x.size else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1

    def px(v):
        return m + (v - x0) / (x1 - x0) * w

    def py(v):
        return m + h - (v - lo) / (hi - lo) * h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w + 2 * m + 120}" height="{h + 2 * m}">',
        f'<text x="{m}" y="{m // 2}" font-size="14">{escape(title)}</text>',
        f'<rect x="{m}" y="{m}" width="{w}" height="{h}" fill="none" stroke="black"/>',
        f'<text x="{m + w // 2}" y="{h + m + 40}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{m + h // 2}" font-size="12" transform="rotate(-90 15 {m + h // 2})">{escape(ylabel)}</text>',
        f'<text x="{m}" y="{h + m + 18}" font-size="10">{x0:g}</text>',
        f'<text x="{m + w}" y="{h + m + 18}" font-size="10" text-anchor="end">{x1:g}</text>',
        f'<text x="{m - 5}" y="{m + h}" font-size="10" text-anchor="end">{lo:.1f}</text>',
        f'<text x="{m - 5}" y="{m + 10}" font-size="10" text-anchor="end">{hi:.1f}</text>',
    ]
    for n, (name, vals) in enumerate(series.items()):
        colour = PALETTE[n % len(PALETTE)]
        pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(x, vals) if np.isfinite(b))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="2"/>')
        parts.append(f'<text x="{m + w + 10}" y="{m + 15 + 18 * n}" font-size="12" fill="{colour}">{escape(name)}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path
