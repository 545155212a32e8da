"""Byte-stable artifact writers: CSV, JSON and the SVG curve plot.

Every float goes through :func:`fmt_float` (12 significant digits), so two
runs on the same input write identical bytes.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .spectra import DimensionCurve, SpectrumSlice

SIG_DIGITS = 12


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.{SIG_DIGITS}g}"
    return "0" if s == "-0" else s


def clean(obj):
    """JSON-ready copy: floats rounded to 12 significant digits, numpy scalars unwrapped."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return fmt_float(x)
        return float(fmt_float(x))
    return obj


def dumps(obj) -> str:
    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def write_json(path: Path, obj) -> Path:
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


CURVE_COLUMNS = ("t", "D_u", "D_s", "method", "error")
SPECTRUM_COLUMNS = ("value", "kind", "period_bound")


def write_curve_csv(curve: DimensionCurve, path: Path) -> Path:
    rows = ((float(s.t), float(s.d_u), float(s.d_s), s.method, float(s.error)) for s in curve.samples)
    return _write_csv(path, CURVE_COLUMNS, rows)


def write_spectrum_csv(sl: SpectrumSlice, path: Path) -> Path:
    return _write_csv(path, SPECTRUM_COLUMNS, ((float(v), sl.kind, sl.max_period) for v in sl.values))


def digest(obj) -> str:
    return hashlib.sha256(dumps(obj).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 20, 20, 50


def _c(v: float) -> str:
    return f"{v:.3f}"


def _step_path(xs: Sequence[float], ys: Sequence[float]) -> str:
    parts = [f"M{_c(xs[0])},{_c(ys[0])}"]
    for x, y in zip(xs[1:], ys[1:]):
        parts.append(f"H{_c(x)}V{_c(y)}")
    return "".join(parts)


def emit_curve_svg(curve: DimensionCurve, path: Path | str) -> Path:
    """Step-plus-marker plot of ``D_u`` (solid) and ``D_s`` (dashed) against ``t``."""
    samples = list(curve.samples)
    if not samples:
        raise ValueError("curve has no samples")
    ts = [float(s.t) for s in samples]
    t0, t1 = min(ts), max(ts)
    if t1 == t0:
        t0, t1 = t0 - 0.5, t1 + 0.5
    ymax = max(1e-9, max(max(s.d_u, s.d_s) for s in samples))
    ytop = ymax * 1.1
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(t):
        return MARGIN_L + (t - t0) / (t1 - t0) * pw

    def py(d):
        return MARGIN_T + ph - d / ytop * ph

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T + ph}" x2="{MARGIN_L + pw}" y2="{MARGIN_T + ph}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{MARGIN_T + ph}" stroke="black"/>',
        f'<text x="{MARGIN_L + pw // 2}" y="{HEIGHT - 10}" font-size="14" text-anchor="middle">t</text>',
        f'<text x="15" y="{MARGIN_T + ph // 2}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 15 {MARGIN_T + ph // 2})">dimension</text>',
    ]
    for t in (t0, t1):
        lines.append(f'<text x="{_c(px(t))}" y="{MARGIN_T + ph + 18}" font-size="11" text-anchor="middle">{fmt_float(t)}</text>')
    for d in (0.0, ymax):
        lines.append(f'<text x="{MARGIN_L - 6}" y="{_c(py(d) + 4)}" font-size="11" text-anchor="end">{fmt_float(d)}</text>')
    series = (("D_u", [s.d_u for s in samples], "#1f77b4", ""), ("D_s", [s.d_s for s in samples], "#d62728", ' stroke-dasharray="6,4"'))
    xs = [px(t) for t in ts]
    for name, ds, color, dash in series:
        ys = [py(d) for d in ds]
        if len(samples) > 1:
            lines.append(f'<path id="{name}" d="{_step_path(xs, ys)}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        for x, y in zip(xs, ys):
            lines.append(f'<circle class="{name}" cx="{_c(x)}" cy="{_c(y)}" r="3" fill="{color}"/>')
    lines.append("</svg>")
    p = Path(path)
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return p


@dataclass
class RunReport:
    """Summary of one command run.

    ``elapsed`` is reported on the console but left out of ``report.json`` so
    that the file is byte-identical across runs.
    """

    command: str
    digest: str
    elapsed: float = 0.0
    files: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "digest": self.digest,
            "files": sorted(self.files),
            "summary": self.summary,
            "warnings": list(self.warnings),
        }
