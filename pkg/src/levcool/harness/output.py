"""CSV and minimal SVG emission for sweep records."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .sweep import FORCE_COLUMNS, PHONON_COLUMNS, RunRecord

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=80, right=30, top=40, bottom=60)
PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#e5ae38")
# colour stops for the heatmap, dark to bright
COLOR_STOPS = ((0.0, (48, 18, 59)), (0.25, (70, 107, 227)), (0.5, (41, 187, 236)),
               (0.75, (164, 252, 60)), (1.0, (250, 186, 57)))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_csv(records: Sequence[RunRecord], columns: Sequence[str]) -> str:
    """CSV text with one header row; floats use repr so output is bit-stable."""
    if not records:
        raise ValueError("no records to write")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        row = dict(record.axes)
        row.update(record.outputs)
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def emit_csv(records: Sequence[RunRecord], columns: Sequence[str], path) -> Path:
    path = Path(path)
    path.write_text(format_csv(records, columns))
    return path


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / count))
    for mult in (1, 2, 5, 10):
        if (hi - lo) / (step * mult) <= count:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    return [t for t in np.arange(first, hi + step * 1e-9, step)]


def _fmt(v: float) -> str:
    return f"{v:.3g}"


class _Canvas:
    def __init__(self, title: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">'
            f'{escape(title)}</text>',
        ]

    def add(self, element: str) -> None:
        self.parts.append(element)

    def text(self, x, y, content, anchor="middle", **attrs) -> None:
        extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
        self.add(f'<text x="{x:.1f}" y="{y:.1f}" text-anchor="{anchor}"{extra}>'
                 f'{escape(content)}</text>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _frame(canvas: _Canvas, x0, x1, y0, y1, xlabel, ylabel, log_y: bool, x_map, y_map):
    left, top = MARGIN["left"], MARGIN["top"]
    right, bottom = WIDTH - MARGIN["right"], HEIGHT - MARGIN["bottom"]
    canvas.add(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
               f'fill="none" stroke="black"/>')
    for t in _nice_ticks(x0, x1):
        x = x_map(t)
        canvas.add(f'<line x1="{x:.1f}" y1="{bottom}" x2="{x:.1f}" y2="{bottom + 5}" '
                   f'stroke="black"/>')
        canvas.text(x, bottom + 18, _fmt(t))
    for t in _nice_ticks(y0, y1):
        y = y_map(t)
        canvas.add(f'<line x1="{left - 5}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" '
                   f'stroke="black"/>')
        canvas.text(left - 8, y + 4, f"1e{t:g}" if log_y else _fmt(t), anchor="end")
    canvas.text((left + right) / 2, HEIGHT - 18, xlabel)
    canvas.text(18, (top + bottom) / 2, ylabel,
                transform=f"rotate(-90 18 {(top + bottom) / 2})")


def line_plot(x: Sequence[float], series: dict[str, Sequence], title: str, xlabel: str,
              ylabel: str, log_y: bool) -> str:
    """Polyline plot; ``None`` and non-positive (log scale) points are skipped."""
    canvas = _Canvas(title)
    xs = np.asarray(x, dtype=float)
    cleaned = {}
    for name, ys in series.items():
        pts = [(xi, yi) for xi, yi in zip(xs, ys)
               if yi is not None and math.isfinite(yi) and (yi > 0 or not log_y)]
        if pts:
            cleaned[name] = [(xi, math.log10(yi) if log_y else yi) for xi, yi in pts]
    left, top = MARGIN["left"], MARGIN["top"]
    right, bottom = WIDTH - MARGIN["right"], HEIGHT - MARGIN["bottom"]
    if not cleaned:
        canvas.add(f'<rect x="{left}" y="{top}" width="{right - left}" '
                   f'height="{bottom - top}" fill="none" stroke="black"/>')
        canvas.text((left + right) / 2, (top + bottom) / 2, "no stable points to plot")
        return canvas.render()
    ys_all = [y for pts in cleaned.values() for _, y in pts]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = min(ys_all), max(ys_all)
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    x_span = (x1 - x0) or 1.0

    def x_map(v):
        return left + (v - x0) / x_span * (right - left)

    def y_map(v):
        return bottom - (v - y0) / (y1 - y0) * (bottom - top)

    _frame(canvas, x0, x1, y0, y1, xlabel, ylabel, log_y, x_map, y_map)
    for i, (name, pts) in enumerate(cleaned.items()):
        colour = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{x_map(a):.2f},{y_map(b):.2f}" for a, b in pts)
        canvas.add(f'<polyline points="{coords}" fill="none" stroke="{colour}" '
                   f'stroke-width="1.5"/>')
        canvas.text(right - 10, top + 16 * (i + 1), name, anchor="end", fill=colour)
    return canvas.render()


def _colour(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(COLOR_STOPS, COLOR_STOPS[1:]):
        if t <= t1:
            f = (t - t0) / (t1 - t0)
            rgb = [round(a + f * (b - a)) for a, b in zip(c0, c1)]
            return "#%02x%02x%02x" % tuple(rgb)
    return "#%02x%02x%02x" % COLOR_STOPS[-1][1]


def heatmap(xs: Sequence[float], ys: Sequence[float], grid: np.ndarray, title: str,
            xlabel: str, ylabel: str) -> str:
    """Cells coloured by log10 of ``grid[i, j]`` at (xs[i], ys[j]); NaN cells left empty."""
    canvas = _Canvas(title)
    left, top = MARGIN["left"], MARGIN["top"]
    right, bottom = WIDTH - MARGIN["right"] - 60, HEIGHT - MARGIN["bottom"]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(grid > 0, np.log10(grid), np.nan)
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    if not np.any(np.isfinite(logs)):
        canvas.add(f'<rect x="{left}" y="{top}" width="{right - left}" '
                   f'height="{bottom - top}" fill="none" stroke="black"/>')
        canvas.text((left + right) / 2, (top + bottom) / 2, "no stable points to plot")
        return canvas.render()
    lo, hi = float(np.nanmin(logs)), float(np.nanmax(logs))
    span = (hi - lo) or 1.0
    dx = (xs[-1] - xs[0]) / (len(xs) - 1)
    dy = (ys[-1] - ys[0]) / (len(ys) - 1)
    x0, x1 = xs[0] - dx / 2, xs[-1] + dx / 2
    y0, y1 = ys[0] - dy / 2, ys[-1] + dy / 2

    def x_map(v):
        return left + (v - x0) / (x1 - x0) * (right - left)

    def y_map(v):
        return bottom - (v - y0) / (y1 - y0) * (bottom - top)

    cw = (right - left) / len(xs)
    ch = (bottom - top) / len(ys)
    for i, xv in enumerate(xs):
        for j, yv in enumerate(ys):
            if np.isfinite(logs[i, j]):
                canvas.add(f'<rect x="{x_map(xv) - cw / 2:.2f}" y="{y_map(yv) - ch / 2:.2f}" '
                           f'width="{cw + 0.3:.2f}" height="{ch + 0.3:.2f}" '
                           f'fill="{_colour((logs[i, j] - lo) / span)}"/>')
    _frame(canvas, x0, x1, y0, y1, xlabel, ylabel, False, x_map, y_map)
    # colour bar
    bar_x = right + 20
    for k in range(50):
        t = k / 49
        y = bottom - t * (bottom - top)
        canvas.add(f'<rect x="{bar_x}" y="{y - (bottom - top) / 50:.2f}" width="15" '
                   f'height="{(bottom - top) / 49:.2f}" fill="{_colour(t)}"/>')
    canvas.text(bar_x + 20, bottom, f"1e{lo:.1f}", anchor="start")
    canvas.text(bar_x + 20, top + 10, f"1e{hi:.1f}", anchor="start")
    return canvas.render()


def _column(records: Iterable[RunRecord], name: str) -> list:
    return [r.outputs.get(name) if (r.stable or name in FORCE_COLUMNS) else None
            for r in records]


def render_svg(records: Sequence[RunRecord], title: str = "") -> list[tuple[str, str]]:
    """SVG documents for a sweep: one line plot, or one heatmap per phonon column.

    Returns a list of (suffix, svg text) pairs.
    """
    if not records:
        raise ValueError("no records to plot")
    n_axes = len(records[0].axes)
    force = "Fx_exact" in records[0].outputs
    labels = [label for label, _ in records[0].axes]
    if force:
        names = ("Fx_exact", "Fx_far", "Fz_exact", "Fz_far")
    else:
        names = tuple(c for c in PHONON_COLUMNS.values()
                      if any(r.outputs.get(c) is not None for r in records)) or ("n_1x",)
    if n_axes == 1:
        x = [r.axes[0][1] for r in records]
        series = {n: _column(records, n) for n in names}
        return [("", line_plot(x, series, title, labels[0],
                               "force (N)" if force else "mean phonon number",
                               log_y=not force))]
    xs = sorted({r.axes[0][1] for r in records})
    ys = sorted({r.axes[1][1] for r in records})
    out = []
    for name in names:
        grid = np.full((len(xs), len(ys)), np.nan)
        for r in records:
            value = r.outputs.get(name) if (r.stable or force) else None
            if value is not None:
                grid[xs.index(r.axes[0][1]), ys.index(r.axes[1][1])] = value
        if force:
            grid = np.abs(grid)
        out.append((f"_{name}", heatmap(xs, ys, grid, f"{title} {name}".strip(),
                                        labels[0], labels[1])))
    return out


def emit_svg(records: Sequence[RunRecord], path, title: str = "") -> list[Path]:
    """Write the SVG plot(s); heatmaps get the column name appended to the stem."""
    path = Path(path)
    written = []
    for suffix, text in render_svg(records, title):
        target = path.with_name(path.stem + suffix + path.suffix) if suffix else path
        target.write_text(text)
        written.append(target)
    return written
