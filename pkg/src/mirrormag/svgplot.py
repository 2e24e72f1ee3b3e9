"""Minimal self-contained SVG rendering for sweep output.

No plotting dependency: heatmaps and line plots are emitted as plain SVG
text with fixed number formatting and a fixed color ramp, so the files are
byte-stable across platforms and runs.
"""

import math

import numpy as np

#: Viridis-like ramp, 8 documented stops from low to high.
VIRIDIS8 = ("#440154", "#46327e", "#365c8d", "#277f8e",
            "#1fa187", "#4ac16d", "#a0da39", "#fde725")

#: Line colors for multi-series plots (drawn from the ramp ends plus mids).
SERIES_COLORS = ("#440154", "#277f8e", "#4ac16d", "#fde725",
                 "#46327e", "#1fa187")

MASK_COLOR = "#c8c8c8"  # unstable / missing cells

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 80, 100, 40, 60  # margins


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _hex_to_rgb(h: str) -> tuple:
    return tuple(int(h[i:i + 2], 16) for i in (1, 3, 5))


def _ramp_color(t: float) -> str:
    """Linear interpolation through the 8 ramp stops, t in [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    pos = t * (len(VIRIDIS8) - 1)
    i = min(int(pos), len(VIRIDIS8) - 2)
    frac = pos - i
    lo, hi = _hex_to_rgb(VIRIDIS8[i]), _hex_to_rgb(VIRIDIS8[i + 1])
    rgb = tuple(round(a + frac * (b - a)) for a, b in zip(lo, hi))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _axis_ticks(lo: float, hi: float, n: int = 5) -> list:
    if hi == lo:
        return [lo]
    raw = np.linspace(lo, hi, n)
    return [float(v) for v in raw]


def _header(title: str) -> list:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_W / 2:.0f}" y="24" font-family="sans-serif" '
            f'font-size="15" text-anchor="middle">{title}</text>'
        )
    return parts


def _axes(parts: list, xlo, xhi, ylo, yhi, xlabel, ylabel):
    px0, px1 = _ML, _W - _MR
    py0, py1 = _H - _MB, _MT
    parts.append(
        f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" '
        f'height="{py0 - py1}" fill="none" stroke="#000000"/>'
    )
    for v in _axis_ticks(xlo, xhi):
        x = px0 + (v - xlo) / (xhi - xlo or 1.0) * (px1 - px0)
        parts.append(f'<line x1="{x:.2f}" y1="{py0}" x2="{x:.2f}" '
                     f'y2="{py0 + 5}" stroke="#000000"/>')
        parts.append(f'<text x="{x:.2f}" y="{py0 + 20}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="middle">{_fmt(v)}</text>')
    for v in _axis_ticks(ylo, yhi):
        y = py0 - (v - ylo) / (yhi - ylo or 1.0) * (py0 - py1)
        parts.append(f'<line x1="{px0 - 5}" y1="{y:.2f}" x2="{px0}" '
                     f'y2="{y:.2f}" stroke="#000000"/>')
        parts.append(f'<text x="{px0 - 8}" y="{y + 4:.2f}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="end">{_fmt(v)}</text>')
    parts.append(f'<text x="{(px0 + px1) / 2:.0f}" y="{_H - 16}" '
                 f'font-family="sans-serif" font-size="13" '
                 f'text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="20" y="{(py0 + py1) / 2:.0f}" '
                 f'font-family="sans-serif" font-size="13" text-anchor="middle" '
                 f'transform="rotate(-90 20 {(py0 + py1) / 2:.0f})">{ylabel}</text>')


def heatmap_svg(x_values, y_values, grid, xlabel: str, ylabel: str,
                title: str = "", legend: str = "") -> str:
    """Density plot of ``grid[i, j]`` at x ``x_values[i]``, y ``y_values[j]``.

    NaN cells (unstable or failed points) are drawn in the mask color.
    """
    xs = np.asarray(x_values, float)
    ys = np.asarray(y_values, float)
    Z = np.asarray(grid, float)
    if Z.shape != (len(xs), len(ys)):
        raise ValueError("grid shape must be (len(x_values), len(y_values))")
    finite = Z[np.isfinite(Z)]
    zlo = float(finite.min()) if finite.size else 0.0
    zhi = float(finite.max()) if finite.size else 1.0
    if zhi <= zlo:
        zhi = zlo + 1.0

    px0, px1 = _ML, _W - _MR
    py0, py1 = _H - _MB, _MT
    cw = (px1 - px0) / len(xs)
    ch = (py0 - py1) / len(ys)
    parts = _header(title)
    for i in range(len(xs)):
        for j in range(len(ys)):
            v = Z[i, j]
            color = MASK_COLOR if not math.isfinite(v) else \
                _ramp_color((v - zlo) / (zhi - zlo))
            x = px0 + i * cw
            y = py0 - (j + 1) * ch
            parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw + 0.5:.2f}" '
                         f'height="{ch + 0.5:.2f}" fill="{color}"/>')
    _axes(parts, xs.min(), xs.max(), ys.min(), ys.max(), xlabel, ylabel)
    # color bar
    bar_x, bar_w = _W - _MR + 24, 16
    for k in range(64):
        t0 = k / 64.0
        y = py0 - (k + 1) / 64.0 * (py0 - py1)
        parts.append(f'<rect x="{bar_x}" y="{y:.2f}" width="{bar_w}" '
                     f'height="{(py0 - py1) / 64 + 0.5:.2f}" '
                     f'fill="{_ramp_color(t0 + 1 / 128.0)}"/>')
    parts.append(f'<rect x="{bar_x}" y="{py1}" width="{bar_w}" '
                 f'height="{py0 - py1}" fill="none" stroke="#000000"/>')
    parts.append(f'<text x="{bar_x + bar_w + 6}" y="{py0 + 4}" '
                 f'font-family="sans-serif" font-size="11">{_fmt(zlo)}</text>')
    parts.append(f'<text x="{bar_x + bar_w + 6}" y="{py1 + 4}" '
                 f'font-family="sans-serif" font-size="11">{_fmt(zhi)}</text>')
    if legend:
        parts.append(f'<text x="{bar_x + bar_w / 2:.0f}" y="{py1 - 8}" '
                     f'font-family="sans-serif" font-size="12" '
                     f'text-anchor="middle">{legend}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def lineplot_svg(x_values, series: dict, xlabel: str, ylabel: str,
                 title: str = "", hlines: tuple = ()) -> str:
    """Multi-series line plot; NaN samples break the polyline.

    ``series`` maps a label to an array of y values; ``hlines`` is a tuple of
    (value, label) reference lines drawn dashed.
    """
    xs = np.asarray(x_values, float)
    ylo, yhi = math.inf, -math.inf
    for ys in series.values():
        arr = np.asarray(ys, float)
        finite = arr[np.isfinite(arr)]
        if finite.size:
            ylo = min(ylo, float(finite.min()))
            yhi = max(yhi, float(finite.max()))
    for value, _ in hlines:
        ylo = min(ylo, value)
        yhi = max(yhi, value)
    if not math.isfinite(ylo):
        ylo, yhi = 0.0, 1.0
    if yhi <= ylo:
        yhi = ylo + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad

    px0, px1 = _ML, _W - _MR
    py0, py1 = _H - _MB, _MT

    def to_px(xv, yv):
        x = px0 + (xv - xs.min()) / (xs.max() - xs.min() or 1.0) * (px1 - px0)
        y = py0 - (yv - ylo) / (yhi - ylo) * (py0 - py1)
        return x, y

    parts = _header(title)
    for value, label in hlines:
        _, y = to_px(xs.min(), value)
        parts.append(f'<line x1="{px0}" y1="{y:.2f}" x2="{px1}" y2="{y:.2f}" '
                     f'stroke="#888888" stroke-dasharray="6,4"/>')
        parts.append(f'<text x="{px1 - 4}" y="{y - 5:.2f}" '
                     f'font-family="sans-serif" font-size="11" '
                     f'text-anchor="end" fill="#555555">{label}</text>')
    for k, (label, ys) in enumerate(series.items()):
        color = SERIES_COLORS[k % len(SERIES_COLORS)]
        arr = np.asarray(ys, float)
        segments, current = [], []
        for xv, yv in zip(xs, arr):
            if math.isfinite(yv):
                current.append(to_px(xv, yv))
            elif current:
                segments.append(current)
                current = []
        if current:
            segments.append(current)
        for seg in segments:
            pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in seg)
            parts.append(f'<polyline points="{pts}" fill="none" '
                         f'stroke="{color}" stroke-width="1.8"/>')
        ly = py1 + 16 + 16 * k
        parts.append(f'<line x1="{px1 + 10}" y1="{ly - 4}" x2="{px1 + 34}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="1.8"/>')
        parts.append(f'<text x="{px1 + 38}" y="{ly}" font-family="sans-serif" '
                     f'font-size="11">{label}</text>')
    _axes(parts, xs.min(), xs.max(), ylo, yhi, xlabel, ylabel)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
