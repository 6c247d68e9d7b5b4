"""Tiny self-contained SVG writer: line plots and heatmaps with plain axes.

Output depends only on the data (fixed number formatting, no ids or dates),
so identical inputs give byte-identical files.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN = 56
COLORS = ("#1f4e99", "#c0392b", "#2e8b57", "#8e44ad", "#d35400")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _scale(v, lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return a + (np.asarray(v, dtype=float) - lo) / span * (b - a)


def _frame(title: str, xlabel: str, ylabel: str, xlim, ylim) -> list[str]:
    x0, x1 = MARGIN, WIDTH - MARGIN / 2
    y0, y1 = HEIGHT - MARGIN, MARGIN / 2
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="14" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for t in np.linspace(*xlim, 5):
        px = _fmt(float(_scale(t, *xlim, x0, x1)))
        out.append(f'<text x="{px}" y="{y0 + 14}" text-anchor="middle">{t:.3g}</text>')
    for t in np.linspace(*ylim, 5):
        py = _fmt(float(_scale(t, *ylim, y0, y1)))
        out.append(f'<text x="{x0 - 4}" y="{py}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{(y0 + y1) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {(y0 + y1) / 2})">{escape(ylabel)}</text>')
    return out


def line_plot(series, *, title="", xlabel="", ylabel="", markers=()) -> str:
    """``series`` is a list of (x, y) array pairs; ``markers`` are x positions drawn as dashed rules."""
    xs = np.concatenate([np.asarray(x, float) for x, _ in series])
    ys = np.concatenate([np.asarray(y, float) for _, y in series])
    xlim = (float(xs.min()), float(xs.max()))
    ylim = (min(0.0, float(ys.min())), float(ys.max()) or 1.0)
    out = _frame(title, xlabel, ylabel, xlim, ylim)
    x0, x1 = MARGIN, WIDTH - MARGIN / 2
    y0, y1 = HEIGHT - MARGIN, MARGIN / 2
    for m in markers:
        px = _fmt(float(_scale(m, *xlim, x0, x1)))
        out.append(f'<line x1="{px}" y1="{y0}" x2="{px}" y2="{y1}" stroke="gray" stroke-dasharray="4 3"/>')
    for i, (x, y) in enumerate(series):
        px = _scale(x, *xlim, x0, x1)
        py = _scale(y, *ylim, y0, y1)
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        out.append(f'<polyline fill="none" stroke="{COLORS[i % len(COLORS)]}" '
                   f'stroke-width="1.2" points="{pts}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap(values, z, freqs, *, title="", xlabel="", ylabel="", overlay=()) -> str:
    """Grey-scale image of ``z[i, k]`` at (values[i], freqs[k]); ``overlay`` holds (value, freq) dots."""
    values = np.asarray(values, float)
    freqs = np.asarray(freqs, float)
    z = np.asarray(z, float)
    xlim = (float(values.min()), float(values.max()))
    ylim = (float(freqs.min()), float(freqs.max()))
    out = _frame(title, xlabel, ylabel, xlim, ylim)
    x0, x1 = MARGIN, WIDTH - MARGIN / 2
    y0, y1 = HEIGHT - MARGIN, MARGIN / 2
    cw = (x1 - x0) / len(values)
    rh = (y0 - y1) / len(freqs)
    zmax = float(z.max()) or 1.0
    for i in range(len(values)):
        for k in range(len(freqs)):
            level = int(round(255 * (1.0 - min(z[i, k] / zmax, 1.0) ** 0.5)))
            if level == 255:
                continue
            out.append(f'<rect x="{_fmt(x0 + i * cw)}" y="{_fmt(y0 - (k + 1) * rh)}" width="{_fmt(cw)}" '
                       f'height="{_fmt(rh)}" fill="rgb({level},{level},{level})"/>')
    for v, f in overlay:
        if ylim[0] <= f <= ylim[1]:
            px = _fmt(float(_scale(v, *xlim, x0 + cw / 2, x1 - cw / 2)))
            py = _fmt(float(_scale(f, *ylim, y0, y1)))
            out.append(f'<circle cx="{px}" cy="{py}" r="1.6" fill="#c0392b"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
