"""Minimal self-contained SVG line plots (no plotting dependency).

Convenience output only: the CSV files are the authoritative artifacts.
"""

from __future__ import annotations

import numpy as np

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
_WIDTH, _HEIGHT = 720, 480
_MARGIN = 60


def _ticks(lo: float, hi: float, count: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, count)
    return [float(v) for v in raw]


def line_plot_svg(path, series, title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    """Write labelled polylines to `path`.

    series: list of (label, xs, ys) triples.
    """
    xs_all = np.concatenate([np.asarray(xs, dtype=float) for _, xs, _ in series])
    ys_all = np.concatenate([np.asarray(ys, dtype=float) for _, _, ys in series])
    x_lo, x_hi = float(xs_all.min()), float(xs_all.max())
    y_lo, y_hi = float(ys_all.min()), float(ys_all.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def to_px(x, y):
        px = _MARGIN + (x - x_lo) / (x_hi - x_lo) * (_WIDTH - 2 * _MARGIN)
        py = _HEIGHT - _MARGIN - (y - y_lo) / (y_hi - y_lo) * (_HEIGHT - 2 * _MARGIN)
        return px, py

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_WIDTH - 2 * _MARGIN}" '
        f'height="{_HEIGHT - 2 * _MARGIN}" fill="none" stroke="black"/>',
    ]
    if title:
        parts.append(f'<text x="{_WIDTH / 2}" y="30" text-anchor="middle" '
                     f'font-size="16">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{_WIDTH / 2}" y="{_HEIGHT - 15}" text-anchor="middle" '
                     f'font-size="13">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{_HEIGHT / 2}" text-anchor="middle" font-size="13" '
                     f'transform="rotate(-90 18 {_HEIGHT / 2})">{ylabel}</text>')

    for tx in _ticks(x_lo, x_hi):
        px, _ = to_px(tx, y_lo)
        parts.append(f'<line x1="{px:.1f}" y1="{_HEIGHT - _MARGIN}" x2="{px:.1f}" '
                     f'y2="{_HEIGHT - _MARGIN + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.1f}" y="{_HEIGHT - _MARGIN + 18}" text-anchor="middle" '
                     f'font-size="11">{tx:.3g}</text>')
    for ty in _ticks(y_lo, y_hi):
        _, py = to_px(x_lo, ty)
        parts.append(f'<line x1="{_MARGIN - 5}" y1="{py:.1f}" x2="{_MARGIN}" '
                     f'y2="{py:.1f}" stroke="black"/>')
        parts.append(f'<text x="{_MARGIN - 8}" y="{py + 4:.1f}" text-anchor="end" '
                     f'font-size="11">{ty:.3g}</text>')

    for idx, (label, xs, ys) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        points = " ".join(f"{to_px(float(x), float(y))[0]:.2f},{to_px(float(x), float(y))[1]:.2f}"
                          for x, y in zip(xs, ys))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{points}"/>')
        ly = _MARGIN + 16 + 16 * idx
        parts.append(f'<line x1="{_WIDTH - _MARGIN - 120}" y1="{ly}" '
                     f'x2="{_WIDTH - _MARGIN - 95}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_WIDTH - _MARGIN - 90}" y="{ly + 4}" '
                     f'font-size="11">{label}</text>')

    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(parts) + "\n")
