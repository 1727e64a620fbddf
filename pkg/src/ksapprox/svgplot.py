"""Minimal SVG line-plot writer (polylines + axes), no plotting dependency.

Output is a self-contained SVG file: a framed plot area, linear tick
labels on both axes, one polyline per data series, and an optional
legend.  Formatting is fixed-precision so identical data produces
byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

__all__ = ["line_plot"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")

_MARGIN_LEFT = 72.0
_MARGIN_RIGHT = 18.0
_MARGIN_TOP = 34.0
_MARGIN_BOTTOM = 48.0
_N_TICKS = 5


def _data_range(lo, hi):
    """Padded plotting range; degenerate spans widen to a unit window."""
    if hi - lo < 1e-300:
        pad = max(1.0, abs(lo)) * 0.5
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _fmt(value):
    return f"{value:.2f}"


def _tick_label(value):
    return f"{value:.4g}"


def line_plot(path, xs, series, labels=None, title="", xlabel="", ylabel="",
              width=720, height=480):
    """Write an SVG line plot of one or more series against shared xs.

    series is a sequence of y-arrays, each the same length as xs;
    labels (optional) gives one legend entry per series.  Returns path.
    """
    x = np.asarray(xs, dtype=float)
    ys = [np.asarray(s, dtype=float) for s in series]
    if x.ndim != 1 or x.size < 2:
        raise ConfigError("line_plot needs at least two x samples")
    if not ys:
        raise ConfigError("line_plot needs at least one series")
    for s in ys:
        if s.shape != x.shape:
            raise ConfigError("every series must match the x array length")
        if not np.all(np.isfinite(s)):
            raise ConfigError("series values must be finite")
    if not np.all(np.isfinite(x)):
        raise ConfigError("x values must be finite")
    if labels is not None and len(labels) != len(ys):
        raise ConfigError("labels must match the number of series")

    x_lo, x_hi = _data_range(float(np.min(x)), float(np.max(x)))
    y_all = np.concatenate(ys)
    y_lo, y_hi = _data_range(float(np.min(y_all)), float(np.max(y_all)))

    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def px(v):
        return _MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w

    def py(v):
        return _MARGIN_TOP + (y_hi - v) / (y_hi - y_lo) * plot_h

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
    )
    out.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    out.append(
        f'<rect x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(_MARGIN_TOP)}" '
        f'width="{_fmt(plot_w)}" height="{_fmt(plot_h)}" '
        'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    if title:
        out.append(
            f'<text x="{_fmt(width / 2)}" y="22" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15">{title}</text>'
        )

    for i in range(_N_TICKS):
        frac = i / (_N_TICKS - 1)
        xv = x_lo + frac * (x_hi - x_lo)
        xp = px(xv)
        out.append(
            f'<line x1="{_fmt(xp)}" y1="{_fmt(_MARGIN_TOP + plot_h)}" '
            f'x2="{_fmt(xp)}" y2="{_fmt(_MARGIN_TOP + plot_h + 5)}" '
            'stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(xp)}" y="{_fmt(_MARGIN_TOP + plot_h + 20)}" '
            'text-anchor="middle" font-family="sans-serif" font-size="11">'
            f"{_tick_label(xv)}</text>"
        )
        yv = y_lo + frac * (y_hi - y_lo)
        yp = py(yv)
        out.append(
            f'<line x1="{_fmt(_MARGIN_LEFT - 5)}" y1="{_fmt(yp)}" '
            f'x2="{_fmt(_MARGIN_LEFT)}" y2="{_fmt(yp)}" '
            'stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(_MARGIN_LEFT - 8)}" y="{_fmt(yp + 4)}" '
            'text-anchor="end" font-family="sans-serif" font-size="11">'
            f"{_tick_label(yv)}</text>"
        )

    if y_lo < 0.0 < y_hi:
        zp = py(0.0)
        out.append(
            f'<line x1="{_fmt(_MARGIN_LEFT)}" y1="{_fmt(zp)}" '
            f'x2="{_fmt(_MARGIN_LEFT + plot_w)}" y2="{_fmt(zp)}" '
            'stroke="#bbbbbb" stroke-width="1" stroke-dasharray="4 3"/>'
        )

    if xlabel:
        out.append(
            f'<text x="{_fmt(_MARGIN_LEFT + plot_w / 2)}" '
            f'y="{_fmt(height - 10)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{xlabel}</text>'
        )
    if ylabel:
        cx, cy = 16.0, _MARGIN_TOP + plot_h / 2
        out.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(cy)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13" '
            f'transform="rotate(-90 {_fmt(cx)} {_fmt(cy)})">{ylabel}</text>'
        )

    for idx, s in enumerate(ys):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(x, s))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>'
        )

    if labels is not None:
        for idx, text in enumerate(labels):
            color = _PALETTE[idx % len(_PALETTE)]
            lx = _MARGIN_LEFT + plot_w - 150
            lyy = _MARGIN_TOP + 16 + 16 * idx
            out.append(
                f'<line x1="{_fmt(lx)}" y1="{_fmt(lyy - 4)}" '
                f'x2="{_fmt(lx + 22)}" y2="{_fmt(lyy - 4)}" '
                f'stroke="{color}" stroke-width="1.5"/>'
            )
            out.append(
                f'<text x="{_fmt(lx + 28)}" y="{_fmt(lyy)}" '
                'font-family="sans-serif" font-size="12">'
                f"{text}</text>"
            )

    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(out) + "\n")
    return path
