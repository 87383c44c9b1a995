"""Self-contained SVG line plots, written by hand.

The report path must produce byte-identical artifacts for identical
inputs, so the renderer is a pure function of the data: no timestamps, no
library version strings, no font metrics queried from the host.  One
polyline, two axes, optional horizontal target line, optional log-scaled
x axis.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["render_line_svg", "write_line_svg"]

# canvas geometry (pixels)
_W, _H = 720, 440
_ML, _MR, _MT, _MB = 76, 20, 34, 48

_BG = "#ffffff"
_FG = "#1a1a2e"
_GRID = "#d9d9e3"
_LINE = "#2a6fb0"
_TARGET = "#c0392b"


def _fmt(v: float) -> str:
    """Tick label: short, locale-independent."""
    return f"{v:.4g}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _log_ticks(lo: float, hi: float) -> list[float]:
    """Decade ticks when the span allows, plain subdivision otherwise."""
    d0 = math.ceil(lo - 1e-9)
    d1 = math.floor(hi + 1e-9)
    decades = [float(d) for d in range(d0, d1 + 1)]
    if len(decades) >= 2:
        return decades
    return _ticks(lo, hi)


def render_line_svg(
    x,
    y,
    *,
    title: str = "",
    xlabel: str = "n",
    ylabel: str = "value",
    target: float | None = None,
    logx: bool = False,
) -> str:
    """Render one series as a complete SVG document string."""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("x and y must be one-dimensional and of equal length")
    keep = np.isfinite(xs) & np.isfinite(ys)
    if logx:
        keep &= xs > 0.0
    xs, ys = xs[keep], ys[keep]
    if xs.size < 2:
        raise ValueError("need at least two plottable points")
    if logx:
        xs = np.log10(xs)

    x0, x1 = float(xs.min()), float(xs.max())
    if x1 <= x0:
        x1 = x0 + 1.0
    y0, y1 = float(ys.min()), float(ys.max())
    if target is not None:
        y0, y1 = min(y0, float(target)), max(y1, float(target))
    if y1 <= y0:
        pad = max(abs(y0) * 0.1, 1e-12)
        y0, y1 = y0 - pad, y1 + pad
    else:
        pad = 0.04 * (y1 - y0)
        y0, y1 = y0 - pad, y1 + pad

    def px(v: float) -> float:
        return _ML + (v - x0) / (x1 - x0) * (_W - _ML - _MR)

    def py(v: float) -> float:
        return _H - _MB - (v - y0) / (y1 - y0) * (_H - _MT - _MB)

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">'
    )
    parts.append(f'<rect width="{_W}" height="{_H}" fill="{_BG}"/>')
    font = 'font-family="Helvetica,Arial,sans-serif"'

    # grid + ticks
    xticks = _log_ticks(x0, x1) if logx else _ticks(x0, x1)
    for t in xticks:
        gx = px(t)
        parts.append(
            f'<line x1="{gx:.2f}" y1="{_MT}" x2="{gx:.2f}" y2="{_H - _MB}" '
            f'stroke="{_GRID}" stroke-width="1"/>'
        )
        label = _fmt(10.0**t) if logx else _fmt(t)
        parts.append(
            f'<text x="{gx:.2f}" y="{_H - _MB + 18}" text-anchor="middle" '
            f'font-size="12" {font} fill="{_FG}">{label}</text>'
        )
    for t in _ticks(y0, y1):
        gy = py(t)
        parts.append(
            f'<line x1="{_ML}" y1="{gy:.2f}" x2="{_W - _MR}" y2="{gy:.2f}" '
            f'stroke="{_GRID}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_ML - 8}" y="{gy + 4:.2f}" text-anchor="end" '
            f'font-size="12" {font} fill="{_FG}">{_fmt(t)}</text>'
        )

    # axes frame
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="{_FG}" stroke-width="1"/>'
    )

    # target line
    if target is not None:
        gy = py(float(target))
        parts.append(
            f'<line x1="{_ML}" y1="{gy:.2f}" x2="{_W - _MR}" y2="{gy:.2f}" '
            f'stroke="{_TARGET}" stroke-width="1.5" stroke-dasharray="6,4"/>'
        )
        parts.append(
            f'<text x="{_W - _MR - 4}" y="{gy - 5:.2f}" text-anchor="end" '
            f'font-size="12" {font} fill="{_TARGET}">{_fmt(float(target))}</text>'
        )

    # the series itself
    pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, ys))
    parts.append(
        f'<polyline points="{pts}" fill="none" stroke="{_LINE}" stroke-width="1.5"/>'
    )

    # labels
    if title:
        parts.append(
            f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" font-size="14" '
            f"{font} fill=\"{_FG}\">{_escape(title)}</text>"
        )
    xl = xlabel + (" (log scale)" if logx else "")
    parts.append(
        f'<text x="{(_ML + _W - _MR) / 2:.0f}" y="{_H - 10}" text-anchor="middle" '
        f'font-size="13" {font} fill="{_FG}">{_escape(xl)}</text>'
    )
    parts.append(
        f'<text x="16" y="{(_MT + _H - _MB) / 2:.0f}" text-anchor="middle" '
        f'font-size="13" {font} fill="{_FG}" '
        f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.0f})">{_escape(ylabel)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_line_svg(path, x, y, **kwargs) -> None:
    """Render and write; fixed newline so the bytes never depend on the
    platform."""
    doc = render_line_svg(x, y, **kwargs)
    with open(path, "w", newline="\n") as fh:
        fh.write(doc)
