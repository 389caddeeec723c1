"""Minimal static SVG line plots (no plotting library, fully deterministic)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Series", "render_plot"]

_WIDTH = 720
_HEIGHT = 480
_MARGIN_L = 70
_MARGIN_R = 20
_MARGIN_T = 40
_MARGIN_B = 50
_MAX_POINTS = 2000


@dataclass(frozen=True)
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: str
    dashed: bool = False


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


def _limits(arrays) -> tuple[float, float]:
    lo = min(float(np.min(a)) for a in arrays)
    hi = max(float(np.max(a)) for a in arrays)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        lo, hi = 0.0, 1.0
    if hi - lo < 1e-12:
        pad = max(abs(hi), 1.0) * 0.05
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _decimate(arr: np.ndarray) -> np.ndarray:
    stride = max(1, arr.size // _MAX_POINTS)
    out = arr[::stride]
    if (arr.size - 1) % stride != 0:
        out = np.append(out, arr[-1])
    return out


def render_plot(title: str, xlabel: str, ylabel: str, series: list[Series]) -> str:
    """Render labelled polylines into an SVG document string."""
    xlo, xhi = _limits([s.x for s in series])
    ylo, yhi = _limits([s.y for s in series])
    iw = _WIDTH - _MARGIN_L - _MARGIN_R
    ih = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(v):
        return _MARGIN_L + (v - xlo) / (xhi - xlo) * iw

    def sy(v):
        return _MARGIN_T + ih - (v - ylo) / (yhi - ylo) * ih

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.0f}" y="24" font-family="sans-serif" '
        f'font-size="15" text-anchor="middle">{title}</text>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{iw}" height="{ih}" '
        f'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for k in range(5):
        frac = k / 4.0
        xv = xlo + frac * (xhi - xlo)
        yv = ylo + frac * (yhi - ylo)
        gx = _MARGIN_L + frac * iw
        gy = _MARGIN_T + ih - frac * ih
        parts.append(
            f'<line x1="{gx:.2f}" y1="{_MARGIN_T + ih}" x2="{gx:.2f}" '
            f'y2="{_MARGIN_T + ih + 5}" stroke="black"/>'
            f'<text x="{gx:.2f}" y="{_MARGIN_T + ih + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{_tick_label(xv)}</text>'
        )
        parts.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{gy:.2f}" x2="{_MARGIN_L}" '
            f'y2="{gy:.2f}" stroke="black"/>'
            f'<text x="{_MARGIN_L - 8}" y="{gy + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{_tick_label(yv)}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + iw / 2:.0f}" y="{_HEIGHT - 10}" '
        f'font-family="sans-serif" font-size="13" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_T + ih / 2:.0f}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_T + ih / 2:.0f})">{ylabel}</text>'
    )
    for idx, s in enumerate(series):
        xs = _decimate(np.asarray(s.x, dtype=float))
        ys = _decimate(np.asarray(s.y, dtype=float))
        pts = " ".join(f"{_fmt(sx(xv))},{_fmt(sy(yv))}" for xv, yv in zip(xs, ys))
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        parts.append(
            f'<polyline fill="none" stroke="{s.color}" stroke-width="1.5"'
            f'{dash} points="{pts}"/>'
        )
        ly = _MARGIN_T + 14 + 16 * idx
        lx = _MARGIN_L + iw - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
            f'stroke="{s.color}" stroke-width="1.5"{dash}/>'
            f'<text x="{lx + 30}" y="{ly}" font-family="sans-serif" '
            f'font-size="12">{s.label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
