"""Minimal static SVG rendering, no plotting dependency.

Three chart kinds are enough for this package: bar charts for coordinate
profiles, line charts (optionally log-log) for scaling curves, and the
same line chart used for transition curves. Output is deterministic:
fixed palettes, fixed tick logic, coordinates rounded to 2 decimals.
"""
from __future__ import annotations

import math

__all__ = ["bar_chart", "line_chart", "vector_profile"]

_PALETTE = ("#2d6a9f", "#c0392b", "#1e8449", "#8e44ad", "#b7950b", "#17838d", "#884ea0")

_W = 960
_H = 340
_MARGIN_L = 70
_MARGIN_R = 20
_MARGIN_T = 42
_MARGIN_B = 52


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _tick_label(x: float) -> str:
    return f"{x:.4g}"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{_esc(title)}</text>',
    ]


def _axes(x_label: str, y_label: str) -> list[str]:
    x0, y0 = _MARGIN_L, _H - _MARGIN_B
    x1, y1 = _W - _MARGIN_R, _MARGIN_T
    return [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" stroke-width="1"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>',
        f'<text x="{(x0 + x1) / 2:.0f}" y="{_H - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_esc(x_label)}</text>',
        f'<text x="16" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 16 {(y0 + y1) / 2:.0f})">{_esc(y_label)}</text>',
    ]


def _span(vals: list[float]) -> tuple[float, float]:
    lo, hi = min(vals), max(vals)
    if lo == hi:
        pad = 1.0 if lo == 0 else abs(lo) * 0.1
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.06
    return lo - pad, hi + pad


def _x_map(lo: float, hi: float):
    return lambda v: _MARGIN_L + (v - lo) / (hi - lo) * (_W - _MARGIN_L - _MARGIN_R)

def _y_map(lo: float, hi: float):
    return lambda v: (_H - _MARGIN_B) - (v - lo) / (hi - lo) * (_H - _MARGIN_T - _MARGIN_B)


def _y_ticks(lo: float, hi: float, ymap, unlog: bool = False) -> list[str]:
    parts = []
    for i in range(5):
        v = lo + (hi - lo) * i / 4
        y = ymap(v)
        label = _tick_label(math.exp(v) if unlog else v)
        parts.append(
            f'<line x1="{_MARGIN_L - 4}" y1="{_fmt(y)}" x2="{_MARGIN_L}" y2="{_fmt(y)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{label}</text>'
        )
    return parts


def bar_chart(
    values: list[float],
    title: str = "",
    x_label: str = "index",
    y_label: str = "value",
) -> str:
    """Vertical bars for a sequence of nonnegative values."""
    if len(values) == 0:
        raise ValueError("values must be nonempty")
    vals = [float(v) for v in values]
    ylo, yhi = 0.0, max(max(vals), 1e-300) * 1.06
    ymap = _y_map(ylo, yhi)
    n = len(vals)
    span = _W - _MARGIN_L - _MARGIN_R
    bw = span / n
    parts = _header(title) + _axes(x_label, y_label) + _y_ticks(ylo, yhi, ymap)
    y0 = _H - _MARGIN_B
    for i, v in enumerate(vals):
        x = _MARGIN_L + i * bw
        y = ymap(v)
        parts.append(
            f'<rect class="bar" x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(max(bw - 0.5, 0.4))}" '
            f'height="{_fmt(max(y0 - y, 0.0))}" fill="{_PALETTE[0]}"/>'
        )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        i = int(round(frac * (n - 1)))
        x = _MARGIN_L + (i + 0.5) * bw
        parts.append(
            f'<text x="{_fmt(x)}" y="{y0 + 16}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{i}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def line_chart(
    series: list[tuple[str, list[float], list[float]]],
    title: str = "",
    x_label: str = "x",
    y_label: str = "y",
    log_x: bool = False,
    log_y: bool = False,
) -> str:
    """Polyline chart; series is a list of (label, xs, ys)."""
    if not series:
        raise ValueError("series must be nonempty")
    tx = (lambda v: math.log(v)) if log_x else (lambda v: v)
    ty = (lambda v: math.log(v)) if log_y else (lambda v: v)
    all_x: list[float] = []
    all_y: list[float] = []
    for label, xs, ys in series:
        if len(xs) != len(ys) or len(xs) == 0:
            raise ValueError(f"series {label!r} must have matching nonempty xs, ys")
        if log_x and any(v <= 0 for v in xs):
            raise ValueError("log_x requires positive xs")
        if log_y and any(v <= 0 for v in ys):
            raise ValueError("log_y requires positive ys")
        all_x.extend(tx(v) for v in xs)
        all_y.extend(ty(v) for v in ys)
    xlo, xhi = _span(all_x)
    ylo, yhi = _span(all_y)
    xmap, ymap = _x_map(xlo, xhi), _y_map(ylo, yhi)
    parts = _header(title) + _axes(x_label, y_label) + _y_ticks(ylo, yhi, ymap, unlog=log_y)
    for i in range(5):
        v = xlo + (xhi - xlo) * i / 4
        x = xmap(v)
        label = _tick_label(math.exp(v) if log_x else v)
        y0 = _H - _MARGIN_B
        parts.append(f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 4}" stroke="black"/>')
        parts.append(
            f'<text x="{_fmt(x)}" y="{y0 + 18}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )
    for si, (label, xs, ys) in enumerate(series):
        color = _PALETTE[si % len(_PALETTE)]
        pts = " ".join(f"{_fmt(xmap(tx(a)))},{_fmt(ymap(ty(b)))}" for a, b in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        for a, b in zip(xs, ys):
            parts.append(
                f'<circle cx="{_fmt(xmap(tx(a)))}" cy="{_fmt(ymap(ty(b)))}" r="2.6" fill="{color}"/>'
            )
        lx = _W - _MARGIN_R - 170
        ly = _MARGIN_T + 16 * si + 8
        parts.append(f'<rect x="{lx}" y="{ly - 9}" width="12" height="4" fill="{color}"/>')
        parts.append(
            f'<text x="{lx + 18}" y="{ly - 2}" font-family="sans-serif" font-size="11">'
            f"{_esc(label)}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts)


def vector_profile(u, title: str = "coordinate profile") -> str:
    """Bars of |u_i| against the coordinate index."""
    vals = [abs(float(v)) for v in u]
    return bar_chart(vals, title=title, x_label="coordinate", y_label="|u_i|")
