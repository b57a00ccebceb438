"""Log-log charts emitted as hand-written SVG markup.

A decay sweep is a dozen points spanning a few decades; a plotting
stack buys nothing at that scale.  The chart is assembled directly:
white canvas, boxed plot area, gridlines at decade ticks, one polyline
per series.  Output is a pure function of the inputs, so artifacts from
identical runs are byte-identical and diff cleanly.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["loglog_svg"]

_WIDTH, _HEIGHT = 640, 480
_LEFT, _RIGHT, _TOP, _BOTTOM = 74, 26, 46, 58
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _log_bounds(values):
    lo = math.log10(min(values))
    hi = math.log10(max(values))
    if hi - lo < 1e-9:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def _decade_ticks(lo: float, hi: float):
    first = math.ceil(lo)
    ticks = [float(k) for k in range(first, math.floor(hi) + 1)]
    return ticks if ticks else [lo, hi]


def _tick_label(logv: float) -> str:
    if abs(logv - round(logv)) < 1e-9:
        return f"1e{int(round(logv))}"
    return f"{10.0 ** logv:.3g}"


def loglog_svg(series, path, title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    """Write a log-log chart of ``series = [(label, xs, ys), ...]``.

    Every coordinate must be strictly positive (log axes); at least one
    series with at least one point is required.
    """
    series = [(str(label), list(map(float, xs)), list(map(float, ys)))
              for label, xs, ys in series]
    if not series or any(not xs or len(xs) != len(ys) for _, xs, ys in series):
        raise ValueError("need non-empty series of equal-length x and y")
    if any(v <= 0 for _, xs, ys in series for v in [*xs, *ys]):
        raise ValueError("log-log chart needs strictly positive coordinates")

    xlo, xhi = _log_bounds([x for _, xs, _ in series for x in xs])
    ylo, yhi = _log_bounds([y for _, _, ys in series for y in ys])
    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def sx(v: float) -> float:
        return _LEFT + (math.log10(v) - xlo) / (xhi - xlo) * plot_w

    def sy(v: float) -> float:
        return _TOP + plot_h - (math.log10(v) - ylo) / (yhi - ylo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    if title:
        out.append(
            f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" '
            f'font-family="monospace" font-size="15">{escape(title)}</text>'
        )
    for tick in _decade_ticks(xlo, xhi):
        px = _LEFT + (tick - xlo) / (xhi - xlo) * plot_w
        out.append(
            f'<line x1="{px:.1f}" y1="{_TOP}" x2="{px:.1f}" '
            f'y2="{_TOP + plot_h}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px:.1f}" y="{_TOP + plot_h + 18}" text-anchor="middle" '
            f'font-family="monospace" font-size="12">{_tick_label(tick)}</text>'
        )
    for tick in _decade_ticks(ylo, yhi):
        py = _TOP + plot_h - (tick - ylo) / (yhi - ylo) * plot_h
        out.append(
            f'<line x1="{_LEFT}" y1="{py:.1f}" x2="{_LEFT + plot_w}" '
            f'y2="{py:.1f}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_LEFT - 6}" y="{py + 4:.1f}" text-anchor="end" '
            f'font-family="monospace" font-size="12">{_tick_label(tick)}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{_LEFT + plot_w / 2:.1f}" y="{_HEIGHT - 14}" '
            f'text-anchor="middle" font-family="monospace" font-size="13">'
            f'{escape(xlabel)}</text>'
        )
    if ylabel:
        cy = _TOP + plot_h / 2
        out.append(
            f'<text x="20" y="{cy:.1f}" text-anchor="middle" '
            f'font-family="monospace" font-size="13" '
            f'transform="rotate(-90 20 {cy:.1f})">{escape(ylabel)}</text>'
        )
    for i, (label, xs, ys) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        out.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>'
        )
        for x, y in zip(xs, ys):
            out.append(
                f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" '
                f'fill="{color}"/>'
            )
        if label:
            out.append(
                f'<text x="{_LEFT + plot_w - 8}" y="{_TOP + 18 + 16 * i}" '
                f'text-anchor="end" font-family="monospace" font-size="12" '
                f'fill="{color}">{escape(label)}</text>'
            )
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
