"""Minimal deterministic SVG rendering for DD-plots and curve fans.

Presentation only; nothing here computes statistics. Markup comes from
fixed templates with fixed ``%.3f`` coordinate formatting and no
timestamps or randomness, so identical data produces identical bytes.
"""

from __future__ import annotations

from .depth import DDPlotData
from .funcspace import Curve

_HEADER = (
    '<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
    'viewBox="0 0 {w} {h}">\n'
)

# Okabe-Ito-ish palette; index 0 is reserved for the reference/median line.
_COLORS = ("#000000", "#0072b2", "#d55e00", "#009e73", "#cc79a7", "#e69f00", "#56b4e9")


def _f(v: float) -> str:
    return f"{v:.3f}"


def dd_plot_svg(dd: DDPlotData, size: int = 480) -> str:
    """Scatter of depth pairs with the 45 degree reference line.

    First-sample observations are filled circles, second-sample ones open
    squares, matching the source labels in the data.
    """
    pad = 40.0
    span = size - 2 * pad

    def px(v: float) -> str:
        return _f(pad + v * span)

    def py(v: float) -> str:
        return _f(size - pad - v * span)

    parts = [_HEADER.format(w=size, h=size)]
    parts.append(
        f'<rect x="{_f(pad)}" y="{_f(pad)}" width="{_f(span)}" height="{_f(span)}" '
        f'fill="none" stroke="#888888" stroke-width="1"/>\n'
    )
    parts.append(
        f'<line x1="{px(0.0)}" y1="{py(0.0)}" x2="{px(1.0)}" y2="{py(1.0)}" '
        f'stroke="#000000" stroke-width="1" stroke-dasharray="4,3"/>\n'
    )
    for (d1, d2), src in zip(dd.points, dd.source):
        if src == "sample1":
            parts.append(
                f'<circle cx="{px(d1)}" cy="{py(d2)}" r="3" '
                f'fill="{_COLORS[1]}" fill-opacity="0.7"/>\n'
            )
        else:
            x = pad + d1 * span - 2.5
            y = size - pad - d2 * span - 2.5
            parts.append(
                f'<rect x="{_f(x)}" y="{_f(y)}" width="5" height="5" '
                f'fill="none" stroke="{_COLORS[2]}" stroke-width="1.2"/>\n'
            )
    for label, anchor, x, y in (
        ("0", "middle", pad, size - pad + 16.0),
        ("1", "middle", size - pad, size - pad + 16.0),
        ("depth in sample1", "middle", size / 2.0, size - 8.0),
    ):
        parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="12" font-family="sans-serif" '
            f'text-anchor="{anchor}">{label}</text>\n'
        )
    parts.append(
        f'<text x="{_f(12.0)}" y="{_f(size / 2.0)}" font-size="12" '
        f'font-family="sans-serif" text-anchor="middle" '
        f'transform="rotate(-90 {_f(12.0)} {_f(size / 2.0)})">depth in sample2</text>\n'
    )
    parts.append("</svg>\n")
    return "".join(parts)


def curve_fan_svg(
    curves: list[tuple[str, Curve]], width: int = 640, height: int = 420
) -> str:
    """Polyline per labeled curve on shared axes; first curve drawn black.

    The vertical range is the data range padded by 5 percent; each curve's
    label goes into a <title> child so viewers show it on hover.
    """
    if not curves:
        raise ValueError("need at least one curve")
    grid = curves[0][1].grid
    pad = 40.0
    xs = grid.points
    lo = min(float(c.values.min()) for _, c in curves)
    hi = max(float(c.values.max()) for _, c in curves)
    if hi <= lo:
        hi = lo + 1.0
    margin = 0.05 * (hi - lo)
    lo -= margin
    hi += margin

    def px(t: float) -> float:
        return pad + (t - xs[0]) / (xs[-1] - xs[0]) * (width - 2 * pad)

    def py(v: float) -> float:
        return height - pad - (v - lo) / (hi - lo) * (height - 2 * pad)

    parts = [_HEADER.format(w=width, h=height)]
    parts.append(
        f'<rect x="{_f(pad)}" y="{_f(pad)}" width="{_f(width - 2 * pad)}" '
        f'height="{_f(height - 2 * pad)}" fill="none" stroke="#888888" '
        f'stroke-width="1"/>\n'
    )
    if lo < 0.0 < hi:
        parts.append(
            f'<line x1="{_f(px(xs[0]))}" y1="{_f(py(0.0))}" x2="{_f(px(xs[-1]))}" '
            f'y2="{_f(py(0.0))}" stroke="#bbbbbb" stroke-width="1"/>\n'
        )
    for i, (label, curve) in enumerate(curves):
        if not curve.grid.matches(grid):
            raise ValueError("all curves must share one grid")
        pts = " ".join(
            f"{_f(px(t))},{_f(py(v))}" for t, v in zip(xs, curve.values)
        )
        color = _COLORS[i % len(_COLORS)]
        w = "2" if i == 0 else "1.2"
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{w}"><title>{label}</title></polyline>\n'
        )
    for label, x, y, anchor in (
        (f"{xs[0]:g}", pad, height - pad + 16.0, "middle"),
        (f"{xs[-1]:g}", width - pad, height - pad + 16.0, "middle"),
        (f"{lo + margin:.3g}", pad - 6.0, height - pad, "end"),
        (f"{hi - margin:.3g}", pad - 6.0, pad + 4.0, "end"),
    ):
        parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="12" font-family="sans-serif" '
            f'text-anchor="{anchor}">{label}</text>\n'
        )
    parts.append("</svg>\n")
    return "".join(parts)
