"""Minimal SVG line chart for persistence curves."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 30, 50


def _ticks(lo: int, hi: int, count: int = 8) -> list[int]:
    span = max(hi - lo, 1)
    step = max(1, -(-span // count))
    for nice in (1, 2, 5, 10, 20, 25, 50, 100, 200, 250, 500, 1000):
        if nice >= step:
            step = nice
            break
    start = -(-lo // step) * step
    return list(range(start, hi + 1, step))


def render_curve(alphas: Mapping[int, float], peaks: Sequence[int] = (), title: str = "") -> str:
    """k on the x axis, alpha in [0, 1] on the y axis, circles at peaks."""
    ks = sorted(alphas)
    if not ks:
        raise ValueError("empty curve")
    kmin, kmax = ks[0], ks[-1]
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def x(k: float) -> float:
        return LEFT + (k - kmin) / max(kmax - kmin, 1) * pw

    def y(a: float) -> float:
        return TOP + (1.0 - a) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-size="14">'
                   f'{escape(title)}</text>')
    x0, y0 = LEFT, TOP + ph
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{TOP}" x2="{x0}" y2="{y0}" stroke="black"/>')
    for k in _ticks(kmin, kmax):
        xs = f"{x(k):.2f}"
        out.append(f'<line x1="{xs}" y1="{y0}" x2="{xs}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{xs}" y="{y0 + 18}" text-anchor="middle" font-size="11">{k}</text>')
    for i in range(6):
        a = i / 5
        ys = f"{y(a):.2f}"
        out.append(f'<line x1="{x0 - 5}" y1="{ys}" x2="{x0}" y2="{ys}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{ys}" text-anchor="end" dominant-baseline="middle" '
                   f'font-size="11">{a:.1f}</text>')
    out.append(f'<text x="{x0 + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle" font-size="12">k</text>')
    out.append(f'<text x="15" y="{TOP + ph / 2:.1f}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 15 {TOP + ph / 2:.1f})">alpha</text>')
    pts = " ".join(f"{x(k):.2f},{y(alphas[k]):.2f}" for k in ks)
    out.append(f'<polyline class="curve" points="{pts}" fill="none" stroke="steelblue" stroke-width="1.5"/>')
    for k in sorted(peaks):
        out.append(f'<circle class="peak" data-k="{k}" cx="{x(k):.2f}" cy="{y(alphas[k]):.2f}" r="4" '
                   f'fill="crimson"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
