"""
Minimal SVG rendering: log-scale line charts and scatter panels.
"""

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


def _doc(width, height, body):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n' + "\n".join(body) + "\n</svg>\n")


def _text(x, y, s, anchor="middle", size=11, rotate=None):
    rot = f' transform="rotate({rotate} {x:.1f} {y:.1f})"' if rotate is not None else ""
    return f'<text x="{x:.1f}" y="{y:.1f}" text-anchor="{anchor}" font-size="{size}"{rot}>{escape(str(s))}</text>'


def line_chart(series, title="", xlabel="k", ylabel="", logy=True, width=720, height=440):
    """
    Line chart of several series on shared axes.

    Parameters
    ----------
    series : list of dict
        Keys ``label``, ``x``, ``y`` and optionally ``dashed`` and ``color``.
        With `logy`, nonpositive values are dropped.
    """
    left, right, top, bottom = 70, 170, 36, 48
    pw, ph = width - left - right, height - top - bottom
    cleaned = []
    for s in series:
        x = np.asarray(s["x"], dtype=float)
        y = np.asarray(s["y"], dtype=float)
        keep = np.isfinite(y) & np.isfinite(x) & ((y > 0) if logy else True)
        cleaned.append((s, x[keep], y[keep]))
    xs = np.concatenate([c[1] for c in cleaned if c[1].size] or [np.array([0.0, 1.0])])
    ys = np.concatenate([c[2] for c in cleaned if c[2].size] or [np.array([1.0, 10.0])])
    x0, x1 = float(xs.min()), float(xs.max())
    if x1 == x0:
        x1 = x0 + 1
    if logy:
        y0 = math.floor(math.log10(ys.min()))
        y1 = math.ceil(math.log10(ys.max()))
        if y1 == y0:
            y1 = y0 + 1
        ty = lambda v: top + ph * (1 - (math.log10(v) - y0) / (y1 - y0))  # noqa: E731
        ticks = [(10.0 ** e, f"1e{e}") for e in range(y0, y1 + 1)]
        step = max(1, len(ticks) // 10)
        ticks = ticks[::step]
    else:
        y0, y1 = float(ys.min()), float(ys.max())
        if y1 == y0:
            y1 = y0 + 1
        ty = lambda v: top + ph * (1 - (v - y0) / (y1 - y0))  # noqa: E731
        ticks = [(v, f"{v:.3g}") for v in np.linspace(y0, y1, 6)]
    tx = lambda v: left + pw * (v - x0) / (x1 - x0)  # noqa: E731

    body = [_text(width / 2, 20, title, size=13)]
    body.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>')
    for v, label in ticks:
        y = ty(v)
        body.append(f'<line x1="{left}" y1="{y:.1f}" x2="{left + pw}" y2="{y:.1f}" stroke="#ddd"/>')
        body.append(_text(left - 6, y + 4, label, anchor="end"))
    for v in np.linspace(x0, x1, 6):
        x = tx(v)
        body.append(f'<line x1="{x:.1f}" y1="{top + ph}" x2="{x:.1f}" y2="{top + ph + 4}" stroke="#333"/>')
        body.append(_text(x, top + ph + 16, f"{v:.4g}"))
    body.append(_text(left + pw / 2, height - 10, xlabel))
    body.append(_text(16, top + ph / 2, ylabel, rotate=-90))
    for i, (s, x, y) in enumerate(cleaned):
        color = s.get("color", PALETTE[i % len(PALETTE)])
        dash = ' stroke-dasharray="6 4"' if s.get("dashed") else ""
        if x.size:
            pts = " ".join(f"{tx(a):.1f},{ty(b):.1f}" for a, b in zip(x, y))
            body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>')
        ly = top + 14 + 16 * i
        body.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 34}" y2="{ly - 4}" '
                    f'stroke="{color}" stroke-width="2"{dash}/>')
        body.append(_text(left + pw + 40, ly, s.get("label", ""), anchor="start"))
    return _doc(width, height, body)


def _marker(kind, x, y, color, r=4):
    if kind == "triangle":
        return (f'<polygon points="{x:.1f},{y - r:.1f} {x - r:.1f},{y + r:.1f} {x + r:.1f},{y + r:.1f}" '
                f'fill="{color}"/>')
    if kind == "square":
        return f'<rect x="{x - r:.1f}" y="{y - r:.1f}" width="{2 * r}" height="{2 * r}" fill="none" stroke="{color}"/>'
    return f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r}" fill="none" stroke="{color}"/>'


def scatter_panels(panels, title="", columns=3, size=240, extent=None):
    """
    Grid of 2-D scatter panels with shared limits.

    Each panel is a dict with ``title`` and ``groups``: a list of dicts with
    ``label``, ``points`` (n, 2), ``marker`` (triangle, square, circle) and
    ``color``.
    """
    rows = max(1, math.ceil(len(panels) / columns))
    pad = 30
    width, height = columns * (size + pad) + pad, rows * (size + pad) + 2 * pad + 20
    allpts = np.concatenate([np.atleast_2d(g["points"]) for p in panels for g in p["groups"]]
                            or [np.zeros((1, 2))])
    lim = extent if extent is not None else float(np.abs(allpts).max()) * 1.1 or 1.0
    body = [_text(width / 2, 20, title, size=13)]
    for n, panel in enumerate(panels):
        r, c = divmod(n, columns)
        ox, oy = pad + c * (size + pad), 2 * pad + r * (size + pad)
        sx = lambda v: ox + size * (v + lim) / (2 * lim)  # noqa: E731
        sy = lambda v: oy + size * (1 - (v + lim) / (2 * lim))  # noqa: E731
        body.append(f'<rect x="{ox}" y="{oy}" width="{size}" height="{size}" fill="none" stroke="#333"/>')
        body.append(_text(ox + size / 2, oy - 6, panel.get("title", "")))
        for g in panel["groups"]:
            for x, y in np.atleast_2d(g["points"]):
                body.append(_marker(g.get("marker", "circle"), sx(x), sy(y), g.get("color", "#000")))
    # legend from the first panel
    if panels:
        for i, g in enumerate(panels[0]["groups"]):
            x = pad + 150 * i
            body.append(_marker(g.get("marker", "circle"), x + 6, height - 14, g.get("color", "#000")))
            body.append(_text(x + 16, height - 10, g.get("label", ""), anchor="start"))
    return _doc(width, height, body)
