"""Standalone SVG line charts for scenario telemetry, one file per panel."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=70, top=36, bottom=52)
MAX_PATH_POINTS = 2000
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd")


@dataclass
class Series:
    xs: list
    ys: list
    label: str
    color: str = COLORS[0]
    dashed: bool = False
    dotted: bool = False
    markers: bool = False
    right_axis: bool = False


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    series: list = field(default_factory=list)
    y2label: str = ""
    equal_aspect: bool = False


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return []
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _bounds(series, pad: float = 0.05):
    xs = [x for s in series for x in s.xs]
    ys = [y for s in series for y in s.ys]
    if not xs:
        return (0.0, 1.0), (0.0, 1.0)
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 1, x1 + 1
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 1, y1 + 1
    dy = (y1 - y0) * pad
    return (x0, x1), (y0 - dy, y1 + dy)


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def render(panel: Panel) -> str:
    """SVG document text for a panel."""
    left = [s for s in panel.series if not s.right_axis]
    right = [s for s in panel.series if s.right_axis]
    (x0, x1), (y0, y1) = _bounds(left or panel.series)
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    if panel.equal_aspect:
        # same metres per pixel on both axes
        scale = max((x1 - x0) / pw, (y1 - y0) / ph)
        cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        x0, x1 = cx - 0.5 * pw * scale, cx + 0.5 * pw * scale
        y0, y1 = cy - 0.5 * ph * scale, cy + 0.5 * ph * scale

    def X(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def mk_y(lo, hi):
        return lambda v: MARGIN["top"] + (hi - v) / (hi - lo) * ph

    Y = mk_y(y0, y1)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">{escape(panel.title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for t in _nice_ticks(x0, x1):
        px = X(t)
        out.append(f'<line x1="{px:.2f}" y1="{MARGIN["top"]}" x2="{px:.2f}" y2="{MARGIN["top"] + ph}" stroke="#eee"/>')
        out.append(f'<text x="{px:.2f}" y="{MARGIN["top"] + ph + 16}" text-anchor="middle" font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
    for t in _nice_ticks(y0, y1):
        py = Y(t)
        out.append(f'<line x1="{MARGIN["left"]}" y1="{py:.2f}" x2="{MARGIN["left"] + pw}" y2="{py:.2f}" stroke="#eee"/>')
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{py + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{MARGIN["left"]}" y1="{Y(0):.2f}" x2="{MARGIN["left"] + pw}" y2="{Y(0):.2f}" stroke="#999"/>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" font-size="13">{escape(panel.xlabel)}</text>')
    out.append(f'<text transform="translate(18,{MARGIN["top"] + ph / 2}) rotate(-90)" text-anchor="middle" font-family="sans-serif" font-size="13">{escape(panel.ylabel)}</text>')

    Y2 = None
    if right:
        _, (r0, r1) = _bounds(right)
        Y2 = mk_y(r0, r1)
        xr = MARGIN["left"] + pw
        for t in _nice_ticks(r0, r1):
            out.append(f'<text x="{xr + 6}" y="{Y2(t) + 4:.2f}" font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
        out.append(f'<text transform="translate({WIDTH - 14},{MARGIN["top"] + ph / 2}) rotate(90)" text-anchor="middle" font-family="sans-serif" font-size="13">{escape(panel.y2label)}</text>')

    out.append(f'<clipPath id="plot"><rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}"/></clipPath>')
    for i, s in enumerate(panel.series):
        fy = Y2 if s.right_axis else Y
        if s.markers:
            for x, y in zip(s.xs, s.ys):
                out.append(f'<circle cx="{X(x):.2f}" cy="{fy(y):.2f}" r="3" fill="{s.color}" clip-path="url(#plot)"/>')
        else:
            pts = " ".join(f"{X(x):.2f},{fy(y):.2f}" for x, y in zip(s.xs, s.ys))
            dash = ' stroke-dasharray="6,4"' if s.dashed else ' stroke-dasharray="1,3"' if s.dotted else ""
            out.append(f'<polyline points="{pts}" fill="none" stroke="{s.color}" stroke-width="1.5"{dash} clip-path="url(#plot)"/>')
        ly = MARGIN["top"] + 14 + 16 * i
        lx = MARGIN["left"] + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{s.color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}" font-family="sans-serif" font-size="11">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plots(rows: list, out_dir, path_xy: tuple | None = None) -> list:
    """Write the track, deviation/steering and coefficient panels; returns the file paths.

    ``rows`` are telemetry dicts as returned by ``sim.read_telemetry``.
    """
    if not rows:
        raise ValueError("no telemetry rows to plot")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    col = {k: [r[k] for r in rows] for k in rows[0]}
    t = col["t"]
    events = [i for i, r in enumerate(rows) if r["perception_event"]]

    track = Panel("Vehicle track", "x [m]", "y [m]", equal_aspect=True)
    if path_xy is not None:
        stride = max(1, len(path_xy[0]) // MAX_PATH_POINTS)
        px = list(path_xy[0][::stride]) + [path_xy[0][-1]]
        py = list(path_xy[1][::stride]) + [path_xy[1][-1]]
        track.series.append(Series(px, py, "reference path", "#555", dotted=True))
    track.series.append(Series(col["x_Q"], col["y_Q"], "camera point Q", COLORS[0]))

    dev = Panel("Observed deviation and steering", "t [s]", "eps_omega [m]", y2label="gamma_des [deg]")
    dev.series.append(Series(t, col["eps_omega"], "eps_omega", COLORS[0]))
    dev.series.append(Series(t, [math.degrees(g) for g in col["gamma_des"]], "gamma_des", COLORS[1], dashed=True, right_axis=True))

    panels = {"track.svg": track, "deviation_steering.svg": dev}
    units = ("m", "-", "1/m")
    for i in range(3):
        p = Panel(f"Lateral coefficient phihat{i}", "t [s]", f"phihat{i} [{units[i]}]")
        p.series.append(Series(t, col[f"phihat{i}_true"], "true", COLORS[0]))
        p.series.append(Series(t, col[f"phihat{i}_est"], "estimate", COLORS[1], dashed=True))
        p.series.append(Series([t[j] for j in events], [col[f"phihat{i}_est"][j] for j in events],
                               "perception", COLORS[0], markers=True))
        panels[f"phihat{i}.svg"] = p

    written = []
    for name, panel in panels.items():
        target = out / name
        target.write_text(render(panel))
        written.append(target)
    return written
