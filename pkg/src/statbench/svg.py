"""Minimal deterministic SVG renderer for plot payloads.

Renders the PlotSpec JSON geometry (the same dict the web client draws)
into standalone SVG text.  Same input, same bytes: no timestamps, no
randomness, coordinates rounded to a fixed precision.
"""

from __future__ import annotations

from .errors import StatbenchError

WIDTH = 480
HEIGHT = 320
MARGIN_LEFT = 52
MARGIN_RIGHT = 16
MARGIN_TOP = 34
MARGIN_BOTTOM = 42

FILL = "#4e79a7"
PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#59a14b",
    "#e15759",
    "#76b7b2",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
)
AXIS = "#333333"
GRID_TEXT = "#444444"


def _esc(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return s.rstrip("0").rstrip(".") if "." in s else s


def _label_num(v: float) -> str:
    return format(v, ".4g")


class _Frame:
    """Plot area with linear data-to-pixel scales (y grows upward)."""

    def __init__(self, x_min, x_max, y_min, y_max):
        if x_max <= x_min:
            x_min, x_max = x_min - 0.5, x_max + 0.5
        if y_max <= y_min:
            y_min, y_max = y_min - 0.5, y_max + 0.5
        self.x_min, self.x_max = x_min, x_max
        self.y_min, self.y_max = y_min, y_max
        self.left = MARGIN_LEFT
        self.right = WIDTH - MARGIN_RIGHT
        self.top = MARGIN_TOP
        self.bottom = HEIGHT - MARGIN_BOTTOM

    def x(self, v: float) -> float:
        span = self.x_max - self.x_min
        return self.left + (v - self.x_min) / span * (self.right - self.left)

    def y(self, v: float) -> float:
        span = self.y_max - self.y_min
        return self.bottom - (v - self.y_min) / span * (self.bottom - self.top)


def _open_svg(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="13" fill="{AXIS}">{_esc(title)}</text>',
    ]


def _axes(out: list[str], f: _Frame):
    out.append(
        f'<line x1="{f.left}" y1="{f.bottom}" x2="{f.right}" y2="{f.bottom}" stroke="{AXIS}"/>'
    )
    out.append(
        f'<line x1="{f.left}" y1="{f.top}" x2="{f.left}" y2="{f.bottom}" stroke="{AXIS}"/>'
    )


def _y_ticks(out: list[str], f: _Frame, values: list[float]):
    for v in values:
        py = f.y(v)
        out.append(
            f'<line x1="{f.left - 4}" y1="{_num(py)}" x2="{f.left}" y2="{_num(py)}" stroke="{AXIS}"/>'
        )
        out.append(
            f'<text x="{f.left - 7}" y="{_num(py + 4)}" text-anchor="end" fill="{GRID_TEXT}">{_esc(_label_num(v))}</text>'
        )


def _x_tick(out: list[str], f: _Frame, v: float, label: str):
    px = f.x(v)
    out.append(
        f'<line x1="{_num(px)}" y1="{f.bottom}" x2="{_num(px)}" y2="{f.bottom + 4}" stroke="{AXIS}"/>'
    )
    out.append(
        f'<text x="{_num(px)}" y="{f.bottom + 16}" text-anchor="middle" fill="{GRID_TEXT}">{_esc(label)}</text>'
    )


def _x_label(out: list[str], f: _Frame, label: str):
    out.append(
        f'<text x="{(f.left + f.right) / 2}" y="{HEIGHT - 8}" text-anchor="middle" fill="{AXIS}">{_esc(label)}</text>'
    )


def _render_histogram(plot: dict, title: str) -> str:
    breaks = plot["breaks"]
    counts = plot["counts"]
    f = _Frame(breaks[0], breaks[-1], 0.0, float(max(counts)))
    out = _open_svg(title)
    for i, c in enumerate(counts):
        x0, x1 = f.x(breaks[i]), f.x(breaks[i + 1])
        y0 = f.y(c)
        out.append(
            f'<rect x="{_num(x0)}" y="{_num(y0)}" width="{_num(x1 - x0)}" '
            f'height="{_num(f.bottom - y0)}" fill="{FILL}" stroke="white" stroke-width="1"/>'
        )
    _axes(out, f)
    _y_ticks(out, f, [0.0, float(max(counts))])
    _x_tick(out, f, breaks[0], _label_num(breaks[0]))
    _x_tick(out, f, breaks[-1], _label_num(breaks[-1]))
    _x_label(out, f, plot["variable"])
    out.append("</svg>")
    return "\n".join(out)


def _render_bar(plot: dict, title: str) -> str:
    levels = plot["levels"]
    counts = plot["counts"]
    f = _Frame(0.0, float(len(levels)), 0.0, float(max(counts)))
    out = _open_svg(title)
    for i, (level, c) in enumerate(zip(levels, counts)):
        x0, x1 = f.x(i + 0.15), f.x(i + 0.85)
        y0 = f.y(c)
        out.append(
            f'<rect x="{_num(x0)}" y="{_num(y0)}" width="{_num(x1 - x0)}" '
            f'height="{_num(f.bottom - y0)}" fill="{FILL}"/>'
        )
        _x_tick(out, f, i + 0.5, level)
    _axes(out, f)
    _y_ticks(out, f, [0.0, float(max(counts))])
    _x_label(out, f, plot["variable"])
    out.append("</svg>")
    return "\n".join(out)


def _render_scatter(plot: dict, title: str) -> str:
    xs = plot["x"]
    ys = plot["y"]
    x_pad = (max(xs) - min(xs)) * 0.05 or 0.5
    y_pad = (max(ys) - min(ys)) * 0.05 or 0.5
    f = _Frame(min(xs) - x_pad, max(xs) + x_pad, min(ys) - y_pad, max(ys) + y_pad)
    out = _open_svg(title)
    _axes(out, f)
    for x, y in zip(xs, ys):
        out.append(
            f'<circle cx="{_num(f.x(x))}" cy="{_num(f.y(y))}" r="3" '
            f'fill="{FILL}" fill-opacity="0.75"/>'
        )
    _y_ticks(out, f, [min(ys), max(ys)])
    _x_tick(out, f, min(xs), _label_num(min(xs)))
    _x_tick(out, f, max(xs), _label_num(max(xs)))
    _x_label(out, f, plot["x_name"])
    out.append("</svg>")
    return "\n".join(out)


def _render_box(plot: dict, title: str) -> str:
    boxes = plot["boxes"]
    lo = min(
        min((b["whisker_low"] for b in boxes)),
        min((min(b["outliers"]) for b in boxes if b["outliers"]), default=float("inf")),
    )
    hi = max(
        max((b["whisker_high"] for b in boxes)),
        max((max(b["outliers"]) for b in boxes if b["outliers"]), default=float("-inf")),
    )
    pad = (hi - lo) * 0.05 or 0.5
    f = _Frame(0.0, float(len(boxes)), lo - pad, hi + pad)
    out = _open_svg(title)
    _axes(out, f)
    for i, b in enumerate(boxes):
        cx = f.x(i + 0.5)
        half = (f.x(i + 0.85) - f.x(i + 0.15)) / 2
        for v0, v1 in ((b["whisker_low"], b["q1"]), (b["q3"], b["whisker_high"])):
            out.append(
                f'<line x1="{_num(cx)}" y1="{_num(f.y(v0))}" x2="{_num(cx)}" y2="{_num(f.y(v1))}" stroke="{AXIS}"/>'
            )
        for v in (b["whisker_low"], b["whisker_high"]):
            out.append(
                f'<line x1="{_num(cx - half / 2)}" y1="{_num(f.y(v))}" x2="{_num(cx + half / 2)}" y2="{_num(f.y(v))}" stroke="{AXIS}"/>'
            )
        y_q3, y_q1 = f.y(b["q3"]), f.y(b["q1"])
        out.append(
            f'<rect x="{_num(cx - half)}" y="{_num(y_q3)}" width="{_num(2 * half)}" '
            f'height="{_num(y_q1 - y_q3)}" fill="{FILL}" fill-opacity="0.6" stroke="{AXIS}"/>'
        )
        my = f.y(b["median"])
        out.append(
            f'<line x1="{_num(cx - half)}" y1="{_num(my)}" x2="{_num(cx + half)}" y2="{_num(my)}" stroke="{AXIS}" stroke-width="2"/>'
        )
        for v in b["outliers"]:
            out.append(
                f'<circle cx="{_num(cx)}" cy="{_num(f.y(v))}" r="2.5" fill="none" stroke="{AXIS}"/>'
            )
        _x_tick(out, f, i + 0.5, b["label"])
    _y_ticks(out, f, [lo, hi])
    _x_label(out, f, plot.get("group") or plot["variable"])
    out.append("</svg>")
    return "\n".join(out)


def _render_mosaic(plot: dict, title: str) -> str:
    tiles = plot["tiles"]
    f = _Frame(0.0, 1.0, 0.0, 1.0)
    fill_levels = sorted({t["fill_level"] for t in tiles})
    color = {
        level: PALETTE[i % len(PALETTE)] for i, level in enumerate(fill_levels)
    }
    out = _open_svg(title)
    for t in tiles:
        if t["width"] <= 0 or t["height"] <= 0:
            continue
        x0 = f.x(t["x"])
        y1 = f.y(t["y"])
        y0 = f.y(t["y"] + t["height"])
        w = f.x(t["x"] + t["width"]) - x0
        out.append(
            f'<rect x="{_num(x0)}" y="{_num(y0)}" width="{_num(w)}" height="{_num(y1 - y0)}" '
            f'fill="{color[t["fill_level"]]}" stroke="white" stroke-width="2"/>'
        )
    # column labels under each x level, at the column midpoints
    seen: dict[str, tuple[float, float]] = {}
    for t in tiles:
        if t["x_level"] not in seen:
            seen[t["x_level"]] = (t["x"], t["width"])
    for level, (x, w) in seen.items():
        _x_tick(out, f, x + w / 2, level)
    _axes(out, f)
    _x_label(out, f, plot["x_name"])
    legend_y = MARGIN_TOP
    for i, level in enumerate(fill_levels):
        out.append(
            f'<rect x="{WIDTH - MARGIN_RIGHT - 90}" y="{legend_y + i * 16}" width="10" height="10" fill="{color[level]}"/>'
        )
        out.append(
            f'<text x="{WIDTH - MARGIN_RIGHT - 76}" y="{legend_y + i * 16 + 9}" fill="{GRID_TEXT}">{_esc(level)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out)


def render_plot_svg(plot: dict, title: str) -> str:
    kind = plot.get("kind")
    if kind == "histogram":
        return _render_histogram(plot, title)
    if kind == "bar":
        return _render_bar(plot, title)
    if kind == "scatter":
        return _render_scatter(plot, title)
    if kind == "box":
        return _render_box(plot, title)
    if kind == "mosaic":
        return _render_mosaic(plot, title)
    raise StatbenchError(f"unknown plot kind {kind!r}")
