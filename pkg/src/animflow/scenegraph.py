"""Resolve runtime state into a pixel-space scenegraph and serialize it.

Output formats: SVG 1.1 text with fixed 3-decimal number formatting, or
a structured frame document (plain dicts) used by the trace tests and
the playground wire protocol.  Both are pure functions of the state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field

MARGIN = {"left": 40, "right": 10, "top": 10, "bottom": 30}
DEFAULT_CIRCLE_R = 4.0
TICK_LENGTH = 14.0
TICK_THICKNESS = 2.0
HIT_SLOP = 5.0


@dataclass
class MarkItem:
    kind: str
    key: object = None
    x: float = 0.0
    y: float = 0.0
    x2: float | None = None
    y2: float | None = None
    r: float | None = None
    fill: str | None = None
    stroke: str | None = None
    opacity: float = 1.0
    text: str | None = None
    tooltip: object = None
    points: list | None = None
    clipped: bool = False

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "key": self.key, "x": self.x, "y": self.y,
               "opacity": self.opacity}
        for attr in ("x2", "y2", "r", "fill", "stroke", "text", "tooltip", "points"):
            v = getattr(self, attr)
            if v is not None:
                out[attr] = v
        if self.clipped:
            out["clipped"] = True
        return out


@dataclass
class Scenegraph:
    width: int
    height: int
    items: list = dc_field(default_factory=list)
    axes: list = dc_field(default_factory=list)
    widgets: list = dc_field(default_factory=list)


# ---------------------------------------------------------------------------
# Scales

def scale_linear(domain, range_, v):
    d0, d1 = domain
    r0, r1 = range_
    if d1 == d0:
        return (r0 + r1) / 2
    return r0 + (v - d0) / (d1 - d0) * (r1 - r0)


def scale_sqrt(domain, range_, v):
    d0, d1 = domain
    s0, s1 = math.sqrt(max(d0, 0.0)), math.sqrt(max(d1, 0.0))
    sv = math.sqrt(max(v, 0.0))
    if s1 == s0:
        return (range_[0] + range_[1]) / 2
    return range_[0] + (sv - s0) / (s1 - s0) * (range_[1] - range_[0])


def scale_point(domain, range_, v):
    n = len(domain)
    if v not in domain:
        return None
    if n == 1:
        return (range_[0] + range_[1]) / 2
    step = (range_[1] - range_[0]) / (n - 1)
    return range_[0] + domain.index(v) * step


def scale_band(domain, range_, v, padding=0.1):
    n = len(domain)
    if n == 0 or v not in domain:
        return None
    step = (range_[1] - range_[0]) / n
    width = step * (1 - padding)
    start = range_[0] + domain.index(v) * step + step * padding / 2
    return start, width


def _hex_to_rgb(color: str):
    color = color.lstrip("#")
    return tuple(int(color[i : i + 2], 16) for i in (0, 2, 4))


def interpolate_color(c0: str, c1: str, t: float) -> str:
    a, b = _hex_to_rgb(c0), _hex_to_rgb(c1)
    t = min(max(t, 0.0), 1.0)
    rgb = tuple(round(x + t * (y - x)) for x, y in zip(a, b))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


# ---------------------------------------------------------------------------
# Frame encoding

def _position_range(axis: str, width: int, height: int):
    if axis == "x":
        return (MARGIN["left"], width - MARGIN["right"])
    # larger values render higher: inverted pixel range
    return (height - MARGIN["bottom"], MARGIN["top"])


class _Scales:
    def __init__(self, state):
        self.state = state
        self.graph = state.graph
        self.width = self.graph.meta["width"]
        self.height = self.graph.meta["height"]

    def node(self, name):
        return self.graph.nodes.get(name)

    def domain(self, name):
        return self.state.scale_domains.get(name)

    def apply(self, name, v):
        from .compiler import ScaleNode

        node = self.node(name)
        if not isinstance(node, ScaleNode):
            return v
        domain = self.domain(name)
        if node.kind in ("linear", "sqrt", "linear-color"):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                return None
        if node.kind == "linear":
            rng = self._numeric_range(node)
            return scale_linear(domain, rng, v)
        if node.kind == "sqrt":
            area = scale_linear([math.sqrt(max(domain[0], 0)), math.sqrt(max(domain[1], 0))],
                                node.range["values"], math.sqrt(max(v, 0)))
            return area
        if node.kind == "linear-color":
            t = scale_linear(domain, (0.0, 1.0), v)
            c0, c1 = node.range["values"]
            return interpolate_color(c0, c1, t)
        if node.kind == "point":
            return scale_point(domain, self._numeric_range(node), v)
        if node.kind == "band":
            return scale_band(domain, self._band_range(node), v)
        if node.kind == "ordinal-color":
            palette = node.range["values"]
            if v not in domain:
                return palette[0]
            return palette[domain.index(v) % len(palette)]
        return v

    def _numeric_range(self, node):
        if node.range.get("kind") == "position":
            return _position_range(node.range["axis"], self.width, self.height)
        return tuple(node.range["values"])

    def _band_range(self, node):
        lo, hi = _position_range(node.range["axis"], self.width, self.height)
        # bands lay out in domain order from the range start
        return (lo, hi) if lo < hi else (hi, lo)


def resolve_channel(state, channel: str, enc: dict, row: dict):
    """Resolve one encoding-channel descriptor for one row."""
    scales = _Scales(state)
    if enc["kind"] == "conditional":
        branch = enc["then"] if state.evaluate_selection(enc["param"], row) else enc["else"]
        return _resolve_branch(scales, branch, row)
    return _resolve_branch(scales, enc, row)


def _resolve_branch(scales: _Scales, branch: dict, row: dict):
    if branch["kind"] == "value":
        return branch["value"]
    v = row.get(branch["field"])
    if branch.get("scale"):
        return scales.apply(branch["scale"], v)
    return v


def encode_frame(state) -> Scenegraph:
    graph = state.graph
    mark = graph.mark_node()
    width, height = graph.meta["width"], graph.meta["height"]
    sg = Scenegraph(width=width, height=height)
    sg.widgets = [dict(w) for w in state.widgets]
    sg.axes = _build_axes(state, width, height)

    rows = state.datasets.get(mark.dataset, [])
    style = mark.style
    if mark.mark == "line":
        sg.items = _line_items(state, mark, rows, style)
    else:
        for row in rows:
            item = _point_item(state, mark, row, style)
            if item is not None:
                sg.items.append(item)
    _apply_enter_exit(state, sg.items)
    _flag_clipped(sg.items, width, height)
    return sg


def _channel_value(state, mark, channel, row, default=None):
    enc = mark.channels.get(channel)
    if enc is None:
        return default
    v = resolve_channel(state, channel, enc, row)
    return default if v is None else v


def _point_item(state, mark, row, style):
    x = _channel_value(state, mark, "x", row)
    y = _channel_value(state, mark, "y", row)
    fill = _channel_value(state, mark, "color", row, style.get("fill", "#4c78a8"))
    opacity = _channel_value(state, mark, "opacity", row, style.get("opacity", 1.0))
    tooltip = _channel_value(state, mark, "tooltip", row)
    key = state._row_key(row)

    if mark.mark == "bar":
        return _bar_item(state, mark, row, x, y, fill, opacity, tooltip, key)
    if isinstance(x, tuple):
        x = x[0] + x[1] / 2
    if isinstance(y, tuple):
        y = y[0] + y[1] / 2
    if x is None or y is None:
        return None
    if mark.mark == "circle":
        area = _channel_value(state, mark, "size", row)
        r = math.sqrt(area / math.pi) if area is not None else DEFAULT_CIRCLE_R
        return MarkItem("circle", key=key, x=float(x), y=float(y), r=float(r),
                        fill=fill, opacity=float(opacity), tooltip=tooltip)
    if mark.mark == "tick":
        return MarkItem(
            "rect", key=key,
            x=float(x) - TICK_THICKNESS / 2, y=float(y) - TICK_LENGTH / 2,
            x2=float(x) + TICK_THICKNESS / 2, y2=float(y) + TICK_LENGTH / 2,
            fill=fill, opacity=float(opacity), tooltip=tooltip,
        )
    if mark.mark == "text":
        text = tooltip if tooltip is not None else ""
        return MarkItem("text", key=key, x=float(x), y=float(y), text=str(text),
                        fill=fill, opacity=float(opacity))
    return None


def _bar_item(state, mark, row, x, y, fill, opacity, tooltip, key):
    from .compiler import ScaleNode

    scales = _Scales(state)
    x_node = state.graph.nodes.get("x")
    horizontal = isinstance(x_node, ScaleNode) and x_node.kind == "linear" and isinstance(y, tuple)
    if horizontal:
        y0, bandwidth = y
        zero_px = scales.apply("x", 0.0)
        if x is None or zero_px is None:
            return None
        return MarkItem("rect", key=key, x=float(min(zero_px, x)), y=float(y0),
                        x2=float(max(zero_px, x)), y2=float(y0 + bandwidth),
                        fill=fill, opacity=float(opacity), tooltip=tooltip)
    if isinstance(x, tuple):
        x0, bandwidth = x
        zero_px = scales.apply("y", 0.0)
        if y is None or zero_px is None:
            return None
        return MarkItem("rect", key=key, x=float(x0), y=float(min(zero_px, y)),
                        x2=float(x0 + bandwidth), y2=float(max(zero_px, y)),
                        fill=fill, opacity=float(opacity), tooltip=tooltip)
    return None


def _line_items(state, mark, rows, style):
    groups: dict = {}
    order: list = []
    group_field = None
    for channel in ("detail", "color"):
        enc = mark.channels.get(channel)
        if enc is not None and enc.get("kind") == "field":
            group_field = enc["field"]
            break
    for row in rows:
        gkey = row.get(group_field) if group_field else "__all__"
        if gkey not in groups:
            groups[gkey] = []
            order.append(gkey)
        groups[gkey].append(row)
    items = []
    for gkey in order:
        grows = groups[gkey]
        points = []
        for row in grows:
            x = _channel_value(state, mark, "x", row)
            y = _channel_value(state, mark, "y", row)
            if isinstance(x, tuple):
                x = x[0] + x[1] / 2
            if isinstance(y, tuple):
                y = y[0] + y[1] / 2
            if x is None or y is None:
                continue
            points.append([float(x), float(y)])
        if not points:
            continue
        first = grows[0]
        stroke = _channel_value(state, mark, "color", first, style.get("stroke", "#4c78a8"))
        opacity = _channel_value(state, mark, "opacity", first, style.get("opacity", 1.0))
        tooltip = _channel_value(state, mark, "tooltip", first)
        items.append(
            MarkItem("line", key=gkey if group_field else state._row_key(first),
                     x=points[0][0], y=points[0][1], points=points,
                     stroke=stroke, opacity=float(opacity), tooltip=tooltip)
        )
    return items


def _apply_enter_exit(state, items) -> None:
    ee = state.graph.meta.get("enter_exit")
    if ee is None:
        return
    u = state.signals.get("tween_u", 0.0)
    rendered = state.datasets.get(state.graph.mark_node().dataset, [])
    status_by_key = {
        state._row_key(r): r.get("_status") for r in rendered if r.get("_status")
    }
    for item in items:
        status = status_by_key.get(item.key)
        if status == "enter" and ee.get("enter") and "opacity" in ee["enter"]:
            start = float(ee["enter"]["opacity"])
            item.opacity = item.opacity * (start + u * (1.0 - start))
        elif status == "exit" and ee.get("exit") and "opacity" in ee["exit"]:
            end = float(ee["exit"]["opacity"])
            item.opacity = item.opacity * (1.0 + u * (end - 1.0))


def _flag_clipped(items, width, height) -> None:
    for item in items:
        xs = [item.x] + ([item.x2] if item.x2 is not None else [])
        ys = [item.y] + ([item.y2] if item.y2 is not None else [])
        if item.points:
            xs = [p[0] for p in item.points]
            ys = [p[1] for p in item.points]
        tol = 50.0
        if any(not (-tol <= v <= width + tol) for v in xs) or any(
            not (-tol <= v <= height + tol) for v in ys
        ):
            item.clipped = True


# ---------------------------------------------------------------------------
# Axes

def nice_ticks(lo: float, hi: float, max_count: int = 10) -> list[float]:
    """Tick positions on a 1-2-5 progression covering [lo, hi]."""
    if hi <= lo:
        return [lo]
    span = hi - lo
    raw_step = span / max_count
    mag = 10 ** math.floor(math.log10(raw_step))
    for mult in (1, 2, 5, 10):
        if mag * mult >= raw_step:
            step = mag * mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + step * 1e-9:
        ticks.append(round(v, 10))
        v += step
    return ticks


def _tick_label(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return f"{v:g}" if isinstance(v, (int, float)) else str(v)


def _build_axes(state, width, height) -> list[dict]:
    from .compiler import ScaleNode

    axes = []
    scales = _Scales(state)
    for name, orient in (("x", "bottom"), ("y", "left")):
        node = state.graph.nodes.get(name)
        if not isinstance(node, ScaleNode):
            continue
        domain = state.scale_domains.get(name)
        if domain is None:
            continue
        ticks = []
        if node.kind == "linear":
            lo, hi = domain
            values = [lo] + [t for t in nice_ticks(lo, hi) if lo < t < hi] + [hi]
            for v in values:
                ticks.append({"pos": scales.apply(name, v), "label": _tick_label(v)})
        else:
            values = domain
            stride = max(1, math.ceil(len(values) / 10))
            for v in values[::stride]:
                pos = scales.apply(name, v)
                if isinstance(pos, tuple):
                    pos = pos[0] + pos[1] / 2
                if pos is not None:
                    ticks.append({"pos": pos, "label": _tick_label(v)})
        axes.append({"orient": orient, "scale": name,
                     "domain": list(domain), "ticks": ticks})
    return axes


# ---------------------------------------------------------------------------
# Serialization

def frame_doc(sg: Scenegraph) -> dict:
    return {
        "width": sg.width,
        "height": sg.height,
        "items": [item.to_dict() for item in sg.items],
        "axes": sg.axes,
        "widgets": sg.widgets,
    }


def frame_json(sg: Scenegraph) -> str:
    return json.dumps(frame_doc(sg), sort_keys=True)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _esc(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def render_svg(sg: Scenegraph) -> str:
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{sg.width}" height="{sg.height}" '
        f'viewBox="0 0 {sg.width} {sg.height}">'
    ]
    out.append('<g class="axes">')
    for axis in sg.axes:
        out.append(_axis_svg(axis, sg.width, sg.height))
    out.append("</g>")
    out.append('<g class="marks">')
    for item in sg.items:
        out.append(_item_svg(item))
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _axis_svg(axis: dict, width: int, height: int) -> str:
    parts = [f'<g class="axis axis-{axis["orient"]}">']
    if axis["orient"] == "bottom":
        y = height - MARGIN["bottom"]
        parts.append(
            f'<line x1="{MARGIN["left"]}" y1="{y}" '
            f'x2="{width - MARGIN["right"]}" y2="{y}" stroke="#888888"/>'
        )
        for tick in axis["ticks"]:
            x = _fmt(tick["pos"])
            parts.append(f'<line x1="{x}" y1="{y}" x2="{x}" y2="{y + 5}" stroke="#888888"/>')
            parts.append(
                f'<text x="{x}" y="{y + 18}" text-anchor="middle" '
                f'font-size="10">{_esc(tick["label"])}</text>'
            )
    else:
        x = MARGIN["left"]
        parts.append(
            f'<line x1="{x}" y1="{MARGIN["top"]}" x2="{x}" '
            f'y2="{height - MARGIN["bottom"]}" stroke="#888888"/>'
        )
        for tick in axis["ticks"]:
            y = _fmt(tick["pos"])
            parts.append(f'<line x1="{x - 5}" y1="{y}" x2="{x}" y2="{y}" stroke="#888888"/>')
            parts.append(
                f'<text x="{x - 8}" y="{y}" text-anchor="end" dominant-baseline="middle" '
                f'font-size="10">{_esc(tick["label"])}</text>'
            )
    parts.append("</g>")
    return "\n".join(parts)


def _item_svg(item: MarkItem) -> str:
    opacity = f' opacity="{_fmt(item.opacity)}"' if item.opacity != 1.0 else ""
    if item.kind == "circle":
        return (
            f'<circle cx="{_fmt(item.x)}" cy="{_fmt(item.y)}" r="{_fmt(item.r)}" '
            f'fill="{item.fill}"{opacity}/>'
        )
    if item.kind == "rect":
        w = item.x2 - item.x
        h = item.y2 - item.y
        return (
            f'<rect x="{_fmt(item.x)}" y="{_fmt(item.y)}" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" fill="{item.fill}"{opacity}/>'
        )
    if item.kind == "line":
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in item.points)
        return (
            f'<polyline points="{pts}" fill="none" stroke="{item.stroke}" '
            f'stroke-width="1.5"{opacity}/>'
        )
    if item.kind == "text":
        return (
            f'<text x="{_fmt(item.x)}" y="{_fmt(item.y)}" fill="{item.fill}" '
            f'font-size="11"{opacity}>{_esc(item.text)}</text>'
        )
    return ""


# ---------------------------------------------------------------------------
# Hit testing

def _segment_distance(px, py, x1, y1, x2, y2) -> float:
    dx, dy = x2 - x1, y2 - y1
    if dx == 0 and dy == 0:
        return math.hypot(px - x1, py - y1)
    t = ((px - x1) * dx + (py - y1) * dy) / (dx * dx + dy * dy)
    t = min(max(t, 0.0), 1.0)
    return math.hypot(px - (x1 + t * dx), py - (y1 + t * dy))


def hit_test(sg: Scenegraph, x: float, y: float):
    """Topmost item containing (x, y); later z-order wins ties."""
    for item in reversed(sg.items):
        if item.kind == "circle":
            if math.hypot(x - item.x, y - item.y) <= max(item.r, HIT_SLOP):
                return item.key
        elif item.kind == "rect":
            if item.x <= x <= item.x2 and item.y <= y <= item.y2:
                return item.key
        elif item.kind == "line":
            for (x1, y1), (x2, y2) in zip(item.points, item.points[1:]):
                if _segment_distance(x, y, x1, y1, x2, y2) <= HIT_SLOP:
                    return item.key
        elif item.kind == "text":
            w = 6.5 * len(item.text or "")
            if item.x <= x <= item.x + w and item.y - 11 <= y <= item.y + 3:
                return item.key
    return None
