"""Lower a normalized spec into a dataflow graph IR.

The graph holds signal, dataset, scale, and mark nodes with explicit
dependency edges.  Compilation runs six animation stages in a fixed
order on top of the static subgraph; removing the time encoding from a
spec removes exactly the nodes those stages emit.
"""

from __future__ import annotations

import graphlib
import json
from dataclasses import dataclass, field as dc_field

from .expr import free_identifiers, parse_expression
from .model import (
    ChannelDef,
    DataTable,
    Diagnostic,
    SelectionDef,
    Spec,
    VariableParamDef,
)

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
SIZE_AREA_RANGE = (30.0, 900.0)
OPACITY_RANGE = (0.3, 1.0)
COLOR_RAMP = ("#deebf7", "#08519c")


class CompileError(Exception):
    pass


@dataclass
class SignalNode:
    name: str
    init: object = None
    update: dict = dc_field(default_factory=dict)
    on: str | None = None
    gate: str | None = None


@dataclass
class DatasetNode:
    name: str
    source: str | None = None
    ops: list = dc_field(default_factory=list)


@dataclass
class ScaleNode:
    name: str
    kind: str
    domain: dict = dc_field(default_factory=dict)
    range: dict = dc_field(default_factory=dict)


@dataclass
class MarkNode:
    name: str
    mark: str
    dataset: str
    channels: dict = dc_field(default_factory=dict)
    style: dict = dc_field(default_factory=dict)


@dataclass
class DataflowGraph:
    nodes: dict = dc_field(default_factory=dict)
    edges: list = dc_field(default_factory=list)
    roots: list = dc_field(default_factory=list)
    widgets: list = dc_field(default_factory=list)
    selections: dict = dc_field(default_factory=dict)
    meta: dict = dc_field(default_factory=dict)

    def add(self, node) -> None:
        if node.name in self.nodes:
            raise CompileError(f"duplicate node id {node.name!r}")
        self.nodes[node.name] = node

    def topo_order(self) -> list[str]:
        sorter = graphlib.TopologicalSorter({n: set() for n in self.nodes})
        for producer, consumer in self.edges:
            sorter.add(consumer, producer)
        # static_order with a stable tie-break by node id
        sorter.prepare()
        order = []
        while sorter.is_active():
            ready = sorted(sorter.get_ready())
            order.extend(ready)
            sorter.done(*ready)
        return order

    def signal_nodes(self) -> list[SignalNode]:
        return [n for n in self.nodes.values() if isinstance(n, SignalNode)]

    def mark_node(self) -> MarkNode:
        for n in self.nodes.values():
            if isinstance(n, MarkNode):
                return n
        raise CompileError("graph has no mark node")


# ---------------------------------------------------------------------------
# Time scale arithmetic shared with the runtime

def time_scale_params(te, pauses=()) -> dict:
    """Step size, keyframe count, base cycle length, and total cycle
    length (base plus pause durations) for a time encoding."""
    scale = te.scale
    if scale.continuous is not None:
        duration = scale.duration
        base = float(duration)
        out = {
            "continuous": list(scale.continuous),
            "domain": None,
            "step": None,
            "count": None,
            "duration": base,
        }
    else:
        n = len(scale.domain)
        step = scale.step if scale.step is not None else (scale.duration / n if n else 0.0)
        base = float(n * step)
        out = {
            "continuous": None,
            "domain": list(scale.domain),
            "step": float(step),
            "count": n,
            "duration": base,
        }
    out["base_cycle_ms"] = base
    out["cycle_ms"] = base + sum(p["duration"] for p in pauses)
    return out


def pause_schedule(te, sel: SelectionDef) -> list[dict]:
    """Pause windows in cycle-clock coordinates, ordered by position."""
    scale = te.scale
    entries = []
    for entry in sel.pause:
        if scale.continuous is not None:
            lo, hi = scale.continuous
            pos = (entry.value - lo) / (hi - lo) * float(scale.duration)
        else:
            n = len(scale.domain)
            step = scale.step if scale.step is not None else scale.duration / n
            pos = scale.domain.index(entry.value) * float(step)
        entries.append({"value": entry.value, "pos": pos, "duration": float(entry.duration)})
    return sorted(entries, key=lambda e: e["pos"])


# ---------------------------------------------------------------------------
# Compilation stages

def compile_spec(nspec: Spec, data: DataTable) -> DataflowGraph:
    g = DataflowGraph()
    g.meta["width"] = nspec.width
    g.meta["height"] = nspec.height
    g.meta["enter"] = dict(nspec.enter) if nspec.enter else None
    g.meta["exit"] = dict(nspec.exit) if nspec.exit else None

    timers = [s for s in nspec.selections() if s.on.source == "timer"]
    for sel in nspec.selections():
        g.selections[sel.name] = {
            "source": sel.on.source,
            "filter": sel.on.filter,
            "predicate": [
                {"field": c.field, "op": c.op, "rhs": c.rhs} for c in (sel.predicate or ())
            ]
            or None,
            "fields": list(sel.fields) if sel.fields is not None else None,
            "easing": sel.easing or "linear",
            "pauses": pause_schedule(nspec.time_encoding, sel)
            if nspec.time_encoding is not None
            else [],
            "bind": {"widget": sel.bind.widget} if sel.bind is not None else None,
        }

    _compile_static(g, nspec, data)
    compile_animation_clock(g, nspec, timers)
    compile_time_scale(g, nspec, timers)
    compile_animation_selections(g, nspec, timers)
    base = compile_filter_transforms(g, nspec, timers)
    rendered = compile_key(g, nspec, base)
    compile_enter_exit(g, nspec)
    _finish_mark(g, nspec, rendered)
    _apply_rescale(g, nspec, rendered)

    g.edges = infer_edges(g)
    g.roots = sorted(
        n.name for n in g.signal_nodes() if n.on in ("timer", "click", "pointermove", "widget")
    )
    diags = verify_graph(g)
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise CompileError("; ".join(f"{d.path}: {d.message}" for d in errors))
    return g


def _compile_static(g: DataflowGraph, nspec: Spec, data: DataTable) -> None:
    g.add(DatasetNode("source"))
    for channel, cdef in sorted(nspec.encoding.items()):
        node = _scale_for_channel(nspec, channel, cdef, data)
        if node is not None:
            g.add(node)
    g.add(
        MarkNode(
            name="marks",
            mark=nspec.mark.type,
            dataset="rendered",
            style=nspec.mark.style_dict(),
        )
    )


def _bar_orientation(nspec: Spec) -> str | None:
    if nspec.mark.type != "bar":
        return None
    x = nspec.encoding.get("x")
    y = nspec.encoding.get("y")
    x_quant = x is not None and x.type in ("quantitative", "temporal")
    y_quant = y is not None and y.type in ("quantitative", "temporal")
    if x_quant and not y_quant:
        return "horizontal"
    return "vertical"


def _scale_for_channel(nspec: Spec, channel: str, cdef: ChannelDef, data: DataTable):
    fields = []
    if cdef.field is not None:
        fields.append(cdef.field)
    if cdef.condition is not None and cdef.condition.field is not None:
        fields.append(cdef.condition.field)
    if not fields:
        return None
    field = fields[0]
    ftype = cdef.type or "nominal"
    explicit_domain = cdef.scale.domain if cdef.scale is not None else None
    explicit_range = cdef.scale.range if cdef.scale is not None else None
    orient = _bar_orientation(nspec)

    if channel in ("x", "y"):
        if ftype in ("quantitative", "temporal"):
            zero = nspec.mark.type == "bar" and (
                (channel == "x" and orient == "horizontal")
                or (channel == "y" and orient == "vertical")
            )
            domain = (
                {"kind": "static", "values": list(explicit_domain)}
                if explicit_domain is not None
                else {"kind": "extent", "dataset": "source", "field": field,
                      "zero": zero, "dynamic": False}
            )
            return ScaleNode(channel, "linear", domain, {"kind": "position", "axis": channel})
        kind = "band" if nspec.mark.type == "bar" else "point"
        domain = (
            {"kind": "static", "values": list(explicit_domain)}
            if explicit_domain is not None
            else {"kind": "distinct", "dataset": "source", "field": field,
                  "sort": list(cdef.sort) if isinstance(cdef.sort, tuple) else cdef.sort}
        )
        return ScaleNode(channel, kind, domain, {"kind": "position", "axis": channel})

    if channel == "size":
        domain = (
            {"kind": "static", "values": list(explicit_domain)}
            if explicit_domain is not None
            else {"kind": "extent", "dataset": "source", "field": field,
                  "zero": False, "dynamic": False}
        )
        rng = {"kind": "static", "values": list(explicit_range or SIZE_AREA_RANGE)}
        return ScaleNode(channel, "sqrt", domain, rng)

    if channel == "opacity":
        domain = (
            {"kind": "static", "values": list(explicit_domain)}
            if explicit_domain is not None
            else {"kind": "extent", "dataset": "source", "field": field,
                  "zero": False, "dynamic": False}
        )
        rng = {"kind": "static", "values": list(explicit_range or OPACITY_RANGE)}
        return ScaleNode(channel, "linear", domain, rng)

    if channel == "color":
        if ftype == "quantitative":
            domain = {"kind": "extent", "dataset": "source", "field": field,
                      "zero": False, "dynamic": False}
            rng = {"kind": "static", "values": list(explicit_range or COLOR_RAMP)}
            return ScaleNode(channel, "linear-color", domain, rng)
        domain = (
            {"kind": "static", "values": list(explicit_domain)}
            if explicit_domain is not None
            else {"kind": "distinct", "dataset": "source", "field": field, "sort": None}
        )
        rng = {"kind": "static", "values": list(explicit_range or PALETTE)}
        return ScaleNode(channel, "ordinal-color", domain, rng)

    # shape, tooltip, detail carry raw values; no scale node
    return None


def compile_animation_clock(g: DataflowGraph, nspec: Spec, timers: list[SelectionDef]) -> None:
    if not timers:
        return
    te = nspec.time_encoding
    needs_is_playing = False
    for sel in timers:
        params = time_scale_params(te, g.selections[sel.name]["pauses"])
        gate = sel.on.filter
        if sel.bind is not None and sel.bind.widget == "range-slider":
            gate = f"({gate}) && is_playing" if gate else "is_playing"
        if gate is not None and "is_playing" in free_identifiers(parse_expression(gate)):
            needs_is_playing = True
        g.add(
            SignalNode(
                name=f"{sel.name}_clock",
                init=0.0,
                on="timer",
                gate=gate,
                update={"kind": "accumulate_dt"},
            )
        )
        g.add(
            SignalNode(
                name=f"{sel.name}_cycle",
                init=0.0,
                update={"kind": "mod", "of": f"{sel.name}_clock",
                        "modulus": params["cycle_ms"]},
            )
        )
        g.meta.setdefault("time", {}).update(params)
    if needs_is_playing or any(
        s.bind is not None and s.bind.widget == "range-slider" for s in timers
    ):
        user = nspec.param("is_playing")
        init = user.value if isinstance(user, VariableParamDef) and user.value is not None else True
        g.add(SignalNode(name="is_playing", init=init, on="widget",
                         update={"kind": "external"}))
    for p in nspec.variables():
        if p.name == "is_playing" and "is_playing" in g.nodes:
            continue
        g.add(SignalNode(name=p.name, init=p.value, on="widget", update={"kind": "external"}))


def compile_time_scale(g: DataflowGraph, nspec: Spec, timers: list[SelectionDef]) -> None:
    te = nspec.time_encoding
    if te is None or not timers:
        return
    scale = te.scale
    if scale.continuous is not None:
        domain = {"kind": "continuous", "values": list(scale.continuous)}
        rng = {"kind": "duration", "ms": float(scale.duration)}
    else:
        domain = {"kind": "static", "values": list(scale.domain)}
        if scale.step is not None:
            rng = {"kind": "step", "ms": float(scale.step)}
        else:
            rng = {"kind": "duration", "ms": float(scale.duration)}
    g.add(ScaleNode("time", "time", domain, rng))
    primary = timers[0]
    g.meta["time"].update(time_scale_params(te, g.selections[primary.name]["pauses"]))
    g.meta["time"]["primary_selection"] = primary.name
    g.meta["time"]["field"] = te.field
    g.meta["time"]["key"] = te.key
    g.meta["time"]["rescale"] = te.rescale
    g.add(
        SignalNode(
            name="anim_value",
            init=_first_domain_value(te),
            update={"kind": "invert_time_scale", "of": f"{primary.name}_eff",
                    "scale": "time"},
        )
    )


def _first_domain_value(te):
    if te.scale.continuous is not None:
        return te.scale.continuous[0]
    return te.scale.domain[0] if te.scale.domain else None


def compile_animation_selections(g: DataflowGraph, nspec: Spec, timers: list[SelectionDef]) -> None:
    te = nspec.time_encoding
    for sel in timers:
        info = g.selections[sel.name]
        params = time_scale_params(te, info["pauses"])
        g.add(
            SignalNode(
                name=f"{sel.name}_eff",
                init=0.0,
                update={
                    "kind": "effective_clock",
                    "of": f"{sel.name}_cycle",
                    "pauses": info["pauses"],
                    "easing": info["easing"],
                    "base_ms": params["base_cycle_ms"],
                },
            )
        )
        if sel.bind is not None and sel.bind.widget == "range-slider":
            g.widgets.append(
                {
                    "id": f"{sel.name}_slider",
                    "kind": "range-slider",
                    "target": sel.name,
                    "min": sel.bind.min,
                    "max": sel.bind.max,
                    "step": sel.bind.step,
                    "label": nspec.time_encoding.field,
                }
            )
        if sel.bind is not None and sel.bind.widget == "checkbox":
            g.widgets.append(
                {"id": f"{sel.name}_checkbox", "kind": "checkbox",
                 "target": "is_playing", "label": "playing"}
            )
    for p in nspec.variables():
        if p.bind is not None and p.bind.widget == "checkbox":
            g.widgets.append(
                {"id": f"{p.name}_checkbox", "kind": "checkbox",
                 "target": p.name, "label": p.name}
            )
    # a bound slider always ships with a play/pause checkbox
    has_slider = any(w["kind"] == "range-slider" for w in g.widgets)
    has_playpause = any(
        w["kind"] == "checkbox" and w["target"] == "is_playing" for w in g.widgets
    )
    if has_slider and not has_playpause:
        g.widgets.append(
            {"id": "playpause", "kind": "checkbox", "target": "is_playing",
             "label": "playing"}
        )
    # point selections get a membership store driven by their event source
    for sel in nspec.selections():
        if sel.on.source in ("click", "pointermove"):
            g.add(
                SignalNode(
                    name=f"{sel.name}_store",
                    init=[],
                    on=sel.on.source,
                    update={"kind": "point_store",
                            "fields": g.selections[sel.name]["fields"]},
                )
            )


def compile_filter_transforms(g: DataflowGraph, nspec: Spec, timers: list[SelectionDef]) -> str:
    """Materialize the transform chain; returns the final dataset name."""
    current = "source"
    for i, t in enumerate(nspec.transforms):
        name = f"data_{i}"
        if t.filter_expr is not None:
            g.add(DatasetNode(name, source=current,
                              ops=[{"kind": "filter_expr", "expr": t.filter_expr}]))
        else:
            sel = nspec.param(t.filter_param)
            if isinstance(sel, SelectionDef) and sel.on.source == "timer":
                op = {"kind": "filter_selection", "selection": sel.name}
            else:
                op = {"kind": "filter_point", "selection": t.filter_param}
            g.add(DatasetNode(name, source=current, ops=[op]))
        current = name
    return current


def _tween_plan(g: DataflowGraph, nspec: Spec):
    """Tweening applies when the domain is discrete, a key exists, and the
    final transform filters by a timer selection with the default
    eq-on-time-field predicate."""
    te = nspec.time_encoding
    if te is None or te.key is None or te.scale.continuous is not None:
        return None
    if not nspec.transforms:
        return None
    last = nspec.transforms[-1]
    if last.filter_param is None:
        return None
    sel = nspec.param(last.filter_param)
    if not isinstance(sel, SelectionDef) or sel.on.source != "timer":
        return None
    pred = sel.predicate or ()
    if len(pred) != 1:
        return None
    c = pred[0]
    if c.field != te.field or c.op != "eq" or c.rhs != "anim_value":
        return None
    return sel


def compile_key(g: DataflowGraph, nspec: Spec, base: str) -> str:
    sel = _tween_plan(g, nspec)
    if sel is None:
        g.add(DatasetNode("rendered", source=base))
        return "rendered"
    te = nspec.time_encoding
    # the base chain minus the selection's own filter backs the keyframes
    upstream = g.nodes[base].source
    for which in ("current", "next"):
        g.add(
            DatasetNode(
                f"keyframe_{which}",
                source=upstream,
                ops=[{"kind": "keyframe", "which": which, "field": te.field,
                      "of": f"{sel.name}_eff"}],
            )
        )
    params = time_scale_params(te, g.selections[sel.name]["pauses"])
    g.add(
        SignalNode(
            name="tween_u",
            init=0.0,
            update={"kind": "tween_fraction", "of": f"{sel.name}_eff",
                    "step": params["step"], "count": params["count"]},
        )
    )
    g.add(
        DatasetNode(
            "rendered",
            source="keyframe_current",
            ops=[
                {
                    "kind": "tween_join",
                    "key": te.key,
                    "next": "keyframe_next",
                    "u": "tween_u",
                    "fields": _tween_fields(nspec),
                    "enter": nspec.enter is not None,
                    "exit": nspec.exit is not None,
                }
            ],
        )
    )
    return "rendered"


def _tween_fields(nspec: Spec) -> list[str]:
    fields = []
    for channel in ("x", "y", "size", "opacity"):
        cdef = nspec.encoding.get(channel)
        if cdef is not None and cdef.field is not None and cdef.type in (
            "quantitative", "temporal"
        ):
            if cdef.field not in fields:
                fields.append(cdef.field)
    return fields


def compile_enter_exit(g: DataflowGraph, nspec: Spec) -> None:
    if nspec.enter is None and nspec.exit is None:
        return
    g.meta["enter_exit"] = {
        "enter": dict(nspec.enter) if nspec.enter else None,
        "exit": dict(nspec.exit) if nspec.exit else None,
    }


def _finish_mark(g: DataflowGraph, nspec: Spec, rendered: str) -> None:
    mark = g.mark_node()
    mark.dataset = rendered
    for channel, cdef in sorted(nspec.encoding.items()):
        mark.channels[channel] = _channel_encoding(g, channel, cdef)


def _channel_encoding(g: DataflowGraph, channel: str, cdef: ChannelDef) -> dict:
    def branch(value, field):
        if field is not None:
            scale = channel if channel in g.nodes else None
            return {"kind": "field", "field": field, "scale": scale}
        return {"kind": "value", "value": value}

    if cdef.condition is not None:
        then = branch(cdef.condition.value, cdef.condition.field)
        default = branch(cdef.value, cdef.field)
        return {"kind": "conditional", "param": cdef.condition.param,
                "then": then, "else": default}
    return branch(cdef.value, cdef.field)


def _apply_rescale(g: DataflowGraph, nspec: Spec, rendered: str) -> None:
    te = nspec.time_encoding
    if te is None or not te.rescale:
        return
    for channel in ("x", "y"):
        node = g.nodes.get(channel)
        if node is not None and node.kind == "linear" and node.domain["kind"] == "extent":
            node.domain = dict(node.domain, dataset=rendered, dynamic=True)


# ---------------------------------------------------------------------------
# Edges and verification

def infer_edges(g: DataflowGraph) -> list[tuple[str, str]]:
    edges: set = set()

    def dep(producer, consumer):
        if producer in g.nodes and producer != consumer:
            edges.add((producer, consumer))

    for node in g.nodes.values():
        if isinstance(node, SignalNode):
            if "of" in node.update:
                dep(node.update["of"], node.name)
            if node.gate is not None:
                for ident in free_identifiers(parse_expression(node.gate)):
                    # point selection names resolve to their membership store
                    if ident not in g.nodes and f"{ident}_store" in g.nodes:
                        ident = f"{ident}_store"
                    dep(ident, node.name)
        elif isinstance(node, DatasetNode):
            if node.source is not None:
                dep(node.source, node.name)
            for op in node.ops:
                if op["kind"] == "filter_selection":
                    dep("anim_value", node.name)
                elif op["kind"] == "filter_point":
                    dep(f"{op['selection']}_store", node.name)
                elif op["kind"] == "keyframe":
                    dep(op["of"], node.name)
                elif op["kind"] == "tween_join":
                    dep(op["next"], node.name)
                    dep(op["u"], node.name)
        elif isinstance(node, ScaleNode):
            if node.domain.get("kind") in ("extent", "distinct"):
                dep(node.domain["dataset"], node.name)
        elif isinstance(node, MarkNode):
            dep(node.dataset, node.name)
            for enc in node.channels.values():
                for b in (enc, enc.get("then"), enc.get("else")):
                    if b and b.get("scale"):
                        dep(b["scale"], node.name)
    return sorted(edges)


def verify_graph(g: DataflowGraph) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    for producer, consumer in g.edges:
        for end in (producer, consumer):
            if end not in g.nodes:
                diags.append(Diagnostic("error", end, "dangling node reference"))
    try:
        g.topo_order()
    except graphlib.CycleError as e:
        cycle = " -> ".join(e.args[1])
        diags.append(Diagnostic("error", "graph", f"cycle through nodes {cycle}"))
    for name, info in g.selections.items():
        if info["source"] == "timer":
            clocks = [n for n in g.nodes if n == f"{name}_clock"]
            if len(clocks) != 1:
                diags.append(
                    Diagnostic("error", name, f"expected one clock signal, found {len(clocks)}")
                )
    for node in g.nodes.values():
        if isinstance(node, MarkNode) and node.dataset not in g.nodes:
            diags.append(Diagnostic("error", node.name, f"dangling dataset {node.dataset!r}"))
        if isinstance(node, ScaleNode):
            ds = node.domain.get("dataset")
            if ds is not None and ds not in g.nodes:
                diags.append(Diagnostic("error", node.name, f"dangling dataset {ds!r}"))
    return diags


# ---------------------------------------------------------------------------
# IR serialization

def graph_to_dict(g: DataflowGraph) -> dict:
    nodes = []
    for name in sorted(g.nodes):
        node = g.nodes[name]
        entry: dict = {"id": name, "node": type(node).__name__}
        if isinstance(node, SignalNode):
            entry.update(init=node.init, update=node.update, on=node.on, gate=node.gate)
        elif isinstance(node, DatasetNode):
            entry.update(source=node.source, ops=node.ops)
        elif isinstance(node, ScaleNode):
            entry.update(kind=node.kind, domain=node.domain, range=node.range)
        else:
            entry.update(mark=node.mark, dataset=node.dataset,
                         channels=node.channels, style=node.style)
        nodes.append(entry)
    return {
        "nodes": nodes,
        "edges": [list(e) for e in g.edges],
        "roots": g.roots,
        "widgets": g.widgets,
        "selections": g.selections,
        "meta": g.meta,
    }


def serialize_graph(g: DataflowGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=2, sort_keys=True)
