"""Deterministic reactive interpreter for a compiled dataflow graph.

The runtime never reads a wall clock: time only moves through explicit
``advance(dt)`` calls, so any event trace replays to byte-identical
frames.  One full topological propagation runs after every advance or
injected event; no partially-propagated state is observable.
"""

from __future__ import annotations

import math

from .compiler import (
    DataflowGraph,
    DatasetNode,
    MarkNode,
    ScaleNode,
    SignalNode,
)
from .expr import eval_expression, parse_expression
from .model import DataTable

# ---------------------------------------------------------------------------
# Easing

def _in_out(f):
    def g(t):
        if t < 0.5:
            return f(2 * t) / 2
        return 1 - f(2 - 2 * t) / 2

    return g


def _flip(f):
    def g(t):
        return 1 - f(1 - t)

    return g


def _quad(t):
    return t * t


def _cubic(t):
    return t * t * t


def _sin(t):
    return 1 - math.cos(t * math.pi / 2)


def _exp(t):
    return 0.0 if t <= 0 else 2 ** (10 * t - 10)


EASINGS = {
    "linear": lambda t: t,
    "quad-in": _quad,
    "quad-out": _flip(_quad),
    "quad-in-out": _in_out(_quad),
    "cubic-in": _cubic,
    "cubic-out": _flip(_cubic),
    "cubic-in-out": _in_out(_cubic),
    "sin-in": _sin,
    "sin-out": _flip(_sin),
    "sin-in-out": _in_out(_sin),
    "exp-in": _exp,
    "exp-out": _flip(_exp),
    "exp-in-out": _in_out(_exp),
}


def apply_easing(name: str, t: float) -> float:
    if name not in EASINGS:
        raise ValueError(f"unknown easing {name!r}")
    if t <= 0:
        return 0.0
    if t >= 1:
        return 1.0
    return EASINGS[name](t)


def effective_clock(cycle: float, pauses: list[dict], easing: str, base_ms: float) -> float:
    """Pause-adjusted, eased clock on the base timeline.

    Pause windows are flat plateaus anchored at the paused value's band
    start; time outside a window is shifted back by the preceding pause
    durations, then eased over the base duration.
    """
    consumed = 0.0
    frozen = None
    for p in pauses:
        start = p["pos"] + consumed
        if cycle < start:
            break
        if cycle < start + p["duration"]:
            frozen = p["pos"]
            break
        consumed += p["duration"]
    if frozen is not None:
        return frozen
    t = cycle - consumed
    if easing == "linear" or base_ms <= 0:
        return t
    return base_ms * apply_easing(easing, t / base_ms)


# ---------------------------------------------------------------------------
# Tweening

def tween_rows(
    current: list[dict],
    next_: list[dict],
    key: str,
    u: float,
    fields: list[str],
    enter: bool = False,
    exit_: bool = False,
) -> list[dict]:
    """Interpolate quantitative ``fields`` between matching rows.

    Rows are matched by ``key``; keys must be unique on both sides.
    Discrete fields hold the start value for u < 1.  Keys only in
    ``current`` are exiting, keys only in ``next_`` entering; they are
    tagged when enter/exit encodings exist.
    """
    by_key = {}
    for row in next_:
        k = row.get(key)
        if k in by_key:
            raise ValueError(f"duplicate key {k!r} in keyframe")
        by_key[k] = row
    seen = set()
    out = []
    for row in current:
        k = row.get(key)
        if k in seen:
            raise ValueError(f"duplicate key {k!r} in keyframe")
        seen.add(k)
        b = by_key.get(k)
        if b is None:
            r = dict(row)
            if exit_:
                r["_status"] = "exit"
            out.append(r)
            continue
        if u <= 0:
            out.append(dict(row))
        elif u >= 1:
            r = dict(row)
            for f in fields:
                r[f] = b[f]
            out.append(r)
        else:
            r = dict(row)
            for f in fields:
                a, z = row[f], b[f]
                r[f] = a + u * (z - a)
            out.append(r)
    if enter:
        for row in next_:
            if row.get(key) not in seen:
                r = dict(row)
                r["_status"] = "enter"
                out.append(r)
    return out


# ---------------------------------------------------------------------------
# Runtime state

def _truthy(v) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, list):
        return len(v) > 0
    return bool(v)


_PREDICATE_OPS = {"eq": "==", "lt": "<", "lte": "<=", "gt": ">", "gte": ">="}


class RuntimeError_(Exception):
    pass


class RuntimeState:
    """Owner-confined interpreter state for one session."""

    def __init__(self, graph: DataflowGraph, data: DataTable):
        self.graph = graph
        self.data = data
        missing = self._missing_fields()
        if missing:
            raise RuntimeError_(
                "dataset is missing fields referenced by the graph: " + ", ".join(missing)
            )
        self.source_rows = [dict(row, _id=i) for i, row in enumerate(data.rows)]
        self.signals: dict = {}
        self.datasets: dict = {}
        self.scale_domains: dict = {}
        self._static_domains: dict = {}
        self._expr_cache: dict = {}
        self._topo = graph.topo_order()
        for node in graph.signal_nodes():
            self.signals[node.name] = node.init
        self.widgets = [dict(w, value=None) for w in graph.widgets]
        self._sg = None
        self.propagate()

    # -- clock --------------------------------------------------------------

    @property
    def raw_clock(self) -> float:
        time = self.graph.meta.get("time")
        if time is None:
            return 0.0
        return float(self.signals.get(f"{time['primary_selection']}_clock", 0.0))

    @property
    def cycle_ms(self) -> float:
        time = self.graph.meta.get("time")
        return float(time["cycle_ms"]) if time else 0.0

    def current_anim_value(self):
        return self.signals.get("anim_value")

    def advance(self, dt: float) -> "RuntimeState":
        if dt < 0:
            raise ValueError("dt must be >= 0")
        for node in self.graph.signal_nodes():
            if node.update.get("kind") != "accumulate_dt":
                continue
            if node.gate is not None and not _truthy(self._eval_expr_text(node.gate, {})):
                continue
            self.signals[node.name] = self.signals[node.name] + dt
        self.propagate()
        return self

    # -- events -------------------------------------------------------------

    def inject_event(self, event: dict) -> "RuntimeState":
        etype = event.get("type")
        if etype == "timer":
            return self.advance(event.get("dt", 0))
        if etype in ("pointermove", "click"):
            self._pointer_event(event)
        elif etype == "widget_set":
            self._widget_event(event)
        else:
            raise RuntimeError_(f"unknown event type {etype!r}")
        self.propagate()
        return self

    def _pointer_event(self, event: dict) -> None:
        from .scenegraph import hit_test

        key = hit_test(self.scenegraph(), event["x"], event["y"])
        shift = "shift" in (event.get("modifiers") or [])
        for node in self.graph.signal_nodes():
            if node.update.get("kind") != "point_store" or node.on != event["type"]:
                continue
            store = list(self.signals[node.name])
            entry = self._store_entry(node, key)
            if entry is None:
                if not shift:
                    store = []
            elif event["type"] == "click" and shift:
                if entry in store:
                    store.remove(entry)
                else:
                    store.append(entry)
            else:
                store = [entry]
            self.signals[node.name] = store

    def _store_entry(self, node: SignalNode, key):
        if key is None:
            return None
        fields = node.update.get("fields")
        if not fields:
            return key
        rendered = self.datasets.get(self.graph.mark_node().dataset, [])
        row = next((r for r in rendered if self._row_key(r) == key), None)
        if row is None:
            row = next((r for r in self.source_rows if self._row_key(r) == key), None)
        if row is None:
            return None
        return tuple(row.get(f) for f in fields)

    def _widget_event(self, event: dict) -> None:
        wid = event.get("widget")
        widget = next((w for w in self.widgets if w["id"] == wid), None)
        if widget is None:
            raise RuntimeError_(f"unknown widget id {wid!r}")
        if widget["kind"] == "checkbox":
            self.signals[widget["target"]] = bool(event["value"])
            return
        # scrubbing a clock-bound slider pauses playback and sets the clock
        sel = widget["target"]
        self.signals[f"{sel}_clock"] = self.value_to_cycle(sel, event["value"])
        if "is_playing" in self.signals:
            self.signals["is_playing"] = False

    def value_to_cycle(self, selection: str, value) -> float:
        time = self.graph.meta["time"]
        pauses = self.graph.selections[selection]["pauses"]
        if time["continuous"] is not None:
            lo, hi = time["continuous"]
            pos = (value - lo) / (hi - lo) * time["duration"]
        else:
            domain = time["domain"]
            if value in domain:
                idx = domain.index(value)
            else:
                numeric = [
                    (abs(v - value), i)
                    for i, v in enumerate(domain)
                    if isinstance(v, (int, float))
                ]
                if not numeric:
                    raise RuntimeError_(f"value {value!r} not in time domain")
                idx = min(numeric)[1]
            pos = idx * time["step"]
        return pos + sum(p["duration"] for p in pauses if p["pos"] < pos)

    # -- propagation --------------------------------------------------------

    def propagate(self) -> None:
        for name in self._topo:
            node = self.graph.nodes[name]
            if isinstance(node, SignalNode):
                self.signals[name] = self._eval_signal(node)
            elif isinstance(node, DatasetNode):
                self.datasets[name] = self._eval_dataset(node)
            elif isinstance(node, ScaleNode):
                domain = self._resolve_domain(node)
                if domain is not None:
                    self.scale_domains[name] = domain
        self._sync_widgets()
        self._sg = None

    def _eval_signal(self, node: SignalNode):
        kind = node.update.get("kind")
        if kind in ("accumulate_dt", "external", "point_store", None):
            return self.signals[node.name]
        if kind == "mod":
            modulus = node.update["modulus"]
            if modulus <= 0:
                return 0.0
            return math.fmod(self.signals[node.update["of"]], modulus)
        if kind == "effective_clock":
            return effective_clock(
                self.signals[node.update["of"]],
                node.update["pauses"],
                node.update["easing"],
                node.update["base_ms"],
            )
        if kind == "invert_time_scale":
            return self._invert_time(self.signals[node.update["of"]])
        if kind == "tween_fraction":
            eff = self.signals[node.update["of"]]
            step, count = node.update["step"], node.update["count"]
            idx = int(eff // step)
            if idx >= count - 1:
                return 0.0
            return (eff - idx * step) / step
        raise RuntimeError_(f"unknown signal update {kind!r}")

    def _invert_time(self, eff: float):
        time = self.graph.meta["time"]
        if time["continuous"] is not None:
            lo, hi = time["continuous"]
            return lo + (eff / time["duration"]) * (hi - lo)
        idx = min(int(eff // time["step"]), time["count"] - 1)
        return time["domain"][idx]

    def _keyframe_index(self, eff: float, which: str) -> int:
        time = self.graph.meta["time"]
        idx = min(int(eff // time["step"]), time["count"] - 1)
        if which == "next":
            idx = min(idx + 1, time["count"] - 1)
        return idx

    def _eval_dataset(self, node: DatasetNode) -> list[dict]:
        rows = self.source_rows if node.source is None else self.datasets[node.source]
        if node.name == "source" and not node.ops:
            return rows
        for op in node.ops:
            kind = op["kind"]
            if kind == "filter_expr":
                expr = self._parse_cached(op["expr"])
                rows = [
                    r for r in rows
                    if _truthy(eval_expression(expr, {**self._signal_env(), **r}))
                ]
            elif kind == "filter_selection":
                rows = [r for r in rows if self.evaluate_selection(op["selection"], r)]
            elif kind == "filter_point":
                rows = [r for r in rows if self.evaluate_selection(op["selection"], r)]
            elif kind == "keyframe":
                idx = self._keyframe_index(self.signals[op["of"]], op["which"])
                value = self.graph.meta["time"]["domain"][idx]
                rows = [r for r in rows if r.get(op["field"]) == value]
            elif kind == "tween_join":
                rows = tween_rows(
                    rows,
                    self.datasets[op["next"]],
                    op["key"],
                    self.signals[op["u"]],
                    op["fields"],
                    enter=op["enter"],
                    exit_=op["exit"],
                )
            else:
                raise RuntimeError_(f"unknown dataset op {kind!r}")
        return rows

    def _resolve_domain(self, node: ScaleNode):
        spec = node.domain
        kind = spec.get("kind")
        if kind in ("static", "continuous"):
            return list(spec["values"])
        if kind == "distinct":
            if node.name in self._static_domains:
                return self._static_domains[node.name]
            if spec.get("sort"):
                domain = list(spec["sort"])
            else:
                seen: list = []
                for row in self.datasets[spec["dataset"]]:
                    v = row.get(spec["field"])
                    if v not in seen:
                        seen.append(v)
                domain = seen
            self._static_domains[node.name] = domain
            return domain
        if kind == "extent":
            if not spec.get("dynamic") and node.name in self._static_domains:
                return self._static_domains[node.name]
            rows = self.datasets[spec["dataset"]]
            domain = _extent(rows, spec["field"], spec.get("zero", False))
            if domain is None:
                # empty frame keeps the previous domain
                previous = self.scale_domains.get(node.name)
                if previous is not None:
                    return previous
                domain = _extent(self.source_rows, spec["field"], spec.get("zero", False))
                if domain is None:
                    domain = [0.0, 1.0]
            if not spec.get("dynamic"):
                self._static_domains[node.name] = domain
            return domain
        raise RuntimeError_(f"unknown domain spec {kind!r}")

    # -- selections ---------------------------------------------------------

    def evaluate_selection(self, name: str, row: dict) -> bool:
        info = self.graph.selections.get(name)
        if info is None:
            raise RuntimeError_(f"unknown selection {name!r}")
        if info["source"] == "timer":
            env = self._signal_env()
            for c in info["predicate"] or []:
                lhs = row.get(c["field"])
                rhs = c["rhs"]
                if isinstance(rhs, str):
                    rhs = eval_expression(self._parse_cached(rhs), env)
                if not _compare_values(c["op"], lhs, rhs):
                    return False
            return True
        store = self.signals.get(f"{name}_store", [])
        if not store:
            return False
        if info["fields"]:
            return tuple(row.get(f) for f in info["fields"]) in store
        return self._row_key(row) in store

    def _row_key(self, row: dict):
        key_field = (self.graph.meta.get("time") or {}).get("key")
        if key_field is not None and key_field in row:
            return row[key_field]
        return row.get("_id")

    def _signal_env(self) -> dict:
        env = {}
        for name, value in self.signals.items():
            env[name] = _truthy(value) if isinstance(value, list) else value
        for name, info in self.graph.selections.items():
            if info["source"] in ("click", "pointermove"):
                env[name] = _truthy(self.signals.get(f"{name}_store", []))
        return env

    def _parse_cached(self, text: str):
        node = self._expr_cache.get(text)
        if node is None:
            node = parse_expression(text)
            self._expr_cache[text] = node
        return node

    def _eval_expr_text(self, text: str, extra: dict):
        return eval_expression(self._parse_cached(text), {**self._signal_env(), **extra})

    # -- frames -------------------------------------------------------------

    def scenegraph(self):
        if self._sg is None:
            from .scenegraph import encode_frame

            self._sg = encode_frame(self)
        return self._sg

    def _sync_widgets(self) -> None:
        for w in self.widgets:
            if w["kind"] == "range-slider":
                w["value"] = self.signals.get("anim_value")
            else:
                w["value"] = _truthy(self.signals.get(w["target"], True))

    def _missing_fields(self) -> list[str]:
        names = set(self.data.column_names)
        missing = set()
        for node in self.graph.nodes.values():
            if isinstance(node, MarkNode):
                for enc in node.channels.values():
                    for b in (enc, enc.get("then"), enc.get("else")):
                        if b and b.get("kind") == "field" and b["field"] not in names:
                            missing.add(b["field"])
        return sorted(missing)


def _extent(rows: list[dict], field: str, zero: bool):
    values = [
        r[field]
        for r in rows
        if isinstance(r.get(field), (int, float)) and not isinstance(r.get(field), bool)
    ]
    if not values:
        return None
    lo, hi = min(values), max(values)
    if zero:
        lo = min(0, lo)
        hi = max(0, hi)
    if lo == hi:
        pad = abs(lo) * 0.05 or 1.0
        lo, hi = lo - pad, hi + pad
    return [lo, hi]


def _compare_values(op: str, lhs, rhs) -> bool:
    from .expr import _compare

    return _compare(_PREDICATE_OPS[op], lhs, rhs)


def init(graph: DataflowGraph, data: DataTable) -> RuntimeState:
    return RuntimeState(graph, data)


def replay_trace(state: RuntimeState, records: list[dict]) -> list[RuntimeState]:
    """Apply trace records in order, advancing by the gap between
    consecutive t_offsets.  Yields the state after each record."""
    t = 0.0
    states = []
    for rec in records:
        offset = rec.get("t_offset_ms", t)
        if offset < t:
            raise RuntimeError_("trace offsets must be non-decreasing")
        if offset > t:
            state.advance(offset - t)
            t = offset
        state.inject_event(rec["event"])
        states.append(state)
    return states
