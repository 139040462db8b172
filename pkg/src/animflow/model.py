"""Grammar document model: data tables, spec types, parsing and validation.

Specs are JSON documents.  ``parse_spec`` builds a :class:`Spec`, raising
:class:`SpecError` on structural problems; unknown keys only warn.
``validate_spec`` checks a parsed spec against its bound data table and
returns diagnostics instead of raising.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace

from .expr import ExprError, parse_expression

FIELD_TYPES = ("quantitative", "ordinal", "nominal", "temporal")
CHANNELS = ("x", "y", "color", "size", "opacity", "shape", "tooltip", "detail")
MARK_TYPES = ("circle", "line", "bar", "text", "tick")
EVENT_SOURCES = ("timer", "pointermove", "click", "widget")
PREDICATE_OPS = ("eq", "lt", "lte", "gt", "gte")
WIDGET_KINDS = ("range-slider", "checkbox")

# Ordered-comparable field types, usable on the time encoding channel.
ORDERED_FIELD_TYPES = ("quantitative", "ordinal", "temporal")


class SpecError(Exception):
    """Structural problem in a spec document, annotated with its path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '$'}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    path: str
    message: str


# ---------------------------------------------------------------------------
# Data tables

def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def infer_field_type(values) -> str:
    non_null = [v for v in values if v is not None]
    if non_null and all(_is_number(v) for v in non_null):
        return "quantitative"
    return "nominal"


@dataclass
class DataTable:
    """Column-typed table.  Rows are dicts keyed by column name."""

    columns: list[tuple[str, str]]
    rows: list[dict]

    def __post_init__(self):
        names = [n for n, _ in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("duplicate column names")

    @property
    def column_names(self) -> list[str]:
        return [n for n, _ in self.columns]

    def field_type(self, name: str) -> str | None:
        for n, t in self.columns:
            if n == name:
                return t
        return None

    def values(self, name: str) -> list:
        return [row.get(name) for row in self.rows]

    def distinct(self, name: str) -> list:
        seen = []
        for v in self.values(name):
            if v not in seen:
                seen.append(v)
        return seen

    @classmethod
    def from_records(cls, records: list[dict], types: dict | None = None) -> "DataTable":
        names: list[str] = []
        for rec in records:
            for key in rec:
                if key not in names:
                    names.append(key)
        types = types or {}
        columns = []
        for name in names:
            ftype = types.get(name) or infer_field_type(r.get(name) for r in records)
            columns.append((name, ftype))
        return cls(columns, [dict(r) for r in records])

    @classmethod
    def from_csv_text(cls, text: str, types: dict | None = None) -> "DataTable":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("CSV file has no header row") from None
        records = []
        for raw in reader:
            if not raw:
                continue
            records.append({name: _coerce(cell) for name, cell in zip(header, raw)})
        return cls.from_records(records, types) if records else cls(
            [(n, (types or {}).get(n, "nominal")) for n in header], []
        )

    @classmethod
    def from_csv(cls, path: str, types: dict | None = None) -> "DataTable":
        with open(path, newline="", encoding="utf-8") as f:
            return cls.from_csv_text(f.read(), types)


def _coerce(cell: str):
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        pass
    if cell == "":
        return None
    if cell in ("true", "false"):
        return cell == "true"
    return cell


# ---------------------------------------------------------------------------
# Spec types

@dataclass(frozen=True)
class ScaleDef:
    kind: str | None = None
    domain: tuple | None = None
    range: tuple | None = None


@dataclass(frozen=True)
class Condition:
    param: str
    value: object = None
    field: str | None = None


@dataclass(frozen=True)
class ChannelDef:
    field: str | None = None
    type: str | None = None
    value: object = None
    scale: ScaleDef | None = None
    sort: tuple | None = None
    condition: Condition | None = None

    @property
    def is_field(self) -> bool:
        return self.field is not None


@dataclass(frozen=True)
class MarkDef:
    type: str
    style: tuple = ()  # sorted (key, value) pairs

    def style_dict(self) -> dict:
        return dict(self.style)


@dataclass(frozen=True)
class TimeScaleDef:
    domain: tuple | None = None          # explicit ordered values
    continuous: tuple | None = None      # (lo, hi)
    step: float | None = None            # ms per domain value
    duration: float | None = None        # total ms


@dataclass(frozen=True)
class TimeEncodingDef:
    field: str
    key: str | None = None
    scale: TimeScaleDef | None = None
    rescale: bool = False


@dataclass(frozen=True)
class EventStreamDef:
    source: str
    filter: str | None = None


@dataclass(frozen=True)
class Comparison:
    field: str
    op: str
    rhs: object  # expression text or literal value


@dataclass(frozen=True)
class BindDef:
    widget: str
    min: float | None = None
    max: float | None = None
    step: float | None = None


@dataclass(frozen=True)
class PauseEntry:
    value: object
    duration: float


@dataclass(frozen=True)
class SelectionDef:
    name: str
    on: EventStreamDef
    type: str = "point"
    predicate: tuple | None = None   # tuple of Comparison, conjunction
    bind: BindDef | None = None
    pause: tuple = ()
    easing: str | None = None
    fields: tuple | None = None


@dataclass(frozen=True)
class VariableParamDef:
    name: str
    value: object = None
    bind: BindDef | None = None


@dataclass(frozen=True)
class TransformDef:
    filter_param: str | None = None
    filter_expr: str | None = None


@dataclass
class Spec:
    data_values: list | None
    data_url: str | None
    mark: MarkDef
    encoding: dict  # channel name -> ChannelDef
    time_encoding: TimeEncodingDef | None = None
    params: list = field(default_factory=list)
    transforms: list = field(default_factory=list)
    width: int | None = None
    height: int | None = None
    enter: dict | None = None  # channel -> value override
    exit: dict | None = None
    warnings: list = field(default_factory=list)

    def selections(self) -> list:
        return [p for p in self.params if isinstance(p, SelectionDef)]

    def variables(self) -> list:
        return [p for p in self.params if isinstance(p, VariableParamDef)]

    def param(self, name: str):
        for p in self.params:
            if p.name == name:
                return p
        return None


# ---------------------------------------------------------------------------
# Parsing

def _expect(value, kinds, path):
    if not isinstance(value, kinds):
        names = (
            kinds.__name__ if isinstance(kinds, type) else "/".join(k.__name__ for k in kinds)
        )
        raise SpecError(path, f"expected {names}, got {type(value).__name__}")
    return value


def _warn_unknown(obj: dict, known: set, path: str, warnings: list):
    for key in obj:
        if key not in known:
            warnings.append(Diagnostic("warning", f"{path}.{key}", "unknown key ignored"))


def parse_spec(text: str) -> Spec:
    """Parse a JSON spec document into a :class:`Spec`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"line {e.lineno} column {e.colno}", f"syntax error: {e.msg}") from None
    return spec_from_dict(doc)


def spec_from_dict(doc: dict) -> Spec:
    _expect(doc, dict, "$")
    warnings: list = []
    missing = [k for k in ("data", "mark") if k not in doc]
    if missing:
        raise SpecError("$", "missing: " + ", ".join(missing))
    _warn_unknown(
        doc,
        {"data", "mark", "encoding", "time_encoding", "params", "transform",
         "width", "height", "enter", "exit", "$schema", "description", "title"},
        "$",
        warnings,
    )

    data = _expect(doc["data"], dict, "data")
    data_values = data.get("values")
    data_url = data.get("url")
    if data_values is None and data_url is None:
        raise SpecError("data", "needs either 'values' or 'url'")
    if data_values is not None:
        _expect(data_values, list, "data.values")

    mark = _parse_mark(doc["mark"], "mark")

    encoding: dict = {}
    time_encoding = None
    enc = _expect(doc.get("encoding", {}), dict, "encoding")
    for channel, cdef in enc.items():
        if channel == "time":
            time_encoding = _parse_time_encoding(cdef, "encoding.time")
            continue
        if channel not in CHANNELS:
            warnings.append(Diagnostic("warning", f"encoding.{channel}", "unknown channel ignored"))
            continue
        encoding[channel] = _parse_channel(cdef, f"encoding.{channel}")

    if "time_encoding" in doc:
        if time_encoding is not None:
            raise SpecError("time_encoding", "time encoding given twice")
        time_encoding = _parse_time_encoding(doc["time_encoding"], "time_encoding")

    params = []
    for i, p in enumerate(_expect(doc.get("params", []), list, "params")):
        params.append(_parse_param(p, f"params[{i}]"))

    transforms = []
    for i, t in enumerate(_expect(doc.get("transform", []), list, "transform")):
        transforms.append(_parse_transform(t, f"transform[{i}]"))

    spec = Spec(
        data_values=data_values,
        data_url=data_url,
        mark=mark,
        encoding=encoding,
        time_encoding=time_encoding,
        params=params,
        transforms=transforms,
        width=doc.get("width"),
        height=doc.get("height"),
        enter=_parse_enter_exit(doc.get("enter"), "enter"),
        exit=_parse_enter_exit(doc.get("exit"), "exit"),
        warnings=warnings,
    )
    return spec


def _parse_mark(value, path) -> MarkDef:
    if isinstance(value, str):
        mtype, style = value, {}
    else:
        obj = _expect(value, dict, path)
        if "type" not in obj:
            raise SpecError(path, "missing: type")
        mtype = obj["type"]
        style = {k: v for k, v in obj.items() if k != "type"}
    if mtype not in MARK_TYPES:
        raise SpecError(path, f"unknown mark type {mtype!r}")
    return MarkDef(mtype, tuple(sorted(style.items())))


def _parse_scale(value, path) -> ScaleDef:
    obj = _expect(value, dict, path)
    domain = obj.get("domain")
    range_ = obj.get("range")
    return ScaleDef(
        kind=obj.get("type"),
        domain=tuple(domain) if domain is not None else None,
        range=tuple(range_) if range_ is not None else None,
    )


def _parse_channel(value, path) -> ChannelDef:
    obj = _expect(value, dict, path)
    cond = None
    if "condition" in obj:
        c = _expect(obj["condition"], dict, f"{path}.condition")
        if "param" not in c:
            raise SpecError(f"{path}.condition", "missing: param")
        cond = Condition(param=c["param"], value=c.get("value"), field=c.get("field"))
    ftype = obj.get("type")
    if ftype is not None and ftype not in FIELD_TYPES:
        raise SpecError(f"{path}.type", f"unknown field type {ftype!r}")
    sort = obj.get("sort")
    return ChannelDef(
        field=obj.get("field"),
        type=ftype,
        value=obj.get("value"),
        scale=_parse_scale(obj["scale"], f"{path}.scale") if "scale" in obj else None,
        sort=tuple(sort) if isinstance(sort, list) else sort,
        condition=cond,
    )


def _parse_time_scale(value, path) -> TimeScaleDef:
    obj = _expect(value, dict, path)
    domain = obj.get("domain")
    continuous = None
    if obj.get("continuous"):
        if domain is None or len(domain) != 2:
            raise SpecError(path, "continuous domain needs a [lo, hi] pair")
        lo, hi = domain
        if not (lo < hi):
            raise SpecError(path, "continuous domain requires lo < hi")
        continuous = (lo, hi)
        domain = None
    range_ = obj.get("range")
    step = duration = None
    if range_ is not None:
        r = _expect(range_, dict, f"{path}.range")
        step = r.get("step")
        duration = r.get("duration")
        if step is not None and step <= 0:
            raise SpecError(f"{path}.range.step", "step must be > 0")
        if duration is not None and duration <= 0:
            raise SpecError(f"{path}.range.duration", "duration must be > 0")
    return TimeScaleDef(
        domain=tuple(domain) if domain is not None else None,
        continuous=continuous,
        step=step,
        duration=duration,
    )


def _parse_time_encoding(value, path) -> TimeEncodingDef:
    obj = _expect(value, dict, path)
    if "field" not in obj:
        raise SpecError(path, "missing: field")
    return TimeEncodingDef(
        field=obj["field"],
        key=obj.get("key"),
        scale=_parse_time_scale(obj["scale"], f"{path}.scale") if "scale" in obj else None,
        rescale=bool(obj.get("rescale", False)),
    )


def _parse_predicate(value, path) -> tuple:
    items = value if isinstance(value, list) else [value]
    comparisons = []
    for i, item in enumerate(items):
        obj = _expect(item, dict, f"{path}[{i}]")
        if "field" not in obj:
            raise SpecError(f"{path}[{i}]", "missing: field")
        ops = [op for op in PREDICATE_OPS if op in obj]
        if not ops:
            raise SpecError(f"{path}[{i}]", "needs one of: " + ", ".join(PREDICATE_OPS))
        for op in ops:
            rhs = obj[op]
            if isinstance(rhs, str):
                try:
                    parse_expression(rhs)
                except ExprError as e:
                    raise SpecError(f"{path}[{i}].{op}", f"bad expression: {e}") from None
            comparisons.append(Comparison(field=obj["field"], op=op, rhs=rhs))
    return tuple(comparisons)


def _parse_bind(value, path) -> BindDef:
    if isinstance(value, str):
        obj = {"input": value}
    else:
        obj = _expect(value, dict, path)
    kind = obj.get("input")
    aliases = {"range": "range-slider", "slider": "range-slider"}
    kind = aliases.get(kind, kind)
    if kind not in WIDGET_KINDS:
        raise SpecError(path, f"unknown widget kind {obj.get('input')!r}")
    return BindDef(widget=kind, min=obj.get("min"), max=obj.get("max"), step=obj.get("step"))


def _parse_param(value, path):
    obj = _expect(value, dict, path)
    if "name" not in obj:
        raise SpecError(path, "missing: name")
    bind = _parse_bind(obj["bind"], f"{path}.bind") if "bind" in obj else None
    if "on" not in obj:
        return VariableParamDef(name=obj["name"], value=obj.get("value"), bind=bind)
    on = _expect(obj["on"], dict, f"{path}.on")
    source = on.get("type")
    if source not in EVENT_SOURCES:
        raise SpecError(f"{path}.on.type", f"unknown event source {source!r}")
    filt = on.get("filter")
    if filt is not None:
        try:
            parse_expression(filt)
        except ExprError as e:
            raise SpecError(f"{path}.on.filter", f"bad expression: {e}") from None
    pauses = []
    for i, p in enumerate(obj.get("pause", [])):
        pobj = _expect(p, dict, f"{path}.pause[{i}]")
        if "value" not in pobj or "duration" not in pobj:
            raise SpecError(f"{path}.pause[{i}]", "missing: value, duration")
        if pobj["duration"] < 0:
            raise SpecError(f"{path}.pause[{i}].duration", "duration must be >= 0")
        pauses.append(PauseEntry(value=pobj["value"], duration=pobj["duration"]))
    fields = obj.get("fields")
    return SelectionDef(
        name=obj["name"],
        on=EventStreamDef(source=source, filter=filt),
        type=obj.get("select", "point"),
        predicate=_parse_predicate(obj["predicate"], f"{path}.predicate")
        if "predicate" in obj
        else None,
        bind=bind,
        pause=tuple(pauses),
        easing=obj.get("easing"),
        fields=tuple(fields) if fields is not None else None,
    )


def _parse_transform(value, path) -> TransformDef:
    obj = _expect(value, dict, path)
    if "filter" not in obj:
        raise SpecError(path, "only filter transforms are supported")
    f = obj["filter"]
    if isinstance(f, dict):
        if "param" not in f:
            raise SpecError(f"{path}.filter", "missing: param")
        return TransformDef(filter_param=f["param"])
    if isinstance(f, str):
        try:
            parse_expression(f)
        except ExprError as e:
            raise SpecError(f"{path}.filter", f"bad expression: {e}") from None
        return TransformDef(filter_expr=f)
    raise SpecError(f"{path}.filter", "expected a param reference or an expression")


def _parse_enter_exit(value, path):
    if value is None:
        return None
    obj = _expect(value, dict, path)
    out = {}
    for channel, v in obj.items():
        if channel not in CHANNELS:
            raise SpecError(f"{path}.{channel}", "unknown channel")
        out[channel] = v["value"] if isinstance(v, dict) else v
    return out


# ---------------------------------------------------------------------------
# Serialization (inverse of parse_spec, used for round-trips and the CLI)

def spec_to_dict(spec: Spec) -> dict:
    doc: dict = {}
    doc["data"] = {"values": spec.data_values} if spec.data_values is not None else {
        "url": spec.data_url
    }
    doc["mark"] = (
        {"type": spec.mark.type, **spec.mark.style_dict()} if spec.mark.style else spec.mark.type
    )
    enc = {}
    for channel, cdef in spec.encoding.items():
        enc[channel] = _channel_to_dict(cdef)
    if spec.time_encoding is not None:
        enc["time"] = _time_encoding_to_dict(spec.time_encoding)
    if enc:
        doc["encoding"] = enc
    if spec.params:
        doc["params"] = [_param_to_dict(p) for p in spec.params]
    if spec.transforms:
        doc["transform"] = [_transform_to_dict(t) for t in spec.transforms]
    for key in ("width", "height"):
        v = getattr(spec, key)
        if v is not None:
            doc[key] = v
    if spec.enter is not None:
        doc["enter"] = {c: {"value": v} for c, v in spec.enter.items()}
    if spec.exit is not None:
        doc["exit"] = {c: {"value": v} for c, v in spec.exit.items()}
    return doc


def _channel_to_dict(cdef: ChannelDef) -> dict:
    obj: dict = {}
    if cdef.field is not None:
        obj["field"] = cdef.field
    if cdef.type is not None:
        obj["type"] = cdef.type
    if cdef.value is not None:
        obj["value"] = cdef.value
    if cdef.scale is not None:
        s: dict = {}
        if cdef.scale.kind is not None:
            s["type"] = cdef.scale.kind
        if cdef.scale.domain is not None:
            s["domain"] = list(cdef.scale.domain)
        if cdef.scale.range is not None:
            s["range"] = list(cdef.scale.range)
        obj["scale"] = s
    if cdef.sort is not None:
        obj["sort"] = list(cdef.sort) if isinstance(cdef.sort, tuple) else cdef.sort
    if cdef.condition is not None:
        c: dict = {"param": cdef.condition.param}
        if cdef.condition.value is not None:
            c["value"] = cdef.condition.value
        if cdef.condition.field is not None:
            c["field"] = cdef.condition.field
        obj["condition"] = c
    return obj


def _time_encoding_to_dict(te: TimeEncodingDef) -> dict:
    obj: dict = {"field": te.field}
    if te.key is not None:
        obj["key"] = te.key
    if te.scale is not None:
        s: dict = {}
        if te.scale.continuous is not None:
            s["domain"] = list(te.scale.continuous)
            s["continuous"] = True
        elif te.scale.domain is not None:
            s["domain"] = list(te.scale.domain)
        if te.scale.step is not None:
            s["range"] = {"step": te.scale.step}
        elif te.scale.duration is not None:
            s["range"] = {"duration": te.scale.duration}
        obj["scale"] = s
    if te.rescale:
        obj["rescale"] = True
    return obj


def _param_to_dict(p) -> dict:
    if isinstance(p, VariableParamDef):
        obj: dict = {"name": p.name}
        if p.value is not None:
            obj["value"] = p.value
        if p.bind is not None:
            obj["bind"] = _bind_to_dict(p.bind)
        return obj
    obj = {"name": p.name, "on": {"type": p.on.source}}
    if p.on.filter is not None:
        obj["on"]["filter"] = p.on.filter
    if p.predicate is not None:
        obj["predicate"] = [{"field": c.field, c.op: c.rhs} for c in p.predicate]
    if p.bind is not None:
        obj["bind"] = _bind_to_dict(p.bind)
    if p.pause:
        obj["pause"] = [{"value": e.value, "duration": e.duration} for e in p.pause]
    if p.easing is not None:
        obj["easing"] = p.easing
    if p.fields is not None:
        obj["fields"] = list(p.fields)
    return obj


def _bind_to_dict(b: BindDef) -> dict:
    obj: dict = {"input": "range" if b.widget == "range-slider" else b.widget}
    for key in ("min", "max", "step"):
        v = getattr(b, key)
        if v is not None:
            obj[key] = v
    return obj


def _transform_to_dict(t: TransformDef) -> dict:
    if t.filter_param is not None:
        return {"filter": {"param": t.filter_param}}
    return {"filter": t.filter_expr}


def serialize_spec(spec: Spec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Validation

def validate_spec(spec: Spec, data: DataTable) -> list[Diagnostic]:
    """Check spec invariants against the bound data.  Pure: identical inputs
    yield an identical diagnostics list."""
    from .runtime import EASINGS  # named easing set lives with the runtime

    diags: list[Diagnostic] = []
    names = set(data.column_names)
    declared = {p.name for p in spec.params}

    def err(path, message):
        diags.append(Diagnostic("error", path, message))

    for channel, cdef in sorted(spec.encoding.items()):
        path = f"encoding.{channel}"
        if cdef.field is not None and cdef.field not in names:
            err(path, f'unknown field "{cdef.field}"')
        if cdef.condition is not None:
            if cdef.condition.param not in declared:
                err(f"{path}.condition", f'undeclared selection "{cdef.condition.param}"')
            if cdef.condition.field is not None and cdef.condition.field not in names:
                err(f"{path}.condition", f'unknown field "{cdef.condition.field}"')

    te = spec.time_encoding
    if te is not None:
        if te.field not in names:
            err("encoding.time", f'unknown field "{te.field}"')
        else:
            ftype = _time_field_type(spec, data)
            if ftype == "nominal":
                err(
                    "encoding.time",
                    f'time field "{te.field}" is nominal; the time field needs a sort order',
                )
        if te.key is not None:
            if te.key not in names:
                err("encoding.time.key", f'unknown field "{te.key}"')
            elif te.field in names:
                _check_key_unique(te, data, err)
        if te.scale is not None and te.scale.continuous is not None:
            lo, hi = te.scale.continuous
            if not (lo < hi):
                err("encoding.time.scale", "continuous domain requires lo < hi")

    timer_count = 0
    for i, p in enumerate(spec.params):
        path = f"params[{i}]"
        if isinstance(p, VariableParamDef):
            continue
        if p.on.source == "timer":
            timer_count += 1
            if te is None:
                err(path, f'timer selection "{p.name}" requires a time encoding')
        if p.easing is not None and p.easing not in EASINGS:
            err(f"{path}.easing", f'unknown easing "{p.easing}"')
        if p.predicate is not None:
            for j, c in enumerate(p.predicate):
                if c.field not in names:
                    err(f"{path}.predicate[{j}]", f'unknown field "{c.field}"')
        if p.fields is not None:
            for f in p.fields:
                if f not in names:
                    err(f"{path}.fields", f'unknown field "{f}"')
        for j, entry in enumerate(p.pause):
            if entry.duration < 0:
                err(f"{path}.pause[{j}]", "duration must be >= 0")
            if te is not None and not _value_in_time_domain(entry.value, spec, data):
                err(f"{path}.pause[{j}]", f"pause value {entry.value!r} not in time domain")
        if p.on.filter is not None:
            from .expr import free_identifiers

            for ident in sorted(free_identifiers(parse_expression(p.on.filter))):
                if ident not in declared and ident != "is_playing":
                    err(f"{path}.on.filter", f'undeclared parameter "{ident}"')

    if te is not None and "current_frame" in declared:
        p = spec.param("current_frame")
        if isinstance(p, VariableParamDef) or p.on.source != "timer":
            err(
                "params",
                'param name "current_frame" collides with the default animated selection',
            )

    for i, t in enumerate(spec.transforms):
        if t.filter_param is not None and t.filter_param not in declared:
            err(f"transform[{i}]", f'undeclared selection "{t.filter_param}"')

    return diags


def _time_field_type(spec: Spec, data: DataTable) -> str:
    te = spec.time_encoding
    for cdef in spec.encoding.values():
        if cdef.field == te.field and cdef.type is not None:
            return cdef.type
    return data.field_type(te.field) or "nominal"


def _check_key_unique(te: TimeEncodingDef, data: DataTable, err):
    frames: dict = {}
    for row in data.rows:
        frames.setdefault(row.get(te.field), []).append(row.get(te.key))
    for fvalue, keys in frames.items():
        if len(keys) != len(set(keys)):
            err(
                "encoding.time.key",
                f'key "{te.key}" not unique within keyframe {fvalue!r}',
            )
            return


def _value_in_time_domain(value, spec: Spec, data: DataTable) -> bool:
    te = spec.time_encoding
    scale = te.scale
    if scale is not None and scale.continuous is not None:
        lo, hi = scale.continuous
        return _is_number(value) and lo <= value <= hi
    if scale is not None and scale.domain is not None:
        return value in scale.domain
    if te.field not in data.column_names:
        return False
    return value in data.distinct(te.field)


__all__ = [
    "CHANNELS",
    "ChannelDef",
    "Comparison",
    "Condition",
    "DataTable",
    "Diagnostic",
    "EventStreamDef",
    "MarkDef",
    "PauseEntry",
    "ScaleDef",
    "SelectionDef",
    "Spec",
    "SpecError",
    "TimeEncodingDef",
    "TimeScaleDef",
    "TransformDef",
    "VariableParamDef",
    "parse_spec",
    "replace",
    "serialize_spec",
    "spec_from_dict",
    "spec_to_dict",
    "validate_spec",
]
