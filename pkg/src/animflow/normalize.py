"""Spec normalization: expand a user spec into its fully-defaulted form.

A normalized spec has explicit width/height, channel types, a fully
specified time scale, an explicit key field, exactly one timer-driven
selection per time encoding, and the filter transform binding that
selection to the mark data.  Normalization is idempotent and never
overrides a user-supplied value.
"""

from __future__ import annotations

from dataclasses import replace

from .model import (
    ChannelDef,
    Comparison,
    DataTable,
    Diagnostic,
    EventStreamDef,
    SelectionDef,
    Spec,
    TimeEncodingDef,
    TimeScaleDef,
    TransformDef,
    infer_field_type,
)

DEFAULT_WIDTH = 500
DEFAULT_HEIGHT = 300
DEFAULT_STEP_MS = 500.0
DEFAULT_CONTINUOUS_DURATION_MS = 5000.0
DEFAULT_SELECTION_NAME = "current_frame"

_MARK_STYLE_DEFAULTS = {
    "circle": {"fill": "#4c78a8"},
    "bar": {"fill": "#4c78a8"},
    "tick": {"fill": "#4c78a8"},
    "line": {"stroke": "#4c78a8"},
    "text": {"fill": "#333333", "font-size": 11},
}


def normalize(spec: Spec, data: DataTable) -> Spec:
    out = Spec(
        data_values=spec.data_values,
        data_url=spec.data_url,
        mark=spec.mark,
        encoding=dict(spec.encoding),
        time_encoding=spec.time_encoding,
        params=list(spec.params),
        transforms=list(spec.transforms),
        width=spec.width if spec.width is not None else DEFAULT_WIDTH,
        height=spec.height if spec.height is not None else DEFAULT_HEIGHT,
        enter=spec.enter,
        exit=spec.exit,
        warnings=list(spec.warnings),
    )

    style = dict(_MARK_STYLE_DEFAULTS.get(out.mark.type, {}))
    style.update(out.mark.style_dict())
    out.mark = replace(out.mark, style=tuple(sorted(style.items())))

    for channel, cdef in list(out.encoding.items()):
        out.encoding[channel] = _normalize_channel(cdef, data)

    if out.time_encoding is not None:
        te = out.time_encoding
        key = te.key if te.key is not None else infer_key(out, data)
        if key is None and te.key is None and _domain_is_discrete(te):
            out.warnings.append(
                Diagnostic(
                    "warning",
                    "encoding.time.key",
                    "no key field could be inferred; keyframes will snap without tweening",
                )
            )
        out.time_encoding = TimeEncodingDef(
            field=te.field,
            key=key,
            scale=default_time_scale(te, data),
            rescale=te.rescale,
        )
        _elaborate_selections(out, data)

    out.params = [_normalize_selection(p, out.time_encoding) for p in out.params]
    return out


def _normalize_channel(cdef: ChannelDef, data: DataTable) -> ChannelDef:
    if cdef.field is not None and cdef.type is None:
        ftype = data.field_type(cdef.field) or infer_field_type(data.values(cdef.field))
        cdef = replace(cdef, type=ftype)
    return cdef


def infer_key(spec: Spec, data: DataTable) -> str | None:
    """Default key field: the detail channel's field, else a categorical
    color field.  Returns None when nothing applies (keyframes snap)."""
    detail = spec.encoding.get("detail")
    if detail is not None and detail.field is not None:
        return detail.field
    color = spec.encoding.get("color")
    if color is not None and color.field is not None:
        ftype = color.type or data.field_type(color.field)
        if ftype in ("nominal", "ordinal"):
            return color.field
    return None


def _domain_is_discrete(te: TimeEncodingDef) -> bool:
    return te.scale is None or te.scale.continuous is None


def default_time_scale(te: TimeEncodingDef, data: DataTable) -> TimeScaleDef:
    user = te.scale or TimeScaleDef()
    if user.continuous is not None:
        duration = user.duration
        if duration is None and user.step is None:
            duration = DEFAULT_CONTINUOUS_DURATION_MS
        return TimeScaleDef(
            continuous=user.continuous, step=user.step, duration=duration
        )
    domain = user.domain
    if domain is None:
        domain = tuple(_sorted_domain(te, data))
    step, duration = user.step, user.duration
    if step is None and duration is None:
        step = DEFAULT_STEP_MS
    return TimeScaleDef(domain=domain, step=step, duration=duration)


def _sorted_domain(te: TimeEncodingDef, data: DataTable) -> list:
    distinct = data.distinct(te.field)
    ftype = data.field_type(te.field)
    if ftype == "ordinal":
        # declared category order is the order of appearance in the data
        return distinct
    return sorted(distinct)


def _timer_selections(spec: Spec) -> list[SelectionDef]:
    return [s for s in spec.selections() if s.on.source == "timer"]


def _referenced_by_condition(spec: Spec, name: str) -> bool:
    return any(
        c.condition is not None and c.condition.param == name
        for c in spec.encoding.values()
    )


def _referenced_by_transform(spec: Spec, name: str) -> bool:
    return any(t.filter_param == name for t in spec.transforms)


def _elaborate_selections(spec: Spec, data: DataTable) -> None:
    te = spec.time_encoding
    timers = _timer_selections(spec)
    if not timers:
        sel = SelectionDef(
            name=DEFAULT_SELECTION_NAME,
            on=EventStreamDef(source="timer"),
            predicate=(Comparison(field=te.field, op="eq", rhs="anim_value"),),
        )
        spec.params.append(sel)
        spec.transforms.append(TransformDef(filter_param=sel.name))
        return
    for sel in timers:
        if _referenced_by_transform(spec, sel.name):
            continue
        if _referenced_by_condition(spec, sel.name):
            # condition-only selections keep every mark visible (no filter)
            continue
        spec.transforms.append(TransformDef(filter_param=sel.name))


def _normalize_selection(p, te: TimeEncodingDef | None):
    if not isinstance(p, SelectionDef):
        return p
    out = p
    if out.on.source == "timer" and out.predicate is None and te is not None:
        out = replace(
            out, predicate=(Comparison(field=te.field, op="eq", rhs="anim_value"),)
        )
    if out.easing is None:
        out = replace(out, easing="linear")
    if (
        out.bind is not None
        and out.bind.widget == "range-slider"
        and te is not None
        and te.scale is not None
    ):
        out = replace(out, bind=_fill_slider_bounds(out.bind, te.scale))
    return out


def _fill_slider_bounds(bind, scale: TimeScaleDef):
    if scale.continuous is not None:
        lo, hi = scale.continuous
        step = bind.step if bind.step is not None else (hi - lo) / 100
    else:
        numeric = [v for v in scale.domain if isinstance(v, (int, float))]
        lo = min(numeric) if numeric else 0
        hi = max(numeric) if numeric else len(scale.domain) - 1
        step = bind.step
        if step is None:
            diffs = [b - a for a, b in zip(numeric, numeric[1:])] if len(numeric) > 1 else []
            step = min(diffs) if diffs else 1
    return replace(
        bind,
        min=bind.min if bind.min is not None else lo,
        max=bind.max if bind.max is not None else hi,
        step=step,
    )
