"""animflow: a declarative grammar, compiler, and deterministic runtime
for static, interactive, and animated charts."""

from .api import build, build_session, load_data, load_spec
from .compiler import DataflowGraph, compile_spec, serialize_graph, verify_graph
from .expr import eval_expression, parse_expression
from .model import (
    DataTable,
    Diagnostic,
    Spec,
    SpecError,
    parse_spec,
    serialize_spec,
    spec_from_dict,
    spec_to_dict,
    validate_spec,
)
from .normalize import default_time_scale, infer_key, normalize
from .runtime import (
    EASINGS,
    RuntimeState,
    apply_easing,
    effective_clock,
    replay_trace,
    tween_rows,
)
from .scenegraph import encode_frame, frame_doc, frame_json, hit_test, render_svg

__version__ = "0.1.0"

__all__ = [
    "DataTable",
    "DataflowGraph",
    "Diagnostic",
    "EASINGS",
    "RuntimeState",
    "Spec",
    "SpecError",
    "apply_easing",
    "build",
    "build_session",
    "compile_spec",
    "default_time_scale",
    "effective_clock",
    "encode_frame",
    "eval_expression",
    "frame_doc",
    "frame_json",
    "hit_test",
    "infer_key",
    "load_data",
    "load_spec",
    "normalize",
    "parse_expression",
    "parse_spec",
    "render_svg",
    "replay_trace",
    "serialize_graph",
    "serialize_spec",
    "spec_from_dict",
    "spec_to_dict",
    "tween_rows",
    "validate_spec",
    "verify_graph",
]
