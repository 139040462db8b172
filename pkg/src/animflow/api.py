"""High-level pipeline helpers shared by the CLI, the service, and tests."""

from __future__ import annotations

import os

from .compiler import DataflowGraph, compile_spec
from .model import (
    DataTable,
    Diagnostic,
    Spec,
    parse_spec,
    spec_from_dict,
    validate_spec,
)
from .normalize import normalize
from .runtime import RuntimeState


class BuildError(Exception):
    pass


def load_spec(spec) -> Spec:
    if isinstance(spec, Spec):
        return spec
    if isinstance(spec, dict):
        return spec_from_dict(spec)
    return parse_spec(spec)


def load_data(spec: Spec, data=None, spec_dir: str | None = None) -> DataTable:
    """Resolution order: inline rows, then the explicit data argument,
    then the spec's url resolved against the spec file's directory."""
    if spec.data_values is not None:
        return DataTable.from_records(spec.data_values)
    if data is not None:
        if isinstance(data, DataTable):
            return data
        if isinstance(data, list):
            return DataTable.from_records(data)
        if isinstance(data, dict) and "csv" in data:
            return DataTable.from_csv_text(data["csv"])
        if isinstance(data, str):
            return DataTable.from_csv(data)
        raise BuildError(f"unsupported data payload: {type(data).__name__}")
    if spec.data_url is not None:
        path = spec.data_url
        if spec_dir is not None and not os.path.isabs(path):
            path = os.path.join(spec_dir, path)
        if not os.path.exists(path):
            raise FileNotFoundError(f"cannot open {path!r}")
        return DataTable.from_csv(path)
    raise BuildError("spec has no data source")


def build(
    spec, data=None, spec_dir: str | None = None
) -> tuple[RuntimeState | None, list[Diagnostic], DataflowGraph | None]:
    parsed = load_spec(spec)
    table = load_data(parsed, data, spec_dir)
    diagnostics = list(parsed.warnings) + validate_spec(parsed, table)
    if any(d.severity == "error" for d in diagnostics):
        return None, diagnostics, None
    nspec = normalize(parsed, table)
    graph = compile_spec(nspec, table)
    return RuntimeState(graph, table), diagnostics, graph


def build_session(spec, data=None, spec_dir=None) -> tuple[RuntimeState, list[Diagnostic]]:
    state, diagnostics, _ = build(spec, data, spec_dir)
    if state is None:
        from .model import SpecError

        first = next(d for d in diagnostics if d.severity == "error")
        raise SpecError(first.path, first.message)
    return state, diagnostics
