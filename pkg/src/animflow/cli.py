"""Command-line surface: validate, compile, render, trace, serve."""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys

import click

from . import api
from .compiler import compile_spec, serialize_graph
from .model import SpecError, parse_spec, spec_to_dict, validate_spec
from .normalize import normalize
from .runtime import RuntimeState, replay_trace
from .scenegraph import frame_doc, frame_json, render_svg

EXIT_OK = 0
EXIT_SPEC_ERROR = 1
EXIT_IO_ERROR = 2
EXIT_INTERNAL = 3


def _read_spec(spec_path: str):
    try:
        with open(spec_path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        click.echo(f"cannot open {spec_path!r}: {e.strerror}", err=True)
        sys.exit(EXIT_IO_ERROR)
    return parse_spec(text)


def _load_table(spec, data_path, spec_path):
    try:
        return api.load_data(spec, data_path, os.path.dirname(os.path.abspath(spec_path)))
    except FileNotFoundError as e:
        click.echo(f"cannot open: {e}", err=True)
        sys.exit(EXIT_IO_ERROR)
    except OSError as e:
        click.echo(f"cannot open: {e}", err=True)
        sys.exit(EXIT_IO_ERROR)


def _emit_diagnostics(diags, structured: bool) -> None:
    if structured:
        payload = [
            {"severity": d.severity, "path": d.path, "message": d.message} for d in diags
        ]
        click.echo(json.dumps(payload, indent=2), err=True)
    else:
        for d in diags:
            click.echo(f"{d.severity}: {d.path}: {d.message}", err=True)


@click.group()
def main():
    """Compile and run animated chart specifications."""


@main.command()
@click.argument("spec_path", type=click.Path())
@click.option("--data", "data_path", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "structured"]), default="text")
def validate(spec_path, data_path, fmt):
    """Validate a spec against its data; exit 0 iff no errors."""
    try:
        spec = _read_spec(spec_path)
    except SpecError as e:
        _emit_diagnostics(
            [type("D", (), {"severity": "error", "path": e.path, "message": e.message})()],
            fmt == "structured",
        )
        sys.exit(EXIT_SPEC_ERROR)
    table = _load_table(spec, data_path, spec_path)
    diags = list(spec.warnings) + validate_spec(spec, table)
    _emit_diagnostics(diags, fmt == "structured")
    sys.exit(EXIT_SPEC_ERROR if any(d.severity == "error" for d in diags) else EXIT_OK)


@main.command()
@click.argument("spec_path", type=click.Path())
@click.option("--data", "data_path", type=click.Path(), default=None)
@click.option("-o", "out_path", type=click.Path(), default=None)
@click.option("--normalized-only", is_flag=True, default=False)
def compile(spec_path, data_path, out_path, normalized_only):
    """Compile a spec to the dataflow IR (or just normalize it)."""
    try:
        spec = _read_spec(spec_path)
        table = _load_table(spec, data_path, spec_path)
        diags = validate_spec(spec, table)
        if any(d.severity == "error" for d in diags):
            _emit_diagnostics(diags, False)
            sys.exit(EXIT_SPEC_ERROR)
        nspec = normalize(spec, table)
        if normalized_only:
            text = json.dumps(spec_to_dict(nspec), indent=2, sort_keys=True)
        else:
            text = serialize_graph(compile_spec(nspec, table))
    except SpecError as e:
        click.echo(str(e), err=True)
        sys.exit(EXIT_SPEC_ERROR)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        click.echo(text)


def _build_state(spec_path, data_path):
    try:
        spec = _read_spec(spec_path)
        table = _load_table(spec, data_path, spec_path)
        diags = validate_spec(spec, table)
        if any(d.severity == "error" for d in diags):
            _emit_diagnostics(diags, False)
            sys.exit(EXIT_SPEC_ERROR)
        nspec = normalize(spec, table)
        graph = compile_spec(nspec, table)
        return RuntimeState(graph, table)
    except SpecError as e:
        click.echo(str(e), err=True)
        sys.exit(EXIT_SPEC_ERROR)


def _write_frame(state, path: str, fmt: str) -> str:
    if fmt == "svg":
        text = render_svg(state.scenegraph())
    else:
        text = frame_json(state.scenegraph()) + "\n"
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@main.command()
@click.argument("spec_path", type=click.Path())
@click.option("--data", "data_path", type=click.Path(), default=None)
@click.option("--fps", type=float, default=30.0, show_default=True)
@click.option("--cycles", type=int, default=1, show_default=True)
@click.option("--outdir", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["svg", "frame-doc"]), default="svg")
def render(spec_path, data_path, fps, cycles, outdir, fmt):
    """Render a frame sequence at a fixed logical frame rate."""
    if fps <= 0 or cycles < 1:
        click.echo("fps must be > 0 and cycles >= 1", err=True)
        sys.exit(EXIT_SPEC_ERROR)
    state = _build_state(spec_path, data_path)
    os.makedirs(outdir, exist_ok=True)
    cycle_ms = state.cycle_ms
    count = max(1, math.ceil(cycle_ms * cycles * fps / 1000.0)) if cycle_ms > 0 else 1
    dt = 1000.0 / fps
    ext = "svg" if fmt == "svg" else "json"
    manifest = {}
    names = []
    for i in range(count):
        name = f"frame_{i:04d}.{ext}"
        manifest[name] = _write_frame(state, os.path.join(outdir, name), fmt)
        names.append(name)
        state.advance(dt)
    with open(os.path.join(outdir, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
    if fmt == "svg":
        _write_contact_sheet(outdir, names)
    click.echo(f"wrote {count} frames to {outdir}")


def _write_contact_sheet(outdir: str, names: list[str]) -> None:
    rows = "\n".join(
        f'<figure><img src="{n}" alt="{n}"/><figcaption>{n}</figcaption></figure>'
        for n in names
    )
    html = (
        "<!doctype html>\n<html><head><meta charset=\"utf-8\">"
        "<title>frames</title><style>figure{display:inline-block;margin:4px}"
        "img{border:1px solid #ccc}</style></head>\n"
        f"<body>\n{rows}\n</body></html>\n"
    )
    with open(os.path.join(outdir, "index.html"), "w", encoding="utf-8") as f:
        f.write(html)


@main.command()
@click.argument("spec_path", type=click.Path())
@click.argument("trace_path", type=click.Path())
@click.option("--data", "data_path", type=click.Path(), default=None)
@click.option("--outdir", type=click.Path(), required=True)
@click.option("--format", "fmt", type=click.Choice(["svg", "frame-doc"]), default="frame-doc")
def trace(spec_path, trace_path, data_path, outdir, fmt):
    """Replay a newline-delimited event trace, one frame per record."""
    state = _build_state(spec_path, data_path)
    try:
        with open(trace_path, encoding="utf-8") as f:
            records = [json.loads(line) for line in f if line.strip()]
    except OSError as e:
        click.echo(f"cannot open {trace_path!r}: {e.strerror}", err=True)
        sys.exit(EXIT_IO_ERROR)
    os.makedirs(outdir, exist_ok=True)
    ext = "svg" if fmt == "svg" else "json"
    t = 0.0
    for i, rec in enumerate(records):
        offset = rec.get("t_offset_ms", t)
        if offset > t:
            state.advance(offset - t)
            t = offset
        state.inject_event(rec["event"])
        _write_frame(state, os.path.join(outdir, f"frame_{i:04d}.{ext}"), fmt)
    _write_frame(state, os.path.join(outdir, f"frame_{len(records):04d}.{ext}"), fmt)
    click.echo(f"wrote {len(records) + 1} frames to {outdir}")


@main.command()
@click.option("--port", type=int, default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, host):
    """Run the playground session service."""
    import uvicorn

    from .service import create_app

    if port is None:
        port = int(os.environ.get("ANIMFLOW_PORT", "7878"))
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
