import json
import os
import shutil

import pytest
from click.testing import CliRunner

import animflow as af
from animflow.cli import main

from conftest import CORPUS, corpus_path, load_corpus_doc


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, list(args), catch_exceptions=False)


def test_validate_ok(runner):
    result = invoke(runner, "validate", corpus_path("gapminder.json"))
    assert result.exit_code == 0


def test_validate_spec_error_exit_1(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    result = invoke(runner, "validate", str(bad))
    assert result.exit_code == 1


def test_validate_missing_file_exit_2(runner):
    result = invoke(runner, "validate", "/no/such/spec.json")
    assert result.exit_code == 2


def test_validate_missing_data_exit_2(runner, tmp_path):
    doc = load_corpus_doc("gapminder")
    doc["data"] = {"url": "missing.csv"}
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(doc))
    result = invoke(runner, "validate", str(spec))
    assert result.exit_code == 2


def test_validate_structured_output(runner, tmp_path):
    doc = load_corpus_doc("gapminder")
    doc["encoding"]["time"] = {"field": "bogus"}
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(doc))
    shutil.copy(corpus_path("gapminder.csv"), tmp_path / "gapminder.csv")
    result = invoke(runner, "validate", str(spec), "--format", "structured")
    assert result.exit_code == 1
    diags = json.loads(result.stderr)
    assert all({"severity", "path", "message"} <= set(d) for d in diags)


def test_data_flag_overrides_spec_url(runner, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(load_corpus_doc("gapminder")))
    # spec-relative url would fail; --data points at the real file
    result = invoke(
        runner, "validate", str(spec), "--data", corpus_path("gapminder.csv")
    )
    assert result.exit_code == 0


def test_compile_normalized_only_adds_defaults(runner):
    result = invoke(
        runner, "compile", corpus_path("gapminder.json"), "--normalized-only"
    )
    assert result.exit_code == 0
    doc = json.loads(result.output)
    params = {p["name"] for p in doc.get("params", [])}
    assert "current_frame" in params
    assert doc["encoding"]["time"]["key"] == "country"
    assert doc["encoding"]["time"]["scale"]["domain"][0] == 1955


def test_compile_emits_graph_json(runner, tmp_path):
    out = tmp_path / "ir.json"
    result = invoke(
        runner, "compile", corpus_path("gapminder.json"), "-o", str(out)
    )
    assert result.exit_code == 0
    doc = json.loads(out.read_text())
    assert {"nodes", "edges", "roots", "widgets", "meta"} <= set(doc)


def test_render_frame_count(runner, tmp_path):
    outdir = tmp_path / "frames"
    result = invoke(
        runner, "render", corpus_path("gapminder.json"),
        "--fps", "2", "--outdir", str(outdir),
    )
    assert result.exit_code == 0
    # ceil(5500 * 1 * 2 / 1000) = 11 frames
    frames = sorted(p for p in os.listdir(outdir) if p.endswith(".svg"))
    assert len(frames) == 11
    manifest = json.loads((outdir / "manifest.json").read_text())
    assert set(manifest) == set(frames)
    assert (outdir / "index.html").exists()


def test_render_two_cycles_repeat(runner, tmp_path):
    outdir = tmp_path / "frames"
    result = invoke(
        runner, "render", corpus_path("gapminder.json"),
        "--fps", "2", "--cycles", "2", "--outdir", str(outdir),
        "--format", "frame-doc",
    )
    assert result.exit_code == 0
    manifest = json.loads((outdir / "manifest.json").read_text())
    assert len(manifest) == 22
    for i in range(11):
        a = manifest[f"frame_{i:04d}.json"]
        b = manifest[f"frame_{i + 11:04d}.json"]
        assert a == b, i


def test_render_rejects_bad_fps(runner, tmp_path):
    result = invoke(
        runner, "render", corpus_path("gapminder.json"),
        "--fps", "0", "--outdir", str(tmp_path / "x"),
    )
    assert result.exit_code == 1


def test_trace_replay_matches_library(runner, tmp_path):
    records = [
        {"t_offset_ms": 500, "event": {"type": "timer", "dt": 0}},
        {"t_offset_ms": 1250, "event": {"type": "timer", "dt": 0}},
    ]
    trace_file = tmp_path / "trace.ndjson"
    trace_file.write_text("\n".join(json.dumps(r) for r in records) + "\n")
    outdir = tmp_path / "frames"
    result = invoke(
        runner, "trace", corpus_path("gapminder.json"), str(trace_file),
        "--outdir", str(outdir),
    )
    assert result.exit_code == 0
    files = sorted(os.listdir(outdir))
    assert files == ["frame_0000.json", "frame_0001.json", "frame_0002.json"]

    spec = af.parse_spec(open(corpus_path("gapminder.json")).read())
    state, diags, _ = af.build(spec, spec_dir=CORPUS)
    af.replay_trace(state, records)
    expect = af.frame_json(state.scenegraph()) + "\n"
    assert (outdir / "frame_0002.json").read_text() == expect
