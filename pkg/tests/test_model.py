import json

import pytest

import animflow as af
from animflow.model import DataTable, PauseEntry, SelectionDef, SpecError

from conftest import CORPUS_SPECS, build_corpus, corpus_table, load_corpus_spec


def test_parse_gapminder():
    spec = load_corpus_spec("gapminder")
    assert spec.mark.type == "circle"
    assert spec.time_encoding.field == "year"
    assert set(spec.encoding) == {"x", "y", "size", "color"}


def test_empty_document_is_schema_violation():
    with pytest.raises(SpecError, match="missing: data, mark"):
        af.parse_spec("{}")


def test_syntax_error_is_position_annotated():
    with pytest.raises(SpecError, match="line 1"):
        af.parse_spec("{nope}")


def test_pause_entries_parse():
    spec = af.spec_from_dict(
        {
            "data": {"values": [{"year": 1995}]},
            "mark": "circle",
            "encoding": {"time": {"field": "year"}},
            "params": [
                {
                    "name": "current_frame",
                    "on": {"type": "timer"},
                    "pause": [{"value": 1995, "duration": 2000}],
                }
            ],
        }
    )
    sel = spec.param("current_frame")
    assert isinstance(sel, SelectionDef)
    assert sel.pause == (PauseEntry(value=1995, duration=2000),)


def test_unknown_top_level_key_warns_not_fails():
    spec = af.spec_from_dict(
        {"data": {"values": []}, "mark": "circle", "usermeta": {"x": 1}}
    )
    assert any(w.path == "$.usermeta" for w in spec.warnings)


@pytest.mark.parametrize("name", CORPUS_SPECS)
def test_round_trip(name):
    spec = load_corpus_spec(name)
    again = af.parse_spec(af.serialize_spec(spec))
    assert af.spec_to_dict(again) == af.spec_to_dict(spec)


@pytest.mark.parametrize("name", CORPUS_SPECS)
def test_corpus_validates(name):
    spec = load_corpus_spec(name)
    table = corpus_table(name)
    assert af.validate_spec(spec, table) == []


def test_unknown_time_field_diagnostic():
    spec = load_corpus_spec("gapminder")
    table = corpus_table("gapminder")
    bad = af.spec_from_dict(
        {**af.spec_to_dict(spec), "encoding": {**af.spec_to_dict(spec)["encoding"],
                                               "time": {"field": "bogus"}}}
    )
    diags = af.validate_spec(bad, table)
    assert any(d.severity == "error" and 'unknown field "bogus"' in d.message for d in diags)


def test_duplicate_key_within_keyframe_diagnostic():
    table = DataTable.from_records(
        [
            {"year": 1955, "country": "A", "v": 1},
            {"year": 1955, "country": "A", "v": 2},
            {"year": 1960, "country": "A", "v": 3},
        ]
    )
    spec = af.spec_from_dict(
        {
            "data": {"values": []},
            "mark": "circle",
            "encoding": {
                "x": {"field": "v"},
                "time": {"field": "year", "key": "country"},
            },
        }
    )
    diags = af.validate_spec(spec, table)
    assert any("not unique within keyframe" in d.message for d in diags)


def test_nominal_time_field_rejected():
    table = DataTable.from_records([{"name": "a", "v": 1}, {"name": "b", "v": 2}])
    spec = af.spec_from_dict(
        {
            "data": {"values": []},
            "mark": "circle",
            "encoding": {"x": {"field": "v"}, "time": {"field": "name"}},
        }
    )
    diags = af.validate_spec(spec, table)
    assert any("sort order" in d.message for d in diags)


def test_undeclared_selection_reference():
    table = DataTable.from_records([{"v": 1}])
    spec = af.spec_from_dict(
        {
            "data": {"values": []},
            "mark": "circle",
            "encoding": {
                "x": {"field": "v"},
                "opacity": {"condition": {"param": "ghost", "value": 1.0}, "value": 0.2},
            },
        }
    )
    diags = af.validate_spec(spec, table)
    assert any('undeclared selection "ghost"' in d.message for d in diags)


def test_validate_is_pure():
    spec = load_corpus_spec("trailing")
    table = corpus_table("trailing")
    a = af.validate_spec(spec, table)
    b = af.validate_spec(spec, table)
    assert a == b


def test_csv_requires_header():
    with pytest.raises(ValueError, match="header"):
        DataTable.from_csv_text("")


def test_csv_rfc4180_quoting():
    table = DataTable.from_csv_text('name,v\n"a, comma",1\n"with ""quotes""",2\n')
    assert table.rows[0]["name"] == "a, comma"
    assert table.rows[1]["name"] == 'with "quotes"'
    assert table.field_type("v") == "quantitative"


def test_duplicate_column_names_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        DataTable([("a", "quantitative"), ("a", "nominal")], [])


def test_build_corpus_has_no_errors():
    for name in CORPUS_SPECS:
        state, graph = build_corpus(name)
        assert state is not None


def test_serialize_spec_is_json():
    spec = load_corpus_spec("stores")
    doc = json.loads(af.serialize_spec(spec))
    assert doc["encoding"]["time"]["scale"]["continuous"] is True
