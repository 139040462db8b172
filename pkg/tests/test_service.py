import json
import time

import pytest
from fastapi.testclient import TestClient

from animflow.service import create_app

from conftest import corpus_path, load_corpus_doc


@pytest.fixture
def client():
    return TestClient(create_app())


def gapminder_body(**extra):
    doc = load_corpus_doc("gapminder")
    with open(corpus_path("gapminder.csv"), encoding="utf-8") as f:
        csv_text = f.read()
    body = {"spec": doc, "data": {"csv": csv_text}}
    body.update(extra)
    return body


def slider_body(**extra):
    body = gapminder_body(**extra)
    body["spec"]["params"] = [
        {"name": "current_frame", "on": {"type": "timer"}, "bind": {"input": "range"}}
    ]
    return body


def test_create_session(client):
    r = client.post("/sessions", json=gapminder_body())
    assert r.status_code == 200
    out = r.json()
    assert out["cycle_ms"] == 5500.0
    assert isinstance(out["session_id"], str)


def test_create_session_reports_widgets(client):
    r = client.post("/sessions", json=slider_body())
    widgets = r.json()["widgets"]
    kinds = {w["kind"] for w in widgets}
    assert kinds == {"range-slider", "checkbox"}
    slider = next(w for w in widgets if w["kind"] == "range-slider")
    assert (slider["min"], slider["max"], slider["step"]) == (1955, 2005, 5)


def test_missing_spec_is_400(client):
    assert client.post("/sessions", json={}).status_code == 400


def test_invalid_spec_is_400(client):
    r = client.post("/sessions", json={"spec": {}})
    assert r.status_code == 400


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope/frame").status_code == 404
    assert client.post("/sessions/nope/advance", json={"dt_ms": 1}).status_code == 404
    assert client.delete("/sessions/nope").status_code == 404


def test_advance_returns_frame(client):
    sid = client.post("/sessions", json=gapminder_body()).json()["session_id"]
    r = client.post(f"/sessions/{sid}/advance", json={"dt_ms": 500})
    assert r.status_code == 200
    frame = r.json()["frame"]
    assert {"width", "height", "items", "axes", "widgets"} <= set(frame)
    assert len(frame["items"]) == 3


def test_advance_rejects_negative(client):
    sid = client.post("/sessions", json=gapminder_body()).json()["session_id"]
    r = client.post(f"/sessions/{sid}/advance", json={"dt_ms": -5})
    assert r.status_code == 400


def test_event_roundtrip_and_seq_echo(client):
    sid = client.post("/sessions", json=slider_body()).json()["session_id"]
    r = client.post(
        f"/sessions/{sid}/events",
        json={"seq": 7,
              "event": {"type": "widget_set", "widget": "current_frame_slider",
                        "value": 1975}},
    )
    assert r.status_code == 200
    out = r.json()
    assert out["seq"] == 7
    slider = next(w for w in out["frame"]["widgets"] if w["kind"] == "range-slider")
    assert slider["value"] == 1975
    checkbox = next(w for w in out["frame"]["widgets"] if w["kind"] == "checkbox")
    assert checkbox["value"] is False


def test_scrub_equals_advance(client):
    a = client.post("/sessions", json=slider_body()).json()["session_id"]
    b = client.post("/sessions", json=slider_body()).json()["session_id"]
    fa = client.post(
        f"/sessions/{a}/events",
        json={"event": {"type": "widget_set", "widget": "current_frame_slider",
                        "value": 1975}},
    ).json()["frame"]
    fb = client.post(f"/sessions/{b}/advance", json={"dt_ms": 2000}).json()["frame"]
    # widget state differs (scrubbing pauses); the rendered marks do not
    assert json.dumps(fa["items"], sort_keys=True) == json.dumps(fb["items"], sort_keys=True)
    assert fa["axes"] == fb["axes"]


def test_bad_event_is_400(client):
    sid = client.post("/sessions", json=gapminder_body()).json()["session_id"]
    r = client.post(f"/sessions/{sid}/events", json={"event": {"type": "bogus"}})
    assert r.status_code == 400
    assert client.post(f"/sessions/{sid}/events", json={}).status_code == 400


def test_get_frame_is_idempotent(client):
    sid = client.post("/sessions", json=gapminder_body()).json()["session_id"]
    client.post(f"/sessions/{sid}/advance", json={"dt_ms": 750})
    a = client.get(f"/sessions/{sid}/frame").json()
    b = client.get(f"/sessions/{sid}/frame").json()
    assert a == b


def test_delete_session(client):
    sid = client.post("/sessions", json=gapminder_body()).json()["session_id"]
    assert client.delete(f"/sessions/{sid}").json() == {"deleted": True}
    assert client.get(f"/sessions/{sid}/frame").status_code == 404


def test_sessions_are_independent(client):
    a = client.post("/sessions", json=gapminder_body()).json()["session_id"]
    b = client.post("/sessions", json=gapminder_body()).json()["session_id"]
    client.post(f"/sessions/{a}/advance", json={"dt_ms": 2000})
    fb = client.get(f"/sessions/{b}/frame").json()["frame"]
    fresh = client.post("/sessions", json=gapminder_body()).json()["session_id"]
    assert fb == client.get(f"/sessions/{fresh}/frame").json()["frame"]


def test_logical_sessions_never_self_advance(client):
    sid = client.post("/sessions", json=gapminder_body()).json()["session_id"]
    before = client.get(f"/sessions/{sid}/frame").json()
    time.sleep(0.1)
    assert client.get(f"/sessions/{sid}/frame").json() == before


def test_realtime_session_ticks(client):
    sid = client.post("/sessions", json=gapminder_body(realtime=True)).json()[
        "session_id"
    ]
    before = client.get(f"/sessions/{sid}/frame").json()
    deadline = time.time() + 2.0
    while time.time() < deadline:
        time.sleep(0.05)
        if client.get(f"/sessions/{sid}/frame").json() != before:
            break
    else:
        pytest.fail("realtime session did not advance")
    client.delete(f"/sessions/{sid}")
