import pytest
from fastapi.testclient import TestClient

from designmine.config import PipelineConfig
from designmine.index import KnowledgeIndex
from designmine.mindmap import MindmapStore
from designmine.service import LearnerEngine, create_app

from conftest import build_fixture_corpus, simple_comment, simple_post, structure_all
from test_index import ten_post_corpus


@pytest.fixture()
def client(tmp_path, provider, taxonomy):
    corpus = ten_post_corpus()
    structured = structure_all(corpus, provider)
    index = KnowledgeIndex(corpus, structured, taxonomy)
    config = PipelineConfig(maps_dir=str(tmp_path / "maps"))
    engine = LearnerEngine(index=index, map_store=MindmapStore(tmp_path / "maps"), config=config)
    return TestClient(create_app(engine))


# -- overview -----------------------------------------------------------------


def test_overview_defaults_newest_first(client):
    body = client.get("/overview").json()
    assert body["total"] == 10
    created = [c["created_at"] for c in body["posts"]]
    assert created == sorted(created, reverse=True)
    assert body["facets"]["ui"][0] == "Button"
    assert all(c["num_ui"] is None and c["score"] is None for c in body["posts"])


def test_overview_with_facets_sorted_by_score(client):
    body = client.get("/overview", params={"ui": "Button", "ve": "Color"}).json()
    scores = [c["score"] for c in body["posts"]]
    assert scores == sorted(scores, reverse=True)
    assert body["posts"][0]["post_id"] == "p4"
    assert body["posts"][0]["num_ui"] == 2
    assert body["posts"][0]["num_ve"] == 3
    assert body["posts"][0]["score"] == pytest.approx(2.6)


def test_overview_unknown_cluster_is_400(client):
    resp = client.get("/overview", params={"ui": "Knob"})
    assert resp.status_code == 400
    assert "Knob" in resp.json()["message"]


def test_overview_limit_zero_reports_total(client):
    body = client.get("/overview", params={"limit": 0}).json()
    assert body["posts"] == []
    assert body["total"] == 10


def test_overview_pagination(client):
    first = client.get("/overview", params={"limit": 3}).json()
    second = client.get("/overview", params={"offset": 3, "limit": 3}).json()
    assert len(first["posts"]) == 3
    assert len(second["posts"]) == 3
    assert {c["post_id"] for c in first["posts"]}.isdisjoint(
        {c["post_id"] for c in second["posts"]}
    )


# -- reading page ----------------------------------------------------------------


def test_reading_color_highlights(client):
    body = client.get("/posts/p4/reading", params={"ve": "Color", "ui": "Button"}).json()
    assert body["post"]["post_id"] == "p4"
    counts = [c["mention_count"] for c in body["comments"]]
    assert counts == sorted(counts, reverse=True)
    top = body["comments"][0]
    assert top["keyword_spans"]
    raw = top["body"].encode("utf-8")
    for span in top["keyword_spans"]:
        assert raw[span["start"] : span["end"]].decode("utf-8").lower() == span["canonical"]


def test_reading_default_feedback_no_highlight(client):
    body = client.get("/posts/p0/reading", params={"feedback": "default"}).json()
    for comment in body["comments"]:
        assert all(not s["highlighted"] for s in comment["sentences"])


def test_reading_feedback_flags_only_that_label(client):
    body = client.get("/posts/p0/reading", params={"feedback": "critique"}).json()
    for comment in body["comments"]:
        for s in comment["sentences"]:
            assert s["highlighted"] == (s["label"] == "critique")


def test_reading_unknown_post_404(client):
    assert client.get("/posts/ghost/reading").status_code == 404


def test_reading_bad_feedback_400(client):
    assert client.get("/posts/p0/reading", params={"feedback": "praise"}).status_code == 400


def test_reading_spans_validate_against_bodies(client):
    body = client.get("/posts/p2/reading", params={"ve": "Space"}).json()
    for comment in body["comments"]:
        raw = comment["body"].encode("utf-8")
        for s in comment["sentences"]:
            assert 0 <= s["start"] < s["end"] <= len(raw)
            raw[s["start"] : s["end"]].decode("utf-8")
        for span in comment["keyword_spans"]:
            raw[span["start"] : span["end"]].decode("utf-8")


def test_reading_recommendations_sound(client):
    body = client.get(
        "/posts/p0/reading", params={"ui": "Button", "ve": "Color", "n": 5, "seed": 3}
    ).json()
    recs = body["recommendations"]
    assert recs
    for rec in recs:
        assert rec["post_id"] != "p0"
        assert rec["num_ui"] >= 1
        assert rec["num_ve"] >= 1


def test_recommendations_endpoint_deterministic(client):
    a = client.get("/posts/p0/recommendations", params={"ui": "Button", "ve": "Color", "seed": 7}).json()
    b = client.get("/posts/p0/recommendations", params={"ui": "Button", "ve": "Color", "seed": 7}).json()
    assert a == b


# -- navigation history via session events ------------------------------------------


def test_previous_post_from_session_events(client):
    events = [
        {"kind": "view_post", "timestamp": 1000, "subject_id": "p1"},
        {"kind": "view_post", "timestamp": 2000, "subject_id": "p2"},
    ]
    resp = client.post("/sessions/s1/events", json={"events": events})
    assert resp.status_code == 200
    body = client.get("/posts/p2/reading", params={"session": "s1"}).json()
    assert body["navigation"]["previous_post_id"] == "p1"
    body = client.get("/posts/p9/reading", params={"session": "s1"}).json()
    assert body["navigation"]["previous_post_id"] == "p2"


def test_no_session_no_history(client):
    body = client.get("/posts/p0/reading").json()
    assert body["navigation"]["previous_post_id"] is None


# -- session events & report -----------------------------------------------------


def test_events_rejected_out_of_order(client):
    ok = client.post(
        "/sessions/s2/events",
        json={"events": [{"kind": "view_post", "timestamp": 5000, "subject_id": "p1"}]},
    )
    assert ok.status_code == 200
    bad = client.post(
        "/sessions/s2/events",
        json={"events": [{"kind": "view_post", "timestamp": 1000, "subject_id": "p2"}]},
    )
    assert bad.status_code == 422
    # rejected batch left nothing behind
    report = client.get("/sessions/s2/report").json()
    assert report["subjects"] == []


def test_events_unknown_subject_rejected(client):
    resp = client.post(
        "/sessions/s3/events",
        json={"events": [{"kind": "view_post", "timestamp": 1, "subject_id": "ghost"}]},
    )
    assert resp.status_code == 422


def test_report_hand_traced_case(client):
    events = [
        {"kind": "view_post", "timestamp": 0, "subject_id": "p1"},
        {"kind": "view_post", "timestamp": 3000, "subject_id": "p2"},
        {"kind": "view_post", "timestamp": 4000, "subject_id": "p1"},
        {"kind": "view_post", "timestamp": 10000, "subject_id": "p2"},
    ]
    client.post("/sessions/s4/events", json={"events": events})
    report = client.get("/sessions/s4/report", params={"threshold_ms": 5000}).json()
    assert report["posts_explored"] == 1
    subjects = {s["subject_id"]: s for s in report["subjects"]}
    assert subjects["p1"]["total_ms"] == 9000
    assert subjects["p1"]["explored"] is True
    assert subjects["p2"]["explored"] is False


def test_report_empty_session(client):
    report = client.get("/sessions/brand-new/report").json()
    assert report["posts_explored"] == 0
    assert report["comments_explored"] == 0


# -- mindmap endpoints ----------------------------------------------------------------


def make_map(client, map_id="m1"):
    resp = client.post("/maps", json={"map_id": map_id, "root_title": "Notes"})
    assert resp.status_code == 201
    return resp.json()


def test_map_create_and_get(client):
    doc = make_map(client)
    assert doc["revision"] == 0
    got = client.get("/maps/m1").json()
    assert got["root"] == doc["root"]


def test_map_node_flow(client):
    doc = make_map(client)
    root = doc["root"]
    created = client.post(
        "/maps/m1/nodes",
        json={"parent_id": root, "title": "Color ideas", "expected_revision": 0},
    )
    assert created.status_code == 201
    assert created.json()["revision"] == 1

    stale = client.post(
        "/maps/m1/nodes",
        json={"parent_id": root, "title": "Late", "expected_revision": 0},
    )
    assert stale.status_code == 409
    assert stale.json()["current_revision"] == 1


def test_comment_node_returns_title(client):
    doc = make_map(client)
    resp = client.post(
        "/maps/m1/comment-nodes",
        json={
            "parent_id": doc["root"],
            "comment_id": "p4c0",  # body: "grey grey button"
            "expected_revision": 0,
            "seed": 5,
        },
    )
    assert resp.status_code == 201
    body = resp.json()
    assert set(body["title"].split(", ")) == {"grey", "button"}
    got = client.get("/maps/m1").json()
    node = next(n for n in got["nodes"] if n["node_id"] == body["node_id"])
    assert node["link"] == {"post_id": "p4", "comment_id": "p4c0"}
    assert node["note"] == "grey grey button"


def test_comment_node_unknown_comment_404(client):
    doc = make_map(client)
    resp = client.post(
        "/maps/m1/comment-nodes",
        json={"parent_id": doc["root"], "comment_id": "ghost", "expected_revision": 0},
    )
    assert resp.status_code == 404


def test_jump_endpoint(client):
    doc = make_map(client)
    created = client.post(
        "/maps/m1/comment-nodes",
        json={"parent_id": doc["root"], "comment_id": "p0c0", "expected_revision": 0},
    ).json()
    resp = client.post("/maps/m1/jump", json={"node_id": created["node_id"]})
    assert resp.json() == {"post_id": "p0", "comment_id": "p0c0"}


def test_jump_no_link_400(client):
    doc = make_map(client)
    created = client.post(
        "/maps/m1/nodes", json={"parent_id": doc["root"], "title": "manual"}
    ).json()
    resp = client.post("/maps/m1/jump", json={"node_id": created["node_id"]})
    assert resp.status_code == 400
    assert resp.json()["error"] == "no_link"


def test_edit_delete_move_endpoints(client):
    doc = make_map(client)
    root = doc["root"]
    a = client.post("/maps/m1/nodes", json={"parent_id": root, "title": "a"}).json()
    b = client.post("/maps/m1/nodes", json={"parent_id": root, "title": "b"}).json()

    edited = client.put(
        f"/maps/m1/nodes/{a['node_id']}", json={"note": "hello", "expected_revision": 2}
    )
    assert edited.status_code == 200

    moved = client.post(
        "/maps/m1/move",
        json={"node_id": b["node_id"], "new_parent_id": a["node_id"], "expected_revision": 3},
    )
    assert moved.status_code == 200

    cycle = client.post(
        "/maps/m1/move",
        json={"node_id": a["node_id"], "new_parent_id": b["node_id"]},
    )
    assert cycle.status_code == 409

    deleted = client.delete(
        f"/maps/m1/nodes/{a['node_id']}", params={"expected_revision": 4}
    )
    assert deleted.status_code == 200
    assert deleted.json()["removed"] == 2

    got = client.get("/maps/m1").json()
    assert len(got["nodes"]) == 1


def test_export_import_round_trip(client):
    doc = make_map(client)
    client.post("/maps/m1/nodes", json={"parent_id": doc["root"], "title": "keep"})
    exported = client.get("/maps/m1/export")
    assert exported.status_code == 200
    document = exported.json()

    conflict = client.post("/maps/import", json={"document": document})
    assert conflict.status_code == 409

    document["map_id"] = "m2"
    imported = client.post("/maps/import", json={"document": document})
    assert imported.status_code == 201
    reexported = client.get("/maps/m2/export").json()
    document_nodes = {n["node_id"]: n for n in document["nodes"]}
    for node in reexported["nodes"]:
        assert node == document_nodes[node["node_id"]]


def test_export_bytes_match_cli_export(client, tmp_path):
    from designmine.mindmap import MindmapStore, export_json

    doc = make_map(client)
    client.post("/maps/m1/nodes", json={"parent_id": doc["root"], "title": "x"})
    via_http = client.get("/maps/m1/export").content
    # the engine is backed by the same store directory the CLI would use
    store_dir = None
    for candidate in tmp_path.rglob("m1.json"):
        store_dir = candidate.parent
    assert store_dir is not None
    via_cli = export_json(MindmapStore(store_dir).load("m1")).encode("utf-8")
    assert via_http == via_cli


def test_map_not_found(client):
    assert client.get("/maps/nope").status_code == 404
    assert client.get("/maps/nope/export").status_code == 404
