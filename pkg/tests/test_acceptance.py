"""Acceptance gate: one test per criterion, tolerances pinned inline.

The conftest terminal hook prints one [PASS]/[FAIL] line per criterion at
the end of the run.
"""

import json
import random
import socket
import threading
import time

import httpx
import jsonschema
import numpy as np
import pytest
import uvicorn

from designmine import schemas
from designmine.analytics import SessionEvent, exploration_report
from designmine.clustering import kmeans
from designmine.config import PipelineConfig
from designmine.embedding import HashEmbedder, embed_terms
from designmine.errors import (
    NoLinkError,
    RevisionConflictError,
    StaleLinkError,
)
from designmine.index import KnowledgeIndex, PostKnowledgeStats, ScoringConfig, score
from designmine.ingest import build_corpus, parse_dump
from designmine.mindmap import (
    AutoTitlePolicy,
    add_comment_node,
    add_node,
    export_map,
    import_map,
    new_map,
    resolve_jump,
)
from designmine.service import create_app, load_engine
from designmine.structuring import classify_sentence, segment
from designmine.taxonomy import UI_KIND, VE_KIND, cooccurrence

from conftest import (
    build_fixture_corpus,
    comment_record,
    dump_lines,
    make_taxonomy,
    post_record,
    simple_comment,
    simple_post,
    structure_all,
)
from test_clustering import agreement_up_to_permutation, make_blobs
from test_mindmap import run_random_ops
from test_taxonomy import brute_force_cooccurrence


# -- criterion 1: scoring formula ------------------------------------------------


def test_scoring_formula_exact_and_scale_invariant():
    started = time.perf_counter()
    rng = random.Random(20240501)
    cfg = ScoringConfig(0.4, 0.6)
    vectors = [(rng.randint(0, 1000), rng.randint(0, 1000)) for _ in range(1000)]
    scores = []
    for num_ui, num_ve in vectors:
        stats = PostKnowledgeStats("p", {0: num_ui}, {0: num_ve}, {})
        got = score(stats, 0, 0, cfg)
        assert abs(got - (0.4 * num_ui + 0.6 * num_ve)) <= 1e-12
        scores.append(got)

    def scaled_scores(lam):
        cfg_l = ScoringConfig(0.4 * lam, 0.6 * lam)
        return [
            score(PostKnowledgeStats("p", {0: u}, {0: v}, {}), 0, 0, cfg_l)
            for u, v in vectors
        ]

    base_order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    # Power-of-two scalings are lossless in binary floats: exact invariance.
    for lam in (0.25, 0.5, 2.0, 1024.0, 2.0**-20):
        scaled = scaled_scores(lam)
        order = sorted(range(len(scaled)), key=lambda i: (-scaled[i], i))
        assert order == base_order
    # Arbitrary scalings round differently, so posts whose *real* scores are
    # exactly equal (0.4*3 == 0.6*2) may collapse or split by one ulp and
    # shuffle within their tie group. Outside exact ties (real scores are
    # multiples of 0.2 apart here) the order must be identical: comparing
    # the exact rational key 2u+3v position by position checks both.
    exact = [2 * u + 3 * v for u, v in vectors]
    for lam in (0.001, 3.0, 7.7, 1e6):
        scaled = scaled_scores(lam)
        order = sorted(range(len(scaled)), key=lambda i: (-scaled[i], i))
        assert [exact[i] for i in order] == [exact[i] for i in base_order]
    assert time.perf_counter() - started < 1.0


# -- criterion 2: cooccurrence oracle ----------------------------------------------


def acceptance_corpus(provider):
    """20 posts, 100 comments, all mentions gazetteer-covered.

    Comment 0 is the worked example (gradient + photo + home button).
    """
    ui_terms = ["button", "home button", "settings button", "sidebar", "photo",
                "image", "icon", "paragraph", "menu", "card"]
    ve_terms = ["grey", "white", "gradient", "color", "padding",
                "font", "alignment", "square", "contrast", "layout"]
    templates = [
        "Try a {ve} treatment on the {ui}.",
        "The {ui} fights the {ve} here.",
        "Because the {ve} dominates, the {ui} vanishes.",
        "{ui} plus {ve} reads fine to me.",
        "Swap the {ve}; keep the {ui}.",
    ]
    pairs = []
    bodies = ["Love the gradient over the photo, and that home button placement."]
    for n in range(1, 100):
        if n % 7 == 3:
            bodies.append("Nothing structural to add.")
        elif n % 7 == 5:
            bodies.append(f"The {ui_terms[n % 10]} by itself is strong.")
        else:
            template = templates[n % len(templates)]
            bodies.append(
                template.format(ui=ui_terms[(n * 3) % 10], ve=ve_terms[(n * 7) % 10])
            )
    for p in range(20):
        post = simple_post(f"p{p:02d}", created=1000 + p)
        comments = [
            simple_comment(f"c{n:03d}", post.id, bodies[n], created=5000 + n)
            for n in range(p * 5, p * 5 + 5)
        ]
        pairs.append((post, comments))
    return build_fixture_corpus(pairs)


def test_cooccurrence_matches_brute_force_recount(provider):
    started = time.perf_counter()
    taxonomy = make_taxonomy()
    corpus = acceptance_corpus(provider)
    assert len(corpus.posts) == 20
    assert len(corpus.comments) == 100
    structured = structure_all(corpus, provider)
    for sc in structured.values():
        for m in sc.mentions:
            assert taxonomy.cluster_id(m.kind, m.canonical) is not None

    matrix = cooccurrence(corpus, structured, taxonomy)
    assert matrix.counts == brute_force_cooccurrence(corpus, structured, taxonomy)

    # Worked example: gradient + photo + home button adds one comment to
    # (Image, Contrast) and one to (Button, Contrast).
    worked = build_fixture_corpus(
        [(simple_post("w1"), [simple_comment("wc", "w1",
            "Love the gradient over the photo, and that home button placement.")])]
    )
    worked_matrix = cooccurrence(worked, structure_all(worked, provider), taxonomy)
    named = worked_matrix.named(taxonomy)
    assert named[("Image", "Contrast")] == 1
    assert named[("Button", "Contrast")] == 1
    assert sum(named.values()) == 2
    assert time.perf_counter() - started < 5.0


# -- criterion 3: k-means --------------------------------------------------------


def test_kmeans_determinism_recovery_monotonicity():
    started = time.perf_counter()
    spread = 1.0
    points, labels = make_blobs(
        n_blobs=3, per_blob=100, dim=384, spread=spread, separation=10.0, seed=31
    )
    assert points.shape == (300, 384)
    centers = np.array([points[labels == i].mean(axis=0) for i in range(3)])
    pairwise = [
        float(np.linalg.norm(centers[i] - centers[j]))
        for i in range(3) for j in range(i + 1, 3)
    ]
    assert min(pairwise) >= 10.0 * spread  # separation >= 10x intra-blob std

    first = kmeans(points, 3, seed=77)
    second = kmeans(points, 3, seed=77)
    assert np.array_equal(first.assignments, second.assignments)
    assert np.array_equal(first.centroids, second.centroids)
    assert first.inertia_history == second.inertia_history

    assert agreement_up_to_permutation(first.assignments, labels, 3) >= 0.99

    history = first.inertia_history
    assert all(b <= a * (1 + 1e-12) + 1e-9 for a, b in zip(history, history[1:]))
    assert time.perf_counter() - started < 10.0


# -- criterion 4: ingest filters ---------------------------------------------------


def test_ingest_filters_exact_retention():
    records = [
        post_record("keep1", author="op1"),
        comment_record("k1", "keep1", author="alice", body="Solid work."),
        post_record("keep2", author="op2"),
        comment_record("k2", "keep2", author="bob", body="Try more padding."),
        comment_record("k3", "keep2", author="carol", body="Too cramped."),
        post_record("badflair", flair="Showcase"),
        comment_record("d1", "badflair", author="dan"),
        post_record("noimage", images=()),
        comment_record("d2", "noimage", author="erin"),
        post_record("botonly", author="op3"),
        comment_record("d3", "botonly", author="AutoModerator", body="beep"),
        post_record("oponly", author="op4"),
        comment_record("d4", "oponly", author="op4", body="bump"),
        comment_record("d5", "keep1", author="op1", body="thanks!"),  # OP on kept post
        comment_record("d6", "keep1", author="AutoModerator", body="bot note"),
        comment_record("d7", "keep1", author="fred", body="[removed]"),
    ]
    corpus, report = build_corpus(parse_dump(dump_lines(records)).records)

    assert set(corpus.posts) == {"keep1", "keep2"}
    assert set(corpus.comments) == {"k1", "k2", "k3"}
    assert corpus.comments_by_post["keep2"] == ["k2", "k3"]

    assert report.post_drops["wrong_flair"] == 1
    assert report.post_drops["no_images"] == 1
    assert report.post_drops["no_retained_comments"] == 2
    assert report.comment_drops["orphan"] == 2
    assert report.comment_drops["bot_author"] == 2
    assert report.comment_drops["op_comment"] == 2
    assert report.comment_drops["empty_body"] == 1

    assert report.comments_in == report.comments_retained + sum(report.comment_drops.values())
    assert report.posts_in == report.posts_retained + sum(report.post_drops.values())


# -- criterion 5: comment sorting & highlighting --------------------------------------


def test_comment_sorting_and_highlighting(provider):
    taxonomy = make_taxonomy()
    comments = [
        simple_comment("c3", "p1", "grey grey grey sidebar", created=300),
        simple_comment("c1", "p1", "Try white on the button.", created=100),
        simple_comment("c0", "p1", "no mentions here", created=400),
        simple_comment("c2", "p1", "white once more", created=100),  # tie with c1
    ]
    corpus = build_fixture_corpus([(simple_post("p1"), comments)])
    structured = structure_all(corpus, provider)
    index = KnowledgeIndex(corpus, structured, taxonomy)

    views = index.sort_comments("p1", ve_cluster="Color", feedback_type="suggestion")
    # counts 3,1,1,0; tie between c1/c2 (same created_at) broken by id asc
    assert [v.comment_id for v in views] == ["c3", "c1", "c2", "c0"]
    assert [v.mention_count for v in views] == [3, 1, 1, 0]

    color_terms = {"grey", "white", "color"}
    for view in views:
        raw = view.body.encode("utf-8")
        for span in view.keyword_spans:
            assert 0 <= span.start < span.end <= len(raw)
            assert raw[span.start : span.end].decode("utf-8").lower() == span.canonical
            assert span.canonical in color_terms
        # feedback flags exactly match an independent provider run
        expected = [
            classify_sentence(raw[s:e].decode("utf-8"))[0] for s, e in segment(view.body)
        ]
        got = [(s.label, s.highlighted) for s in view.sentences]
        assert [label for label, _ in got] == expected
        for label, highlighted in got:
            assert highlighted == (label == "suggestion")


# -- criterion 6: mindmap --------------------------------------------------------------


def test_mindmap_invariants_roundtrip_errors(provider):
    mindmap, applied = run_random_ops(10_000, seed=20240502, check_every=500)
    assert applied > 1000
    doc = export_map(mindmap)
    assert export_map(import_map(json.loads(json.dumps(doc)))) == doc

    # auto-title law on a comment with more mentions than the cap
    corpus = build_fixture_corpus(
        [(simple_post("p1"), [
            simple_comment("c_many", "p1",
                           "grey white gradient color padding font alignment button"),
            simple_comment("c_two", "p1", "grey button"),
        ])]
    )
    structured = structure_all(corpus, provider)
    m = new_map(map_id="acc")
    policy = AutoTitlePolicy(max_keywords=5, rng_seed=11)
    mentions_of = lambda cid: {x.canonical for x in structured[cid].mentions}

    nid = add_comment_node(m, m.root, corpus.comments["c_many"], structured["c_many"], policy)
    title_terms = m.nodes[nid].title.split(", ")
    assert len(title_terms) == min(5, len(mentions_of("c_many"))) == 5
    assert set(title_terms) <= mentions_of("c_many")

    nid2 = add_comment_node(m, m.root, corpus.comments["c_two"], structured["c_two"], policy)
    title_terms2 = m.nodes[nid2].title.split(", ")
    assert len(title_terms2) == min(5, len(mentions_of("c_two"))) == 2
    assert set(title_terms2) == mentions_of("c_two")

    # jump returns the stored ids; stale link and revision conflicts error
    assert resolve_jump(m, nid, corpus) == ("p1", "c_many")
    with pytest.raises(StaleLinkError):
        resolve_jump(m, nid, build_fixture_corpus([]))
    with pytest.raises(NoLinkError):
        manual = add_node(m, m.root, "manual")
        resolve_jump(m, manual)
    with pytest.raises(RevisionConflictError):
        add_node(m, m.root, "late", expected_revision=0)


# -- criterion 7: dwell analytics --------------------------------------------------------


def test_dwell_analytics_hand_traces():
    def ev(ts, subject):
        return SessionEvent(session_id="s", timestamp=ts, kind="view_post", subject_id=subject)

    # trace 1: A viewed for 6s then focus moved to B
    r1 = exploration_report("s", [ev(0, "A"), ev(6000, "B")], threshold_ms=5000)
    assert r1.posts_explored == 1
    assert r1.dwell_by_subject["post:A"].total_ms == 6000
    assert "post:B" not in r1.dwell_by_subject

    # trace 2: A explored once via its 6s second visit; B's interval still open
    events = [ev(0, "A"), ev(3000, "B"), ev(4000, "A"), ev(10000, "B")]
    r2 = exploration_report("s", events, threshold_ms=5000)
    assert r2.posts_explored == 1
    assert r2.dwell_by_subject["post:A"].total_ms == 9000
    assert r2.dwell_by_subject["post:A"].max_continuous_ms == 6000
    assert r2.dwell_by_subject["post:B"].total_ms == 1000
    assert not r2.dwell_by_subject["post:B"].explored(5000)

    # replay determinism
    assert exploration_report("s", events, 5000).to_payload() == r2.to_payload()


# -- criterion 8: end-to-end demo ------------------------------------------------------------


def _start_server(app):
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    thread = threading.Thread(target=server.run, kwargs={"sockets": [sock]}, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    return server, thread, port


def test_end_to_end_demo_serves_valid_payloads(tmp_path):
    from designmine.cli import main

    started = time.perf_counter()
    assert main(["demo", "--workdir", str(tmp_path), "--no-serve"]) == 0

    cfg = PipelineConfig(
        corpus=str(tmp_path / "corpus.json"),
        structured=str(tmp_path / "structured.json"),
        taxonomy=str(tmp_path / "taxonomy.json"),
        index=str(tmp_path / "index.json"),
        maps_dir=str(tmp_path / "maps"),
    )
    engine = load_engine(cfg)

    # every taxonomy cell is exercised by the bundled fixture
    taxonomy_payload = json.loads((tmp_path / "taxonomy.json").read_text())["payload"]
    cells = taxonomy_payload["cooccurrence"]
    assert len(cells) == 8 * 6
    assert all(v >= 1 for v in cells.values())

    server, thread, port = _start_server(create_app(engine))
    try:
        base = f"http://127.0.0.1:{port}"
        with httpx.Client(base_url=base, timeout=10) as client:
            overview = client.get("/overview", params={"ui": "Button", "ve": "Color"})
            assert overview.status_code == 200
            jsonschema.validate(overview.json(), schemas.OVERVIEW)
            assert overview.json()["total"] == 20
            scores = [c["score"] for c in overview.json()["posts"]]
            assert scores == sorted(scores, reverse=True)

            post_id = overview.json()["posts"][0]["post_id"]
            reading = client.get(
                f"/posts/{post_id}/reading",
                params={"ui": "Button", "ve": "Color", "feedback": "suggestion", "seed": 1},
            )
            assert reading.status_code == 200
            payload = reading.json()
            jsonschema.validate(payload, schemas.READING)
            for comment in payload["comments"]:
                raw = comment["body"].encode("utf-8")
                for span in comment["keyword_spans"]:
                    raw[span["start"] : span["end"]].decode("utf-8")
                for s in comment["sentences"]:
                    assert 0 <= s["start"] < s["end"] <= len(raw)

            recs = client.get(
                f"/posts/{post_id}/recommendations",
                params={"ui": "Button", "ve": "Color", "n": 5, "seed": 2},
            )
            assert recs.status_code == 200
            jsonschema.validate(recs.json(), schemas.RECOMMENDATIONS)
            assert recs.json()["recommendations"], "no recommendations returned"

            # soundness against raw mentions: both facet kinds truly present
            button = engine.index.taxonomy.cluster_by_name(UI_KIND, "Button").id
            color = engine.index.taxonomy.cluster_by_name(VE_KIND, "Color").id
            for rec in recs.json()["recommendations"]:
                assert rec["post_id"] != post_id
                has_ui = has_ve = False
                for cid in engine.index.corpus.comments_by_post[rec["post_id"]]:
                    for m in engine.index.structured[cid].mentions:
                        cluster = engine.index.taxonomy.cluster_id(m.kind, m.canonical)
                        if m.kind == UI_KIND and cluster == button:
                            has_ui = True
                        if m.kind == VE_KIND and cluster == color:
                            has_ve = True
                assert has_ui and has_ve

            events = [
                {"kind": "view_post", "timestamp": 0, "subject_id": post_id},
                {"kind": "view_post", "timestamp": 7000, "subject_id": "post01"},
            ]
            posted = client.post("/sessions/acc/events", json={"events": events})
            assert posted.status_code == 200
            report = client.get("/sessions/acc/report")
            jsonschema.validate(report.json(), schemas.REPORT)
            assert report.json()["posts_explored"] == 1

            created = client.post("/maps", json={"map_id": "acc-map"})
            assert created.status_code == 201
            comment_id = payload["comments"][0]["comment_id"]
            node = client.post(
                "/maps/acc-map/comment-nodes",
                json={
                    "parent_id": created.json()["root"],
                    "comment_id": comment_id,
                    "expected_revision": 0,
                },
            )
            assert node.status_code == 201
            exported = client.get("/maps/acc-map/export")
            jsonschema.validate(exported.json(), schemas.MAP_DOCUMENT)
    finally:
        server.should_exit = True
        thread.join(timeout=10)

    assert time.perf_counter() - started < 60.0
