import json

import pytest

from designmine.ingest import Comment, Corpus, Post
from designmine.structuring import Gazetteer, LexiconProvider, structure_comment
from designmine.taxonomy import Cluster, Taxonomy, UI_KIND, VE_KIND

# One pass/fail line per acceptance criterion at the end of the run.
_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_results.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        tag = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{tag}] {name}")


GAZETTEER_LINES = """
[ui_component]
button
home button
settings button
sidebar
photo
image
icon
paragraph
menu
card

[visual_element]
grey
white
gradient
color
padding
font
alignment
square
contrast
layout
""".strip().splitlines()


@pytest.fixture()
def gazetteer():
    return Gazetteer.from_lines(GAZETTEER_LINES)


@pytest.fixture()
def provider(gazetteer):
    return LexiconProvider(gazetteer)


def make_taxonomy():
    """Hand-assigned taxonomy over the fixture gazetteer terms.

    Mirrors the published cluster names: gradient sits under Contrast,
    photo under Image, home button under Button, sidebar under Bar&Page.
    """
    ui = [
        Cluster(0, "Button", ["button", "home button", "settings button"]),
        Cluster(1, "Icon", ["icon"]),
        Cluster(2, "Image", ["image", "photo"]),
        Cluster(3, "Text", ["paragraph"]),
        Cluster(4, "Bar&Page", ["menu", "sidebar"]),
        Cluster(5, "Interactive Card Element", ["card"]),
    ]
    ve = [
        Cluster(0, "Color", ["color", "grey", "white"]),
        Cluster(1, "Contrast", ["contrast", "gradient"]),
        Cluster(2, "Space", ["padding"]),
        Cluster(3, "Typography", ["font"]),
        Cluster(4, "Layout", ["alignment", "layout"]),
        Cluster(5, "Shape&Size", ["square"]),
    ]
    mapping = {}
    for c in ui:
        for t in c.member_terms:
            mapping[(UI_KIND, t)] = c.id
    for c in ve:
        for t in c.member_terms:
            mapping[(VE_KIND, t)] = c.id
    return Taxonomy(ui_clusters=ui, ve_clusters=ve, term_to_cluster=mapping)


@pytest.fixture()
def taxonomy():
    return make_taxonomy()


def post_record(pid, *, flair="Feedback Request", author="op", created=1000, title="A design",
                images=("https://i.redd.it/x.png",), body=""):
    return {
        "kind": "post",
        "id": pid,
        "author": author,
        "created_utc": created,
        "title": title,
        "selftext": body,
        "link_flair_text": flair,
        "image_refs": list(images),
    }


def comment_record(cid, pid, *, author="alice", created=2000, body="Nice work."):
    return {
        "kind": "comment",
        "id": cid,
        "parent_id": f"t3_{pid}",
        "author": author,
        "created_utc": created,
        "body": body,
    }


def dump_lines(records):
    return [json.dumps(r) for r in records]


def build_fixture_corpus(posts_and_comments):
    """Corpus straight from (Post, [Comment]) pairs, bypassing filters."""
    corpus = Corpus()
    for post, comments in posts_and_comments:
        corpus.posts[post.id] = post
        ordered = sorted(comments, key=lambda c: (c.created_at, c.id))
        corpus.comments_by_post[post.id] = [c.id for c in ordered]
        for c in ordered:
            corpus.comments[c.id] = c
    return corpus


def simple_post(pid, created=1000, author=None):
    return Post(
        id=pid,
        title=f"Design {pid}",
        body="",
        flair="Feedback Request",
        created_at=created,
        image_refs=(f"https://i.redd.it/{pid}.png",),
        author=author or f"op-{pid}",
    )


def simple_comment(cid, pid, body, created=2000, author=None):
    return Comment(id=cid, post_id=pid, author=author or f"user-{cid}", body=body, created_at=created)


def structure_all(corpus, provider):
    return {cid: structure_comment(c, provider) for cid, c in corpus.comments.items()}
