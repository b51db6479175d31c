"""Take notes on fixture comments and replay a learning session.

Builds a small mindmap with auto-added comment nodes, exports it, and
then folds a synthetic event log into the dwell-based exploration report.
"""

import json
import tempfile
from pathlib import Path

from designmine.analytics import SessionEvent, exploration_report
from designmine.cli import run_ingest, run_structure
from designmine.config import PipelineConfig
from designmine.demo_fixtures import write_demo_assets
from designmine.ingest import Corpus
from designmine.artifacts import CORPUS_SCHEMA, STRUCTURED_SCHEMA, read_artifact
from designmine.mindmap import (
    AutoTitlePolicy,
    add_comment_node,
    add_node,
    export_json,
    new_map,
    resolve_jump,
)
from designmine.structuring import StructuredComment

work = Path(tempfile.mkdtemp(prefix="designmine-demo-"))
assets = write_demo_assets(work)
cfg = PipelineConfig(
    dump=str(assets["dump"]),
    gazetteer=str(assets["gazetteer"]),
    corpus=str(work / "corpus.json"),
    structured=str(work / "structured.json"),
)
run_ingest(cfg)
run_structure(cfg)
corpus = Corpus.from_payload(read_artifact(cfg.corpus, CORPUS_SCHEMA)["corpus"])
structured = {
    cid: StructuredComment.from_payload(d)
    for cid, d in read_artifact(cfg.structured, STRUCTURED_SCHEMA)["comments"].items()
}

print("== build a mindmap ==")
m = new_map(map_id="walkthrough", root_title="Visual design notes")
topic = add_node(m, m.root, "Buttons")
policy = AutoTitlePolicy(max_keywords=5, rng_seed=1)
added = 0
for cid, sc in sorted(structured.items()):
    if added == 3:
        break
    if any(x.kind == "ui_component" and "button" in x.canonical for x in sc.mentions):
        nid = add_comment_node(m, topic, corpus.comments[cid], sc, policy)
        node = m.nodes[nid]
        print(f"  + node {nid} titled {node.title!r} -> jump {resolve_jump(m, nid, corpus)}")
        added += 1

print(f"  map has {len(m.nodes)} nodes at revision {m.revision}")
print("  export document:")
print("  " + "\n  ".join(export_json(m).splitlines()[:8]) + "\n  ...")

print("\n== replay a session ==")
post_ids = sorted(corpus.posts)[:3]
timeline = [
    (0, "view_post", post_ids[0]),
    (2_000, "filter_change", "Color"),
    (8_000, "view_post", post_ids[1]),       # closes a 8s dwell on the first post
    (11_000, "view_post", post_ids[2]),      # 3s on the second: below threshold
    (20_000, "view_post", post_ids[0]),      # 9s on the third
]
events = [
    SessionEvent(session_id="walkthrough", timestamp=ts, kind=kind, subject_id=sid)
    for ts, kind, sid in timeline
]
report = exploration_report("walkthrough", events, threshold_ms=5000)
print(json.dumps(report.to_payload(), indent=2))
