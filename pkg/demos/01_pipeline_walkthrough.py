"""Walk the batch pipeline on the bundled fixture corpus.

Runs ingest -> structure -> taxonomy -> index in a temp directory and
prints what each stage produced. Same stages the CLI runs; here they are
called as library functions so the intermediate objects can be poked at.
"""

import json
import tempfile
from pathlib import Path

from designmine.cli import run_build_index, run_build_taxonomy, run_ingest, run_structure
from designmine.config import PipelineConfig
from designmine.demo_fixtures import write_demo_assets
from designmine.index import FacetQuery
from designmine.service import load_engine

work = Path(tempfile.mkdtemp(prefix="designmine-demo-"))
assets = write_demo_assets(work)
cfg = PipelineConfig(
    dump=str(assets["dump"]),
    gazetteer=str(assets["gazetteer"]),
    naming=str(assets["naming"]),
    corpus=str(work / "corpus.json"),
    structured=str(work / "structured.json"),
    taxonomy=str(work / "taxonomy.json"),
    index=str(work / "index.json"),
    maps_dir=str(work / "maps"),
)

print("== ingest ==")
print(json.dumps(run_ingest(cfg), indent=2))

print("\n== structure ==")
print(json.dumps(run_structure(cfg), indent=2))

print("\n== taxonomy ==")
print(json.dumps(run_build_taxonomy(cfg), indent=2))

print("\n== index ==")
print(json.dumps(run_build_index(cfg), indent=2))

engine = load_engine(cfg)
index = engine.index

print("\n== top posts for Button x Color ==")
order = index.sort_posts(FacetQuery(ui_cluster="Button", ve_cluster="Color"))
button = index.resolve_cluster("ui_component", "Button")
color = index.resolve_cluster("visual_element", "Color")
for pid in order[:5]:
    stats = index.stats[pid]
    post = index.corpus.posts[pid]
    print(
        f"  {pid}  ui={stats.num_ui(button)}  ve={stats.num_ve(color)}  "
        f"score={0.4 * stats.num_ui(button) + 0.6 * stats.num_ve(color):.1f}  {post.title}"
    )

print("\n== comments of the top post, sorted by Color mentions ==")
for view in index.sort_comments(order[0], ve_cluster="Color")[:4]:
    print(f"  [{view.mention_count} color mention(s)] {view.body[:70]}")

print("\n== seeded recommendations ==")
print(" ", index.recommend(order[0], ui_cluster="Button", ve_cluster="Color", n=3, seed=7))

print(f"\nartifacts left in {work}")
