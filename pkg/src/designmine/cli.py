"""Operator CLI: staged batch pipeline plus the HTTP service.

Each stage writes a versioned artifact embedding the producing config
hash; `serve` refuses artifacts whose schema it does not understand.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .artifacts import (
    CORPUS_SCHEMA,
    INDEX_SCHEMA,
    STRUCTURED_SCHEMA,
    TAXONOMY_SCHEMA,
    read_artifact,
    write_artifact,
)
from .config import PipelineConfig, load_config
from .embedding import HashEmbedder
from .errors import DesignMineError
from .index import FacetQuery, KnowledgeIndex, ScoringConfig
from .ingest import Corpus, IngestConfig, build_corpus, iter_dump_file, parse_dump
from .mindmap import MindmapStore, export_json, import_map
from .structuring import Gazetteer, LexiconProvider, StructuredComment, structure_corpus
from .taxonomy import (
    ClusteringConfig,
    NamingMap,
    Taxonomy,
    build_taxonomy,
    collect_terms,
    cooccurrence,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its keys")


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    cfg = load_config(getattr(args, "config", None))
    for key in vars(cfg):
        flag = getattr(args, key, None)
        if flag is not None:
            setattr(cfg, key, flag)
    cfg.validate()
    return cfg


def _fmt_table(rows: list[dict], fmt: str) -> str:
    if not rows:
        return "(empty)\n"
    headers = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=headers)
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    widths = {h: max(len(h), *(len(str(r[h])) for r in rows)) for h in headers}
    lines = ["  ".join(h.ljust(widths[h]) for h in headers)]
    lines.append("  ".join("-" * widths[h] for h in headers))
    for r in rows:
        lines.append("  ".join(str(r[h]).ljust(widths[h]) for h in headers))
    return "\n".join(lines) + "\n"


# -- stage runners -------------------------------------------------------------


def run_ingest(cfg: PipelineConfig) -> dict:
    ingest_cfg = IngestConfig(flair=cfg.flair, bots=tuple(cfg.bots))
    parsed = parse_dump(iter_dump_file(cfg.dump), ingest_cfg)
    corpus, report = build_corpus(parsed.records, ingest_cfg)
    payload = {
        "corpus": corpus.to_payload(),
        "report": report.to_payload() | {"malformed_lines": parsed.malformed_count},
    }
    write_artifact(cfg.corpus, CORPUS_SCHEMA, payload, ingest_cfg.to_payload())
    return {
        "posts": len(corpus.posts),
        "comments": len(corpus.comments),
        "malformed_lines": parsed.malformed_count,
        "post_drops": dict(report.post_drops),
        "comment_drops": dict(report.comment_drops),
    }


def _load_corpus(cfg: PipelineConfig) -> Corpus:
    return Corpus.from_payload(read_artifact(cfg.corpus, CORPUS_SCHEMA)["corpus"])


def run_structure(cfg: PipelineConfig) -> dict:
    corpus = _load_corpus(cfg)
    gazetteer = Gazetteer.from_file(cfg.gazetteer)
    provider = LexiconProvider(gazetteer)
    structured = structure_corpus(corpus.comments.values(), provider)
    payload = {
        "provider": provider.name,
        "comments": {cid: sc.to_payload() for cid, sc in sorted(structured.items())},
    }
    config = {"provider": cfg.provider, "gazetteer": _file_fingerprint(cfg.gazetteer)}
    write_artifact(cfg.structured, STRUCTURED_SCHEMA, payload, config)
    n_sentences = sum(len(sc.sentences) for sc in structured.values())
    n_mentions = sum(len(sc.mentions) for sc in structured.values())
    return {"comments": len(structured), "sentences": n_sentences, "mentions": n_mentions}


def _file_fingerprint(path: str) -> str:
    import hashlib

    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _load_structured(cfg: PipelineConfig) -> dict[str, StructuredComment]:
    payload = read_artifact(cfg.structured, STRUCTURED_SCHEMA)
    return {cid: StructuredComment.from_payload(d) for cid, d in payload["comments"].items()}


def run_build_taxonomy(cfg: PipelineConfig, check_gazetteer: bool = False) -> dict:
    structured = _load_structured(cfg)
    if check_gazetteer:
        # sanity link between stages: a stale structured artifact after a
        # gazetteer edit should fail here, not at serve time
        gazetteer = Gazetteer.from_file(cfg.gazetteer)
        known = {t.lower() for t in gazetteer.ui_terms} | {t.lower() for t in gazetteer.ve_terms}
        freq = collect_terms(structured.values())
        orphans = sorted(
            term for counter in freq.values() for term in counter if term not in known
        )
        if orphans:
            raise DesignMineError(
                f"structured artifact has terms missing from the gazetteer: {', '.join(orphans[:8])}"
            )
    naming = NamingMap.from_file(cfg.naming)
    clustering = ClusteringConfig(
        k_ui=cfg.k_ui, k_ve=cfg.k_ve, seed=cfg.seed, max_iter=cfg.max_iter, tol=cfg.tol
    )
    embedder = HashEmbedder()
    taxonomy = build_taxonomy(structured.values(), embedder, clustering, naming)
    corpus = _load_corpus(cfg)
    matrix = cooccurrence(corpus, structured, taxonomy)
    payload = taxonomy.to_payload() | {
        "cooccurrence": {f"{c},{e}": v for (c, e), v in sorted(matrix.counts.items())}
    }
    config = clustering.to_payload() | {"embedder": embedder.name}
    write_artifact(cfg.taxonomy, TAXONOMY_SCHEMA, payload, config)
    return {
        "ui_clusters": [c.name for c in taxonomy.ui_clusters],
        "ve_clusters": [c.name for c in taxonomy.ve_clusters],
        "unnamed": taxonomy.unnamed,
    }


def _load_taxonomy(cfg: PipelineConfig) -> Taxonomy:
    return Taxonomy.from_payload(read_artifact(cfg.taxonomy, TAXONOMY_SCHEMA))


def run_scan_k(cfg: PipelineConfig, kind: str, k_min: int, k_max: int, fmt: str) -> str:
    from .clustering import scan_k
    from .embedding import embed_terms

    structured = _load_structured(cfg)
    freq = collect_terms(structured.values())[kind]
    terms = sorted(freq)
    matrix = embed_terms(terms, HashEmbedder())
    rows = scan_k(matrix, (k_min, k_max), seed=cfg.seed, max_iter=cfg.max_iter, tol=cfg.tol)
    return _fmt_table(
        [
            {"k": r.k, "inertia": f"{r.inertia:.6f}", "silhouette": f"{r.silhouette:.6f}"}
            for r in rows
        ],
        fmt,
    )


def run_build_index(cfg: PipelineConfig) -> dict:
    corpus = _load_corpus(cfg)
    structured = _load_structured(cfg)
    taxonomy = _load_taxonomy(cfg)
    scoring = ScoringConfig(w_ui=cfg.w_ui, w_ve=cfg.w_ve)
    index = KnowledgeIndex(corpus, structured, taxonomy, scoring=scoring)
    write_artifact(cfg.index, INDEX_SCHEMA, index.stats_payload(), scoring.to_payload())
    return {"posts": len(index.stats), "w_ui": cfg.w_ui, "w_ve": cfg.w_ve}


def _load_index(cfg: PipelineConfig) -> KnowledgeIndex:
    corpus = _load_corpus(cfg)
    structured = _load_structured(cfg)
    taxonomy = _load_taxonomy(cfg)
    payload = read_artifact(cfg.index, INDEX_SCHEMA)
    return KnowledgeIndex.from_artifacts(corpus, structured, taxonomy, payload)


def run_stats(cfg: PipelineConfig, post_id: str, fmt: str) -> str:
    index = _load_index(cfg)
    if post_id not in index.stats:
        raise DesignMineError(f"unknown post {post_id!r}")
    stats = index.stats[post_id]
    taxonomy = index.taxonomy
    rows = []
    for cluster in taxonomy.ui_clusters:
        rows.append({"axis": "ui", "cluster": cluster.name, "mentions": stats.num_ui(cluster.id)})
    for cluster in taxonomy.ve_clusters:
        rows.append({"axis": "ve", "cluster": cluster.name, "mentions": stats.num_ve(cluster.id)})
    return _fmt_table(rows, fmt)


def run_top(cfg: PipelineConfig, ui: str | None, ve: str | None, n: int, fmt: str) -> str:
    index = _load_index(cfg)
    order = index.sort_posts(FacetQuery(ui_cluster=ui, ve_cluster=ve))
    ui_id = index.resolve_cluster("ui_component", ui) if ui else None
    ve_id = index.resolve_cluster("visual_element", ve) if ve else None
    rows = []
    from .index import score as score_fn

    for pid in order[:n]:
        stats = index.stats[pid]
        row = {"post_id": pid, "title": index.corpus.posts[pid].title}
        if ui_id is not None:
            row["num_ui"] = stats.num_ui(ui_id)
        if ve_id is not None:
            row["num_ve"] = stats.num_ve(ve_id)
        if ui_id is not None and ve_id is not None:
            row["score"] = f"{score_fn(stats, ui_id, ve_id, index.scoring):.2f}"
        rows.append(row)
    return _fmt_table(rows, fmt)


def run_serve(cfg: PipelineConfig, ui_dir: str | None = None) -> None:
    import uvicorn

    from .service import create_app, load_engine

    engine = load_engine(cfg)
    app = create_app(engine, ui_dir=ui_dir)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")


def run_demo(cfg: PipelineConfig, workdir: str, serve: bool, ui_dir: str | None = None) -> dict:
    from .demo_fixtures import write_demo_assets

    work = Path(workdir)
    assets = write_demo_assets(work)
    cfg.dump = str(assets["dump"])
    cfg.gazetteer = str(assets["gazetteer"])
    cfg.naming = str(assets["naming"])
    cfg.corpus = str(work / "corpus.json")
    cfg.structured = str(work / "structured.json")
    cfg.taxonomy = str(work / "taxonomy.json")
    cfg.index = str(work / "index.json")
    cfg.maps_dir = str(work / "maps")
    summary = {
        "ingest": run_ingest(cfg),
        "structure": run_structure(cfg),
        "taxonomy": run_build_taxonomy(cfg),
        "index": run_build_index(cfg),
        "workdir": str(work),
    }
    if serve:
        print(json.dumps(summary, indent=2))
        run_serve(cfg, ui_dir=ui_dir)
    return summary


# -- mindmap subcommands ----------------------------------------------------------


def run_mindmap(cfg: PipelineConfig, args: argparse.Namespace) -> str:
    store = MindmapStore(cfg.maps_dir)
    if args.map_cmd == "export":
        text = export_json(store.load(args.map_id))
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
            return f"wrote {args.out}\n"
        return text
    if args.map_cmd == "import":
        document = json.loads(Path(args.file).read_text(encoding="utf-8"))
        mindmap = import_map(document)
        if store.exists(mindmap.map_id) and not args.replace:
            raise DesignMineError(
                f"map {mindmap.map_id!r} already exists; use --replace to overwrite"
            )
        store.save(mindmap)
        return f"imported map {mindmap.map_id} ({len(mindmap.nodes)} nodes)\n"
    # lint
    document = json.loads(Path(args.file).read_text(encoding="utf-8"))
    mindmap = import_map(document)
    return f"ok: {mindmap.map_id} with {len(mindmap.nodes)} nodes\n"


# -- argument parsing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="designmine",
        description="Mine design-community comments into a browsable knowledge taxonomy.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("ingest", help="parse and filter a dump into a corpus artifact")
    _add_common(p)
    p.add_argument("--dump", help="newline-delimited dump file")
    p.add_argument("--out", dest="corpus", help="corpus artifact path")
    p.add_argument("--flair", help="inclusion flair")
    p.add_argument("--bots", type=lambda s: [x.strip() for x in s.split(",")], help="bot authors, comma separated")

    p = sub.add_parser("structure", help="sentence labels + keyword mentions per comment")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--gazetteer")
    p.add_argument("--out", dest="structured")
    p.add_argument("--provider", choices=["lexicon"])

    p = sub.add_parser("build-taxonomy", help="embed, cluster, and name keywords")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--structured")
    p.add_argument("--gazetteer", help="when given, verify mention terms are gazetteer-covered")
    p.add_argument("--naming")
    p.add_argument("--seed", type=int)
    p.add_argument("--k-ui", dest="k_ui", type=int)
    p.add_argument("--k-ve", dest="k_ve", type=int)
    p.add_argument("--out", dest="taxonomy")

    p = sub.add_parser("scan-k", help="inertia/silhouette report over a k range")
    _add_common(p)
    p.add_argument("--structured")
    p.add_argument("--kind", choices=["ui_component", "visual_element"], default="ui_component")
    p.add_argument("--k-min", type=int, default=3)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=["table", "csv"], default="table")

    p = sub.add_parser("build-index", help="per-post stats + scoring weights")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--structured")
    p.add_argument("--taxonomy")
    p.add_argument("--w-ui", dest="w_ui", type=float)
    p.add_argument("--w-ve", dest="w_ve", type=float)
    p.add_argument("--out", dest="index")

    p = sub.add_parser("stats", help="per-post knowledge stats")
    _add_common(p)
    p.add_argument("--post", required=True)
    p.add_argument("--corpus")
    p.add_argument("--structured")
    p.add_argument("--taxonomy")
    p.add_argument("--index")
    p.add_argument("--format", choices=["table", "csv"], default="table")

    p = sub.add_parser("top", help="top posts for a facet pair")
    _add_common(p)
    p.add_argument("--ui")
    p.add_argument("--ve")
    p.add_argument("-n", type=int, default=10)
    p.add_argument("--corpus")
    p.add_argument("--structured")
    p.add_argument("--taxonomy")
    p.add_argument("--index")
    p.add_argument("--format", choices=["table", "csv"], default="table")

    p = sub.add_parser("mindmap", help="export / import / lint portable mindmaps")
    _add_common(p)
    map_sub = p.add_subparsers(dest="map_cmd", required=True)
    pe = map_sub.add_parser("export")
    pe.add_argument("--maps-dir", dest="maps_dir")
    pe.add_argument("--map-id", required=True)
    pe.add_argument("--out")
    _add_common(pe)
    pi = map_sub.add_parser("import")
    pi.add_argument("--maps-dir", dest="maps_dir")
    pi.add_argument("--file", required=True)
    pi.add_argument("--replace", action="store_true")
    _add_common(pi)
    pl = map_sub.add_parser("lint")
    pl.add_argument("--file", required=True)
    _add_common(pl)

    p = sub.add_parser("serve", help="run the learner HTTP service from artifacts")
    _add_common(p)
    p.add_argument("--corpus")
    p.add_argument("--structured")
    p.add_argument("--taxonomy")
    p.add_argument("--index")
    p.add_argument("--maps-dir", dest="maps_dir")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--ui-dir", help="static directory for the web UI")

    p = sub.add_parser("demo", help="seed bundled fixtures, run the pipeline, serve")
    _add_common(p)
    p.add_argument("--workdir", default="demo-run")
    p.add_argument("--no-serve", action="store_true", help="build artifacts, do not serve")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--ui-dir", help="static directory for the web UI")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.cmd == "ingest":
            print(json.dumps(run_ingest(cfg), indent=2))
        elif args.cmd == "structure":
            print(json.dumps(run_structure(cfg), indent=2))
        elif args.cmd == "build-taxonomy":
            check = getattr(args, "gazetteer", None) is not None
            print(json.dumps(run_build_taxonomy(cfg, check_gazetteer=check), indent=2))
        elif args.cmd == "scan-k":
            print(run_scan_k(cfg, args.kind, args.k_min, args.k_max, args.format), end="")
        elif args.cmd == "build-index":
            print(json.dumps(run_build_index(cfg), indent=2))
        elif args.cmd == "stats":
            print(run_stats(cfg, args.post, args.format), end="")
        elif args.cmd == "top":
            print(run_top(cfg, args.ui, args.ve, args.n, args.format), end="")
        elif args.cmd == "mindmap":
            print(run_mindmap(cfg, args), end="")
        elif args.cmd == "serve":
            run_serve(cfg, ui_dir=args.ui_dir)
        elif args.cmd == "demo":
            summary = run_demo(cfg, args.workdir, serve=not args.no_serve, ui_dir=args.ui_dir)
            if args.no_serve:
                print(json.dumps(summary, indent=2))
    except DesignMineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
