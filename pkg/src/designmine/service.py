"""HTTP service for the reading UI: overview, reading page, recommendations,
mindmap endpoints, and session analytics.

Reads are reproducible given (artifacts, query): navigation history comes
from the posted session events, never from GET side effects. Mindmap
mutations carry the revision the client last saw.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any

from fastapi import FastAPI, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .analytics import (
    DEFAULT_DWELL_THRESHOLD_MS,
    SessionEvent,
    exploration_report,
    validate_order,
)
from .artifacts import (
    CORPUS_SCHEMA,
    INDEX_SCHEMA,
    STRUCTURED_SCHEMA,
    TAXONOMY_SCHEMA,
    read_artifact,
)
from .config import PipelineConfig
from .errors import (
    ConfigurationError,
    EventOrderError,
    MapImportError,
    NoLinkError,
    NotFoundError,
    RevisionConflictError,
    StaleLinkError,
    TreeError,
    UnknownClusterError,
)
from .index import KnowledgeIndex, score
from .ingest import Corpus
from .mindmap import (
    AutoTitlePolicy,
    MindmapStore,
    add_comment_node,
    add_node,
    delete_subtree,
    edit_node,
    export_json,
    export_map,
    import_map,
    move_node,
    resolve_jump,
)
from .structuring import FEEDBACK_LABELS, StructuredComment
from .taxonomy import Taxonomy, UI_KIND, VE_KIND


@dataclass
class SessionState:
    events: list[SessionEvent] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class LearnerEngine:
    index: KnowledgeIndex
    map_store: MindmapStore
    config: PipelineConfig
    sessions: dict[str, SessionState] = field(default_factory=dict)
    _sessions_lock: threading.Lock = field(default_factory=threading.Lock)

    def session(self, session_id: str) -> SessionState:
        with self._sessions_lock:
            return self.sessions.setdefault(session_id, SessionState())


def load_engine(config: PipelineConfig) -> LearnerEngine:
    corpus = Corpus.from_payload(read_artifact(config.corpus, CORPUS_SCHEMA)["corpus"])
    structured_payload = read_artifact(config.structured, STRUCTURED_SCHEMA)
    structured = {
        cid: StructuredComment.from_payload(d)
        for cid, d in structured_payload["comments"].items()
    }
    taxonomy = Taxonomy.from_payload(read_artifact(config.taxonomy, TAXONOMY_SCHEMA))
    index_payload = read_artifact(config.index, INDEX_SCHEMA)
    index = KnowledgeIndex.from_artifacts(corpus, structured, taxonomy, index_payload)
    return LearnerEngine(index=index, map_store=MindmapStore(config.maps_dir), config=config)


# -- request bodies ---------------------------------------------------------


class MapCreate(BaseModel):
    map_id: str | None = None
    root_title: str = "My notes"


class NodeCreate(BaseModel):
    parent_id: str
    title: str
    note: str | None = None
    expected_revision: int | None = None


class CommentNodeCreate(BaseModel):
    parent_id: str
    comment_id: str
    expected_revision: int | None = None
    max_keywords: int | None = None
    seed: int | None = None


class NodeEdit(BaseModel):
    title: str | None = None
    note: str | None = None
    expected_revision: int | None = None


class MoveRequest(BaseModel):
    node_id: str
    new_parent_id: str
    position: int | None = None
    expected_revision: int | None = None


class JumpRequest(BaseModel):
    node_id: str


class ImportRequest(BaseModel):
    document: dict
    replace: bool = False


class EventsBatch(BaseModel):
    events: list[dict]


def create_app(engine: LearnerEngine, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="designmine", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    index = engine.index
    cfg = engine.config

    def error(status: int, code: str, message: str, **extra: Any) -> JSONResponse:
        return JSONResponse(
            status_code=status, content={"error": code, "message": message, **extra}
        )

    @app.exception_handler(NotFoundError)
    async def _not_found(request, exc):
        return error(404, "not_found", str(exc))

    @app.exception_handler(UnknownClusterError)
    async def _unknown_cluster(request, exc):
        return error(400, "unknown_cluster", str(exc))

    @app.exception_handler(ConfigurationError)
    async def _bad_config(request, exc):
        return error(400, "bad_request", str(exc))

    @app.exception_handler(RevisionConflictError)
    async def _conflict(request, exc):
        return error(
            409, "revision_conflict", str(exc), current_revision=exc.current
        )

    @app.exception_handler(TreeError)
    async def _tree(request, exc):
        return error(409, "tree_conflict", str(exc))

    @app.exception_handler(NoLinkError)
    async def _no_link(request, exc):
        return error(400, "no_link", str(exc))

    @app.exception_handler(StaleLinkError)
    async def _stale(request, exc):
        return error(410, "stale_link", str(exc))

    @app.exception_handler(MapImportError)
    async def _import_error(request, exc):
        return error(422, "import_error", str(exc), location=exc.location)

    @app.exception_handler(EventOrderError)
    async def _order(request, exc):
        return error(422, "event_order", str(exc))

    # -- shared payload builders ------------------------------------------

    def facet_ids(ui: str | None, ve: str | None) -> tuple[int | None, int | None]:
        ui_id = index.resolve_cluster(UI_KIND, ui) if ui else None
        ve_id = index.resolve_cluster(VE_KIND, ve) if ve else None
        return ui_id, ve_id

    def card(pid: str, ui_id: int | None, ve_id: int | None) -> dict:
        post = index.corpus.posts[pid]
        stats = index.stats[pid]
        return {
            "post_id": pid,
            "title": post.title,
            "thumbnail": post.image_refs[0] if post.image_refs else None,
            "author": post.author,
            "created_at": post.created_at,
            "num_comments": len(index.corpus.comments_by_post.get(pid, [])),
            "num_ui": stats.num_ui(ui_id) if ui_id is not None else None,
            "num_ve": stats.num_ve(ve_id) if ve_id is not None else None,
            "score": (
                score(stats, ui_id, ve_id, index.scoring)
                if ui_id is not None and ve_id is not None
                else None
            ),
        }

    def normalize_feedback(feedback: str | None) -> str | None:
        if feedback in (None, "", "default"):
            return None
        if feedback not in FEEDBACK_LABELS:
            raise ConfigurationError(
                f"unknown feedback type {feedback!r}; one of {', '.join(FEEDBACK_LABELS)} or 'default'"
            )
        return feedback

    def previous_post(session_id: str | None, current: str) -> str | None:
        if not session_id:
            return None
        state = engine.session(session_id)
        with state.lock:
            views = [e.subject_id for e in state.events if e.kind == "view_post"]
        for pid in reversed(views[-cfg.history_depth :]):
            if pid != current:
                return pid
        return None

    def map_payload(m) -> dict:
        doc = export_map(m)
        doc["revision"] = m.revision
        return doc

    # -- content endpoints ---------------------------------------------------

    @app.get("/overview")
    def overview(
        ui: str | None = None,
        ve: str | None = None,
        offset: int = Query(default=0, ge=0),
        limit: int = Query(default=20, ge=0),
    ):
        ui_id, ve_id = facet_ids(ui, ve)
        from .index import FacetQuery

        order = index.sort_posts(FacetQuery(ui_cluster=ui, ve_cluster=ve))
        page = order[offset : offset + limit]
        return {
            "total": len(order),
            "offset": offset,
            "limit": limit,
            "facets": {
                "ui": [c.name for c in index.taxonomy.ui_clusters],
                "ve": [c.name for c in index.taxonomy.ve_clusters],
            },
            "active": {"ui": ui, "ve": ve},
            "posts": [card(pid, ui_id, ve_id) for pid in page],
        }

    @app.get("/posts/{post_id}/reading")
    def reading(
        post_id: str,
        ui: str | None = None,
        ve: str | None = None,
        feedback: str | None = None,
        session: str | None = None,
        n: int | None = None,
        seed: int | None = None,
    ):
        if post_id not in index.corpus.posts:
            raise NotFoundError(f"unknown post {post_id!r}")
        feedback = normalize_feedback(feedback)
        ui_id, ve_id = facet_ids(ui, ve)
        views = index.sort_comments(post_id, ve_cluster=ve, feedback_type=feedback)
        n = cfg.recommend_n if n is None else n
        seed = cfg.recommend_seed if seed is None else seed
        recommended = index.recommend(
            post_id, ui_cluster=ui, ve_cluster=ve, n=n, seed=seed
        )
        post = index.corpus.posts[post_id]
        return {
            "post": {
                "post_id": post_id,
                "title": post.title,
                "body": post.body,
                "image_refs": list(post.image_refs),
                "author": post.author,
                "created_at": post.created_at,
            },
            "active": {"ui": ui, "ve": ve, "feedback": feedback},
            "comments": [
                {
                    "comment_id": v.comment_id,
                    "author": v.author,
                    "created_at": v.created_at,
                    "body": v.body,
                    "mention_count": v.mention_count,
                    "keyword_spans": [
                        {"start": s.start, "end": s.end, "canonical": s.canonical}
                        for s in v.keyword_spans
                    ],
                    "sentences": [
                        {
                            "start": s.start,
                            "end": s.end,
                            "label": s.label,
                            "confidence": s.confidence,
                            "highlighted": s.highlighted,
                        }
                        for s in v.sentences
                    ],
                }
                for v in views
            ],
            "navigation": {"previous_post_id": previous_post(session, post_id)},
            "recommendations": [card(pid, ui_id, ve_id) for pid in recommended],
        }

    @app.get("/posts/{post_id}/recommendations")
    def recommendations(
        post_id: str,
        ui: str | None = None,
        ve: str | None = None,
        n: int | None = None,
        seed: int | None = None,
    ):
        ui_id, ve_id = facet_ids(ui, ve)
        n = cfg.recommend_n if n is None else n
        seed = cfg.recommend_seed if seed is None else seed
        picked = index.recommend(post_id, ui_cluster=ui, ve_cluster=ve, n=n, seed=seed)
        return {"recommendations": [card(pid, ui_id, ve_id) for pid in picked]}

    # -- session analytics --------------------------------------------------

    @app.post("/sessions/{session_id}/events")
    def post_events(session_id: str, batch: EventsBatch):
        try:
            events = [SessionEvent.from_payload(session_id, e) for e in batch.events]
        except ValueError as exc:
            return error(422, "bad_event", str(exc))
        for ev in events:
            if ev.kind == "view_post" and ev.subject_id not in index.corpus.posts:
                return error(422, "bad_event", f"view_post subject {ev.subject_id!r} unknown")
            if ev.kind == "view_comment" and ev.subject_id not in index.corpus.comments:
                return error(422, "bad_event", f"view_comment subject {ev.subject_id!r} unknown")
            if ev.kind == "jump" and ev.subject_id not in index.corpus.posts:
                return error(422, "bad_event", f"jump subject {ev.subject_id!r} unknown")
        state = engine.session(session_id)
        with state.lock:
            last = state.events[-1].timestamp if state.events else None
            validate_order(events, last_timestamp=last)  # whole batch or nothing
            state.events.extend(events)
            total = len(state.events)
        return {"accepted": len(events), "total": total}

    @app.get("/sessions/{session_id}/report")
    def session_report(
        session_id: str, threshold_ms: int = Query(default=DEFAULT_DWELL_THRESHOLD_MS, ge=0)
    ):
        state = engine.session(session_id)
        with state.lock:
            events = list(state.events)
        return exploration_report(session_id, events, threshold_ms=threshold_ms).to_payload()

    # -- mindmap endpoints -----------------------------------------------------

    @app.post("/maps", status_code=201)
    def create_map(body: MapCreate):
        m = engine.map_store.create(map_id=body.map_id, root_title=body.root_title)
        return map_payload(m)

    @app.get("/maps/{map_id}")
    def get_map(map_id: str):
        return map_payload(engine.map_store.load(map_id))

    @app.post("/maps/{map_id}/nodes", status_code=201)
    def create_node(map_id: str, body: NodeCreate):
        result: dict = {}

        def op(m):
            result["node_id"] = add_node(
                m,
                body.parent_id,
                body.title,
                note=body.note,
                expected_revision=body.expected_revision,
            )

        m = engine.map_store.mutate(map_id, op)
        return {"node_id": result["node_id"], "title": body.title, "revision": m.revision}

    @app.post("/maps/{map_id}/comment-nodes", status_code=201)
    def create_comment_node(map_id: str, body: CommentNodeCreate):
        comment = index.corpus.comments.get(body.comment_id)
        structured = index.structured.get(body.comment_id)
        if comment is None or structured is None:
            raise NotFoundError(f"unknown comment {body.comment_id!r}")
        policy = AutoTitlePolicy(
            max_keywords=body.max_keywords or cfg.title_keywords,
            rng_seed=cfg.title_seed if body.seed is None else body.seed,
        )
        result: dict = {}

        def op(m):
            result["node_id"] = add_comment_node(
                m,
                body.parent_id,
                comment,
                structured,
                policy,
                expected_revision=body.expected_revision,
            )
            result["title"] = m.nodes[result["node_id"]].title

        m = engine.map_store.mutate(map_id, op)
        return {"node_id": result["node_id"], "title": result["title"], "revision": m.revision}

    @app.post("/maps/{map_id}/jump")
    def jump(map_id: str, body: JumpRequest):
        m = engine.map_store.load(map_id)
        post_id, comment_id = resolve_jump(m, body.node_id, corpus=index.corpus)
        return {"post_id": post_id, "comment_id": comment_id}

    @app.put("/maps/{map_id}/nodes/{node_id}")
    def update_node(map_id: str, node_id: str, body: NodeEdit):
        fields = body.model_dump(exclude_unset=True)

        def op(m):
            kwargs: dict = {"expected_revision": body.expected_revision}
            if "title" in fields:
                kwargs["title"] = body.title
            if "note" in fields:
                kwargs["note"] = body.note
            edit_node(m, node_id, **kwargs)

        m = engine.map_store.mutate(map_id, op)
        return {"revision": m.revision}

    @app.delete("/maps/{map_id}/nodes/{node_id}")
    def remove_subtree(
        map_id: str, node_id: str, expected_revision: int | None = Query(default=None)
    ):
        result: dict = {}

        def op(m):
            result["removed"] = delete_subtree(m, node_id, expected_revision=expected_revision)

        m = engine.map_store.mutate(map_id, op)
        return {"removed": result["removed"], "revision": m.revision}

    @app.post("/maps/{map_id}/move")
    def move(map_id: str, body: MoveRequest):
        def op(m):
            move_node(
                m,
                body.node_id,
                body.new_parent_id,
                position=body.position,
                expected_revision=body.expected_revision,
            )

        m = engine.map_store.mutate(map_id, op)
        return {"revision": m.revision}

    @app.get("/maps/{map_id}/export")
    def export_endpoint(map_id: str):
        m = engine.map_store.load(map_id)
        return Response(content=export_json(m), media_type="application/json")

    @app.post("/maps/import", status_code=201)
    def import_endpoint(body: ImportRequest):
        m = import_map(body.document)
        if engine.map_store.exists(m.map_id) and not body.replace:
            raise TreeError(f"map {m.map_id!r} already exists; pass replace=true to overwrite")
        engine.map_store.save(m)
        return map_payload(m)

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
