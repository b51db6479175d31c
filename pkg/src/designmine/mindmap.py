"""Learner mindmaps: a tree of notes with optional back-links to comments.

Mutations are optimistic: callers may pass the revision they last saw and
get a conflict error if the map moved on. Raster export is a UI concern;
the engine only guarantees the portable JSON document.
"""

from __future__ import annotations

import hashlib
import json
import random
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    MapImportError,
    NoLinkError,
    NotFoundError,
    RevisionConflictError,
    StaleLinkError,
    TreeError,
)
from .ingest import Comment, Corpus
from .structuring import StructuredComment

MINDMAP_SCHEMA = "mindmap/v1"


@dataclass
class MindmapNode:
    node_id: str
    title: str
    note: str | None = None
    link: tuple[str, str] | None = None  # (post_id, comment_id)
    children: list[str] = field(default_factory=list)
    created_at: int = 0


@dataclass
class Mindmap:
    map_id: str
    root: str
    nodes: dict[str, MindmapNode]
    revision: int = 0


@dataclass(frozen=True)
class AutoTitlePolicy:
    max_keywords: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_keywords < 1:
            raise ValueError("max_keywords must be >= 1")


_UNSET = object()


def new_map(map_id: str | None = None, root_title: str = "My notes", created_at: int = 0) -> Mindmap:
    map_id = map_id or uuid.uuid4().hex[:12]
    root_id = _new_node_id()
    root = MindmapNode(node_id=root_id, title=root_title, created_at=created_at)
    return Mindmap(map_id=map_id, root=root_id, nodes={root_id: root}, revision=0)


def _new_node_id() -> str:
    return uuid.uuid4().hex[:12]


def _check_revision(mindmap: Mindmap, expected: int | None) -> None:
    if expected is not None and expected != mindmap.revision:
        raise RevisionConflictError(current=mindmap.revision, expected=expected)


def _require_node(mindmap: Mindmap, node_id: str) -> MindmapNode:
    node = mindmap.nodes.get(node_id)
    if node is None:
        raise NotFoundError(f"map {mindmap.map_id}: no node {node_id!r}")
    return node


def add_node(
    mindmap: Mindmap,
    parent_id: str,
    title: str,
    note: str | None = None,
    created_at: int = 0,
    expected_revision: int | None = None,
) -> str:
    _check_revision(mindmap, expected_revision)
    parent = _require_node(mindmap, parent_id)
    node = MindmapNode(node_id=_new_node_id(), title=title, note=note, created_at=created_at)
    mindmap.nodes[node.node_id] = node
    parent.children.append(node.node_id)
    mindmap.revision += 1
    return node.node_id


def _sample_seed(base_seed: int, comment_id: str) -> int:
    digest = hashlib.blake2b(f"{base_seed}:{comment_id}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def auto_title(structured: StructuredComment, policy: AutoTitlePolicy) -> str:
    """Up to max_keywords distinct canonical keywords, seeded sample.

    UI-component and visual-element mentions are pooled. No mentions at
    all falls back to "comment <short-id>".
    """
    pool = sorted({m.canonical for m in structured.mentions})
    if not pool:
        return f"comment {structured.comment_id[:8]}"
    take = min(policy.max_keywords, len(pool))
    rng = random.Random(_sample_seed(policy.rng_seed, structured.comment_id))
    return ", ".join(rng.sample(pool, take))


def add_comment_node(
    mindmap: Mindmap,
    parent_id: str,
    comment: Comment,
    structured: StructuredComment,
    policy: AutoTitlePolicy | None = None,
    created_at: int = 0,
    expected_revision: int | None = None,
) -> str:
    """Attach a comment under parent: sampled-keyword title, body as note,
    and a jump link back to (post, comment)."""
    policy = policy or AutoTitlePolicy()
    _check_revision(mindmap, expected_revision)
    parent = _require_node(mindmap, parent_id)
    node = MindmapNode(
        node_id=_new_node_id(),
        title=auto_title(structured, policy),
        note=comment.body,
        link=(comment.post_id, comment.id),
        created_at=created_at,
    )
    mindmap.nodes[node.node_id] = node
    parent.children.append(node.node_id)
    mindmap.revision += 1
    return node.node_id


def resolve_jump(mindmap: Mindmap, node_id: str, corpus: Corpus | None = None) -> tuple[str, str]:
    """Return the stored (post_id, comment_id); read-only.

    With a corpus at hand the link is checked for staleness (the corpus
    may have been rebuilt without that post or comment).
    """
    node = _require_node(mindmap, node_id)
    if node.link is None:
        raise NoLinkError(f"node {node_id!r} has no (post, comment) link")
    post_id, comment_id = node.link
    if corpus is not None:
        comment = corpus.comments.get(comment_id)
        if post_id not in corpus.posts or comment is None or comment.post_id != post_id:
            raise StaleLinkError(f"link ({post_id}, {comment_id}) no longer resolves")
    return node.link


def edit_node(
    mindmap: Mindmap,
    node_id: str,
    title=_UNSET,
    note=_UNSET,
    expected_revision: int | None = None,
) -> None:
    _check_revision(mindmap, expected_revision)
    node = _require_node(mindmap, node_id)
    if title is not _UNSET:
        node.title = title
    if note is not _UNSET:
        node.note = note
    mindmap.revision += 1


def delete_subtree(mindmap: Mindmap, node_id: str, expected_revision: int | None = None) -> int:
    """Remove a node and its subtree; returns how many nodes went away."""
    _check_revision(mindmap, expected_revision)
    node = _require_node(mindmap, node_id)
    if node_id == mindmap.root:
        raise TreeError("cannot delete the root node")
    parent = _parent_of(mindmap, node_id)
    parent.children.remove(node_id)
    removed = 0
    stack = [node_id]
    while stack:
        nid = stack.pop()
        stack.extend(mindmap.nodes[nid].children)
        del mindmap.nodes[nid]
        removed += 1
    mindmap.revision += 1
    return removed


def move_node(
    mindmap: Mindmap,
    node_id: str,
    new_parent_id: str,
    position: int | None = None,
    expected_revision: int | None = None,
) -> None:
    _check_revision(mindmap, expected_revision)
    _require_node(mindmap, node_id)
    new_parent = _require_node(mindmap, new_parent_id)
    if node_id == mindmap.root:
        raise TreeError("cannot move the root node")
    if new_parent_id == node_id or _is_descendant(mindmap, of=node_id, candidate=new_parent_id):
        raise TreeError(f"moving {node_id!r} under {new_parent_id!r} would create a cycle")
    old_parent = _parent_of(mindmap, node_id)
    old_parent.children.remove(node_id)
    if position is None or position >= len(new_parent.children):
        new_parent.children.append(node_id)
    else:
        new_parent.children.insert(max(position, 0), node_id)
    mindmap.revision += 1


def _parent_of(mindmap: Mindmap, node_id: str) -> MindmapNode:
    for node in mindmap.nodes.values():
        if node_id in node.children:
            return node
    raise TreeError(f"node {node_id!r} has no parent")


def _is_descendant(mindmap: Mindmap, of: str, candidate: str) -> bool:
    stack = list(mindmap.nodes[of].children)
    while stack:
        nid = stack.pop()
        if nid == candidate:
            return True
        stack.extend(mindmap.nodes[nid].children)
    return False


def validate_map(mindmap: Mindmap) -> None:
    """Tree invariants: one root, acyclic, every node reachable exactly once."""
    if mindmap.root not in mindmap.nodes:
        raise MapImportError("root node missing", location=mindmap.root)
    child_seen: dict[str, str] = {}
    for node in mindmap.nodes.values():
        for child in node.children:
            if child not in mindmap.nodes:
                raise MapImportError(f"unknown child {child!r}", location=node.node_id)
            if child == mindmap.root:
                raise MapImportError("root appears as a child", location=node.node_id)
            if child in child_seen:
                raise MapImportError(f"node {child!r} has two parents", location=node.node_id)
            child_seen[child] = node.node_id
    reached = set()
    stack = [mindmap.root]
    while stack:
        nid = stack.pop()
        if nid in reached:
            raise MapImportError("cycle detected", location=nid)
        reached.add(nid)
        stack.extend(mindmap.nodes[nid].children)
    unreachable = set(mindmap.nodes) - reached
    if unreachable:
        raise MapImportError(
            f"{len(unreachable)} nodes unreachable from root", location=sorted(unreachable)[0]
        )


def export_map(mindmap: Mindmap) -> dict:
    """Portable document; the single source of truth for CLI and service."""
    return {
        "schema": MINDMAP_SCHEMA,
        "map_id": mindmap.map_id,
        "root": mindmap.root,
        "nodes": [
            {
                "node_id": node.node_id,
                "title": node.title,
                "note": node.note,
                "link": (
                    {"post_id": node.link[0], "comment_id": node.link[1]}
                    if node.link
                    else None
                ),
                "children": list(node.children),
                "created_at": node.created_at,
            }
            for _, node in sorted(mindmap.nodes.items())
        ],
    }


def export_json(mindmap: Mindmap) -> str:
    return json.dumps(export_map(mindmap), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def import_map(document: dict) -> Mindmap:
    """Inverse of export_map; structure, titles, notes, and links survive
    the round trip. Revision resets to 0."""
    if not isinstance(document, dict):
        raise MapImportError("document is not an object")
    if document.get("schema") != MINDMAP_SCHEMA:
        raise MapImportError(f"unsupported schema {document.get('schema')!r}")
    for key in ("map_id", "root", "nodes"):
        if key not in document:
            raise MapImportError(f"missing field {key!r}")
    nodes: dict[str, MindmapNode] = {}
    for i, d in enumerate(document["nodes"]):
        node_id = d.get("node_id")
        if not node_id or not isinstance(node_id, str):
            raise MapImportError("node without id", location=f"nodes[{i}]")
        if node_id in nodes:
            raise MapImportError(f"duplicate node id {node_id!r}", location=f"nodes[{i}]")
        link = d.get("link")
        if link is not None:
            if not isinstance(link, dict) or "post_id" not in link or "comment_id" not in link:
                raise MapImportError("malformed link", location=node_id)
            link = (link["post_id"], link["comment_id"])
        nodes[node_id] = MindmapNode(
            node_id=node_id,
            title=str(d.get("title", "")),
            note=d.get("note"),
            link=link,
            children=[str(c) for c in d.get("children", [])],
            created_at=int(d.get("created_at", 0)),
        )
    mindmap = Mindmap(map_id=document["map_id"], root=document["root"], nodes=nodes, revision=0)
    validate_map(mindmap)
    return mindmap


class MindmapStore:
    """One JSON file per map under a directory; atomic writes.

    Process-level mutations are serialized by a lock; across processes the
    revision check is the guard.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, map_id: str) -> Path:
        safe = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in map_id)
        return self.directory / f"{safe}.json"

    def exists(self, map_id: str) -> bool:
        return self._path(map_id).exists()

    def list_maps(self) -> list[str]:
        ids = []
        for path in sorted(self.directory.glob("*.json")):
            try:
                ids.append(json.loads(path.read_text(encoding="utf-8"))["document"]["map_id"])
            except (json.JSONDecodeError, KeyError, TypeError):
                continue
        return ids

    def load(self, map_id: str) -> Mindmap:
        path = self._path(map_id)
        if not path.exists():
            raise NotFoundError(f"no mindmap {map_id!r}")
        raw = json.loads(path.read_text(encoding="utf-8"))
        mindmap = import_map(raw["document"])
        mindmap.revision = raw.get("revision", 0)
        return mindmap

    def save(self, mindmap: Mindmap) -> None:
        validate_map(mindmap)
        payload = {"revision": mindmap.revision, "document": export_map(mindmap)}
        path = self._path(mindmap.map_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(
            json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        tmp.replace(path)

    def create(self, map_id: str | None = None, root_title: str = "My notes") -> Mindmap:
        with self._lock:
            mindmap = new_map(map_id=map_id, root_title=root_title)
            if self.exists(mindmap.map_id):
                raise TreeError(f"map {mindmap.map_id!r} already exists")
            self.save(mindmap)
            return mindmap

    def mutate(self, map_id: str, fn) -> Mindmap:
        """Load-mutate-save under the store lock; fn(map) applies the op."""
        with self._lock:
            mindmap = self.load(map_id)
            fn(mindmap)
            self.save(mindmap)
            return mindmap
