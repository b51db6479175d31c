"""Parse newline-delimited community dumps into a filtered corpus.

The dump format is the public archive export convention: one JSON object
per line. Only a minimal field subset is read (see ``_record_from_obj``);
everything else is ignored. All text is NFC-normalized here so byte
offsets computed downstream stay consistent across components.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import CorruptDumpError

DEFAULT_FLAIR = "Feedback Request"
DEFAULT_BOTS = ("AutoModerator",)

# Bodies that carry no learnable content are dropped at ingest.
_DELETED_BODIES = {"[deleted]", "[removed]"}

_IMAGE_URL = re.compile(
    r"https?://\S+?\.(?:png|jpe?g|gif|webp)(?:\?\S*)?(?=\s|$|\))", re.IGNORECASE
)
_IMAGE_HOSTS = ("i.redd.it", "i.imgur.com", "preview.redd.it")


@dataclass(frozen=True)
class IngestConfig:
    flair: str = DEFAULT_FLAIR
    bots: tuple[str, ...] = DEFAULT_BOTS
    max_malformed_ratio: float = 0.5

    def to_payload(self) -> dict:
        return {
            "flair": self.flair,
            "bots": list(self.bots),
            "max_malformed_ratio": self.max_malformed_ratio,
        }


@dataclass(frozen=True)
class RawRecord:
    kind: str  # "post" | "comment"
    id: str
    parent_id: str | None
    author: str
    flair: str | None
    title: str | None
    body: str
    created_at: int
    image_refs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Post:
    id: str
    title: str
    body: str
    flair: str
    created_at: int
    image_refs: tuple[str, ...]
    author: str


@dataclass(frozen=True)
class Comment:
    id: str
    post_id: str
    author: str
    body: str
    created_at: int


@dataclass
class Corpus:
    posts: dict[str, Post] = field(default_factory=dict)
    comments: dict[str, Comment] = field(default_factory=dict)
    comments_by_post: dict[str, list[str]] = field(default_factory=dict)

    def comments_of(self, post_id: str) -> list[Comment]:
        return [self.comments[cid] for cid in self.comments_by_post.get(post_id, [])]

    def to_payload(self) -> dict:
        return {
            "posts": {
                pid: {
                    "id": p.id,
                    "title": p.title,
                    "body": p.body,
                    "flair": p.flair,
                    "created_at": p.created_at,
                    "image_refs": list(p.image_refs),
                    "author": p.author,
                }
                for pid, p in sorted(self.posts.items())
            },
            "comments": {
                cid: {
                    "id": c.id,
                    "post_id": c.post_id,
                    "author": c.author,
                    "body": c.body,
                    "created_at": c.created_at,
                }
                for cid, c in sorted(self.comments.items())
            },
            "comments_by_post": {
                pid: list(cids) for pid, cids in sorted(self.comments_by_post.items())
            },
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Corpus":
        posts = {
            pid: Post(
                id=d["id"],
                title=d["title"],
                body=d["body"],
                flair=d["flair"],
                created_at=d["created_at"],
                image_refs=tuple(d["image_refs"]),
                author=d["author"],
            )
            for pid, d in payload["posts"].items()
        }
        comments = {
            cid: Comment(
                id=d["id"],
                post_id=d["post_id"],
                author=d["author"],
                body=d["body"],
                created_at=d["created_at"],
            )
            for cid, d in payload["comments"].items()
        }
        by_post = {pid: list(cids) for pid, cids in payload["comments_by_post"].items()}
        return cls(posts=posts, comments=comments, comments_by_post=by_post)


@dataclass
class ParseResult:
    records: list[RawRecord]
    malformed_count: int
    line_count: int


@dataclass
class IngestReport:
    posts_in: int = 0
    comments_in: int = 0
    posts_retained: int = 0
    comments_retained: int = 0
    post_drops: Counter = field(default_factory=Counter)
    comment_drops: Counter = field(default_factory=Counter)

    def to_payload(self) -> dict:
        return {
            "posts_in": self.posts_in,
            "comments_in": self.comments_in,
            "posts_retained": self.posts_retained,
            "comments_retained": self.comments_retained,
            "post_drops": dict(sorted(self.post_drops.items())),
            "comment_drops": dict(sorted(self.comment_drops.items())),
        }


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def _looks_like_image(url: str) -> bool:
    if _IMAGE_URL.fullmatch(url):
        return True
    return any(host in url for host in _IMAGE_HOSTS)


def _extract_image_refs(obj: dict, body: str) -> tuple[str, ...]:
    refs: list[str] = []
    explicit = obj.get("image_refs")
    if isinstance(explicit, list):
        refs.extend(str(u) for u in explicit if u)
    url = obj.get("url")
    if isinstance(url, str) and url and _looks_like_image(url):
        refs.append(url)
    refs.extend(m.group(0) for m in _IMAGE_URL.finditer(body))
    seen: set[str] = set()
    out: list[str] = []
    for r in refs:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return tuple(out)


def _strip_thing_prefix(thing_id: str) -> str:
    # Archive exports name parents "t3_<id>" (post) / "t1_<id>" (comment).
    if thing_id[:3] in ("t1_", "t3_"):
        return thing_id[3:]
    return thing_id


def _record_from_obj(obj: dict) -> RawRecord:
    """Map one dump object onto a RawRecord.

    Required everywhere: id, author, created_utc (or created_at) > 0.
    A record is a post when it carries "title" (or kind == "post"), a
    comment when it carries "body" plus parent linkage via link_id or
    parent_id. Nested replies attach to the post through link_id.
    """
    rec_id = str(obj.get("id") or "")
    if not rec_id:
        raise ValueError("missing id")
    author = str(obj.get("author") or "")
    created = obj.get("created_utc", obj.get("created_at"))
    if not isinstance(created, (int, float)) or int(created) <= 0:
        raise ValueError("missing or non-positive created_at")
    created = int(created)

    kind = obj.get("kind")
    if kind is None:
        kind = "post" if "title" in obj else "comment"
    if kind not in ("post", "comment"):
        raise ValueError(f"unknown kind {kind!r}")

    if kind == "post":
        title = _nfc(str(obj.get("title") or ""))
        body = _nfc(str(obj.get("selftext", obj.get("body", "")) or ""))
        flair = obj.get("link_flair_text", obj.get("flair"))
        flair = _nfc(str(flair)) if flair is not None else None
        return RawRecord(
            kind="post",
            id=rec_id,
            parent_id=None,
            author=author,
            flair=flair,
            title=title,
            body=body,
            created_at=created,
            image_refs=_extract_image_refs(obj, body),
        )

    body = _nfc(str(obj.get("body") or ""))
    link = obj.get("link_id") or obj.get("parent_id")
    if not link:
        raise ValueError("comment without parent linkage")
    return RawRecord(
        kind="comment",
        id=rec_id,
        parent_id=_strip_thing_prefix(str(link)),
        author=author,
        flair=None,
        title=None,
        body=body,
        created_at=created,
    )


def parse_dump(stream: Iterable[str], config: IngestConfig | None = None) -> ParseResult:
    """Parse newline-delimited records; malformed lines are counted, not fatal.

    Blank lines are skipped silently. If more than
    ``config.max_malformed_ratio`` of the non-blank lines are malformed the
    whole dump is rejected.
    """
    config = config or IngestConfig()
    records: list[RawRecord] = []
    malformed = 0
    lines = 0
    for line in stream:
        line = line.strip()
        if not line:
            continue
        lines += 1
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("record is not an object")
            records.append(_record_from_obj(obj))
        except (json.JSONDecodeError, ValueError, TypeError):
            malformed += 1
    if lines and malformed / lines > config.max_malformed_ratio:
        raise CorruptDumpError(
            f"{malformed}/{lines} lines malformed (> {config.max_malformed_ratio:.0%})"
        )
    return ParseResult(records=records, malformed_count=malformed, line_count=lines)


def build_corpus(
    records: Iterable[RawRecord], config: IngestConfig | None = None
) -> tuple[Corpus, IngestReport]:
    """Apply the inclusion filters and assemble a corpus.

    Posts are kept when they carry the configured flair, have at least one
    image ref, and retain at least one comment. Comments are kept when they
    are not from a configured bot, not from the post's own author, and have
    a non-empty, non-deleted body. Every drop is accounted under exactly
    one reason.
    """
    config = config or IngestConfig()
    report = IngestReport()
    bots = set(config.bots)

    posts_in: dict[str, RawRecord] = {}
    comments_in: dict[str, RawRecord] = {}
    for rec in records:
        if rec.kind == "post":
            report.posts_in += 1
            if rec.id in posts_in:
                report.post_drops["duplicate_id"] += 1
                continue
            posts_in[rec.id] = rec
        else:
            report.comments_in += 1
            if rec.id in comments_in:
                report.comment_drops["duplicate_id"] += 1
                continue
            comments_in[rec.id] = rec

    # Stage 1: flair and image filters on posts.
    candidate_posts: dict[str, RawRecord] = {}
    for pid, rec in posts_in.items():
        if rec.flair != config.flair:
            report.post_drops["wrong_flair"] += 1
        elif not rec.image_refs:
            report.post_drops["no_images"] += 1
        else:
            candidate_posts[pid] = rec

    # Stage 2: per-comment filters.
    retained_comments: dict[str, Comment] = {}
    for cid, rec in comments_in.items():
        parent = candidate_posts.get(rec.parent_id or "")
        if parent is None:
            report.comment_drops["orphan"] += 1
            continue
        if rec.author in bots:
            report.comment_drops["bot_author"] += 1
            continue
        if rec.author == parent.author:
            report.comment_drops["op_comment"] += 1
            continue
        body = rec.body.strip()
        if not body or body in _DELETED_BODIES:
            report.comment_drops["empty_body"] += 1
            continue
        retained_comments[cid] = Comment(
            id=cid,
            post_id=parent.id,
            author=rec.author,
            body=rec.body,
            created_at=rec.created_at,
        )

    # Stage 3: posts must retain at least one comment.
    by_post: dict[str, list[Comment]] = {}
    for c in retained_comments.values():
        by_post.setdefault(c.post_id, []).append(c)

    corpus = Corpus()
    for pid, rec in candidate_posts.items():
        if pid not in by_post:
            report.post_drops["no_retained_comments"] += 1
            continue
        corpus.posts[pid] = Post(
            id=pid,
            title=rec.title or "",
            body=rec.body,
            flair=rec.flair or "",
            created_at=rec.created_at,
            image_refs=rec.image_refs,
            author=rec.author,
        )
        ordered = sorted(by_post[pid], key=lambda c: (c.created_at, c.id))
        corpus.comments_by_post[pid] = [c.id for c in ordered]
        for c in ordered:
            corpus.comments[c.id] = c

    report.posts_retained = len(corpus.posts)
    report.comments_retained = len(corpus.comments)
    return corpus, report


def records_from_corpus(corpus: Corpus) -> list[RawRecord]:
    """Re-serialize a corpus as raw records (filter idempotence checks)."""
    records: list[RawRecord] = []
    for pid, p in corpus.posts.items():
        records.append(
            RawRecord(
                kind="post",
                id=pid,
                parent_id=None,
                author=p.author,
                flair=p.flair,
                title=p.title,
                body=p.body,
                created_at=p.created_at,
                image_refs=p.image_refs,
            )
        )
    for cid, c in corpus.comments.items():
        records.append(
            RawRecord(
                kind="comment",
                id=cid,
                parent_id=c.post_id,
                author=c.author,
                flair=None,
                title=None,
                body=c.body,
                created_at=c.created_at,
            )
        )
    return records


def iter_dump_file(path: str) -> Iterator[str]:
    with open(path, "r", encoding="utf-8") as fh:
        yield from fh
