"""Per-post knowledge stats, weighted ranking, comment re-sorting, and
recommendation sampling.

Two counting rules coexist on purpose: stats count mentions (a comment
saying "grey" twice adds two), while pair_counts and the taxonomy-level
co-occurrence dedup per comment. Facet queries use cluster display names.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import ConfigurationError, NotFoundError, UnknownClusterError, UnmappedTermError
from .ingest import Corpus
from .structuring import StructuredComment
from .taxonomy import Taxonomy, UI_KIND, VE_KIND

DEFAULT_W_UI = 0.4
DEFAULT_W_VE = 0.6


@dataclass(frozen=True)
class ScoringConfig:
    w_ui: float = DEFAULT_W_UI
    w_ve: float = DEFAULT_W_VE

    def __post_init__(self):
        if self.w_ui < 0 or self.w_ve < 0 or self.w_ui + self.w_ve <= 0:
            raise ConfigurationError("weights must be non-negative with a positive sum")

    def to_payload(self) -> dict:
        return {"w_ui": self.w_ui, "w_ve": self.w_ve}


@dataclass(frozen=True)
class FacetQuery:
    ui_cluster: str | None = None  # cluster display names
    ve_cluster: str | None = None
    feedback_type: str | None = None


@dataclass
class PostKnowledgeStats:
    post_id: str
    num_ui_by_cluster: dict[int, int] = field(default_factory=dict)
    num_ve_by_cluster: dict[int, int] = field(default_factory=dict)
    pair_counts: dict[tuple[int, int], int] = field(default_factory=dict)

    def num_ui(self, cluster_id: int) -> int:
        return self.num_ui_by_cluster.get(cluster_id, 0)

    def num_ve(self, cluster_id: int) -> int:
        return self.num_ve_by_cluster.get(cluster_id, 0)

    def to_payload(self) -> dict:
        return {
            "post_id": self.post_id,
            "num_ui_by_cluster": {str(k): v for k, v in sorted(self.num_ui_by_cluster.items())},
            "num_ve_by_cluster": {str(k): v for k, v in sorted(self.num_ve_by_cluster.items())},
            "pair_counts": {f"{c},{e}": v for (c, e), v in sorted(self.pair_counts.items())},
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "PostKnowledgeStats":
        return cls(
            post_id=payload["post_id"],
            num_ui_by_cluster={int(k): v for k, v in payload["num_ui_by_cluster"].items()},
            num_ve_by_cluster={int(k): v for k, v in payload["num_ve_by_cluster"].items()},
            pair_counts={
                tuple(int(x) for x in key.split(",")): v
                for key, v in payload["pair_counts"].items()
            },
        )


@dataclass(frozen=True)
class SentenceView:
    start: int
    end: int
    label: str
    confidence: float
    highlighted: bool


@dataclass(frozen=True)
class KeywordSpan:
    start: int
    end: int
    canonical: str


@dataclass
class CommentView:
    comment_id: str
    author: str
    created_at: int
    body: str
    mention_count: int  # mentions of the selected element cluster
    keyword_spans: list[KeywordSpan]
    sentences: list[SentenceView]


def compute_stats(
    post_id: str,
    structured: Iterable[StructuredComment],
    taxonomy: Taxonomy,
) -> PostKnowledgeStats:
    """Mention-level cluster counts plus per-post deduped pair counts."""
    stats = PostKnowledgeStats(post_id=post_id)
    orphans: list[tuple[str, str]] = []
    for sc in structured:
        ui_set: set[int] = set()
        ve_set: set[int] = set()
        for m in sc.mentions:
            cluster = taxonomy.cluster_id(m.kind, m.canonical)
            if cluster is None:
                orphans.append((m.kind, m.canonical))
                continue
            if m.kind == UI_KIND:
                stats.num_ui_by_cluster[cluster] = stats.num_ui_by_cluster.get(cluster, 0) + 1
                ui_set.add(cluster)
            else:
                stats.num_ve_by_cluster[cluster] = stats.num_ve_by_cluster.get(cluster, 0) + 1
                ve_set.add(cluster)
        for c in ui_set:
            for e in ve_set:
                stats.pair_counts[(c, e)] = stats.pair_counts.get((c, e), 0) + 1
    if orphans:
        raise UnmappedTermError(sorted(set(orphans)))
    return stats


def score(
    stats: PostKnowledgeStats,
    ui_cluster_id: int,
    ve_cluster_id: int,
    cfg: ScoringConfig,
) -> float:
    return cfg.w_ui * stats.num_ui(ui_cluster_id) + cfg.w_ve * stats.num_ve(ve_cluster_id)


class KnowledgeIndex:
    """Immutable read model over (corpus, structured comments, taxonomy).

    Built once, then queried concurrently; a rebuild swaps the whole
    object.
    """

    def __init__(
        self,
        corpus: Corpus,
        structured: Mapping[str, StructuredComment],
        taxonomy: Taxonomy,
        scoring: ScoringConfig | None = None,
        stats: Mapping[str, PostKnowledgeStats] | None = None,
    ):
        self.corpus = corpus
        self.structured = dict(structured)
        self.taxonomy = taxonomy
        self.scoring = scoring or ScoringConfig()
        if stats is None:
            stats = {
                pid: compute_stats(
                    pid,
                    (self.structured[cid] for cid in corpus.comments_by_post[pid] if cid in self.structured),
                    taxonomy,
                )
                for pid in corpus.posts
            }
        self.stats = dict(stats)

    # -- facet resolution -------------------------------------------------

    def resolve_cluster(self, kind: str, name: str) -> int:
        cluster = self.taxonomy.cluster_by_name(kind, name)
        if cluster is None:
            known = ", ".join(c.name for c in self.taxonomy.clusters_of(kind))
            raise UnknownClusterError(f"unknown {kind} cluster {name!r}; known: {known}")
        return cluster.id

    # -- queries -----------------------------------------------------------

    def sort_posts(self, query: FacetQuery | None = None, cfg: ScoringConfig | None = None) -> list[str]:
        """Post ids ordered for the overview page.

        ui only: by that cluster's mention count; ui+ve: by weighted
        score; ve only: by that cluster's count; no facets: newest first.
        Ties break by created_at descending, then post id ascending.
        """
        query = query or FacetQuery()
        cfg = cfg or self.scoring
        ui_id = self.resolve_cluster(UI_KIND, query.ui_cluster) if query.ui_cluster else None
        ve_id = self.resolve_cluster(VE_KIND, query.ve_cluster) if query.ve_cluster else None

        def sort_key(pid: str):
            post = self.corpus.posts[pid]
            stats = self.stats[pid]
            if ui_id is not None and ve_id is not None:
                primary = -score(stats, ui_id, ve_id, cfg)
            elif ui_id is not None:
                primary = -stats.num_ui(ui_id)
            elif ve_id is not None:
                primary = -stats.num_ve(ve_id)
            else:
                primary = 0.0
            return (primary, -post.created_at, pid)

        return sorted(self.corpus.posts, key=sort_key)

    def sort_comments(
        self,
        post_id: str,
        ve_cluster: str | None = None,
        feedback_type: str | None = None,
    ) -> list[CommentView]:
        """Comments of one post, re-sorted and annotated for rendering.

        With an element cluster selected, order is by that cluster's
        mention count descending (ties by created_at ascending, then id)
        and the matching mention spans are attached. A feedback type
        flags exactly the sentences the provider labeled with it.
        """
        if post_id not in self.corpus.posts:
            raise NotFoundError(f"unknown post {post_id!r}")
        ve_id = self.resolve_cluster(VE_KIND, ve_cluster) if ve_cluster else None
        views: list[CommentView] = []
        for cid in self.corpus.comments_by_post[post_id]:
            comment = self.corpus.comments[cid]
            sc = self.structured.get(cid)
            spans: list[KeywordSpan] = []
            count = 0
            sentences: list[SentenceView] = []
            if sc is not None:
                if ve_id is not None:
                    for m in sc.mentions:
                        if m.kind == VE_KIND and self.taxonomy.cluster_id(m.kind, m.canonical) == ve_id:
                            spans.append(KeywordSpan(m.start, m.end, m.canonical))
                            count += 1
                sentences = [
                    SentenceView(
                        start=s.start,
                        end=s.end,
                        label=s.label,
                        confidence=s.confidence,
                        highlighted=feedback_type is not None and s.label == feedback_type,
                    )
                    for s in sc.sentences
                ]
            views.append(
                CommentView(
                    comment_id=cid,
                    author=comment.author,
                    created_at=comment.created_at,
                    body=comment.body,
                    mention_count=count,
                    keyword_spans=spans,
                    sentences=sentences,
                )
            )
        if ve_id is not None:
            views.sort(key=lambda v: (-v.mention_count, v.created_at, v.comment_id))
        return views

    def recommend(
        self,
        current_post: str,
        ui_cluster: str | None = None,
        ve_cluster: str | None = None,
        n: int = 5,
        seed: int = 0,
    ) -> list[str]:
        """Seeded uniform sample of other posts matching both facet kinds.

        A candidate must have at least one mention in the selected ui
        cluster and one in the selected ve cluster (whichever are set).
        Fewer than n candidates: all of them, shuffled.
        """
        if current_post not in self.corpus.posts:
            raise NotFoundError(f"unknown post {current_post!r}")
        if n < 1:
            raise ConfigurationError("n must be >= 1")
        ui_id = self.resolve_cluster(UI_KIND, ui_cluster) if ui_cluster else None
        ve_id = self.resolve_cluster(VE_KIND, ve_cluster) if ve_cluster else None
        candidates = []
        for pid in sorted(self.corpus.posts):
            if pid == current_post:
                continue
            stats = self.stats[pid]
            if ui_id is not None and stats.num_ui(ui_id) < 1:
                continue
            if ve_id is not None and stats.num_ve(ve_id) < 1:
                continue
            candidates.append(pid)
        rng = random.Random(seed)
        if len(candidates) <= n:
            rng.shuffle(candidates)
            return candidates
        return rng.sample(candidates, n)

    # -- persistence ---------------------------------------------------------

    def stats_payload(self) -> dict:
        return {
            "scoring": self.scoring.to_payload(),
            "stats": {pid: s.to_payload() for pid, s in sorted(self.stats.items())},
        }

    @classmethod
    def from_artifacts(
        cls,
        corpus: Corpus,
        structured: Mapping[str, StructuredComment],
        taxonomy: Taxonomy,
        payload: dict,
    ) -> "KnowledgeIndex":
        scoring = ScoringConfig(**payload["scoring"])
        stats = {
            pid: PostKnowledgeStats.from_payload(d) for pid, d in payload["stats"].items()
        }
        return cls(corpus, structured, taxonomy, scoring=scoring, stats=stats)
