"""Build the two-axis keyword taxonomy and its co-occurrence matrix.

Detected keywords are embedded, clustered per kind (k-means), and named
through a checked-in human-authored mapping file — naming stays a human
decision, the build just applies it reproducibly.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .clustering import kmeans
from .embedding import EmbeddingProvider, embed_terms
from .errors import ConfigurationError, UnmappedTermError
from .ingest import Corpus
from .structuring import KEYWORD_KINDS, StructuredComment

UI_KIND = "ui_component"
VE_KIND = "visual_element"


@dataclass(frozen=True)
class ClusteringConfig:
    k_ui: int = 8
    k_ve: int = 6
    k_range: tuple[int, int] = (3, 10)
    seed: int = 0
    max_iter: int = 100
    tol: float = 1e-6
    n_init: int = 10  # restarts per axis, best inertia wins

    def __post_init__(self):
        if self.k_ui < 1 or self.k_ve < 1:
            raise ConfigurationError("cluster counts must be positive")
        if self.max_iter < 1 or self.tol < 0 or self.n_init < 1:
            raise ConfigurationError("max_iter and n_init must be >= 1, tol >= 0")
        lo, hi = self.k_range
        if lo < 1 or hi < lo:
            raise ConfigurationError(f"bad k_range {self.k_range}")

    def to_payload(self) -> dict:
        return {
            "k_ui": self.k_ui,
            "k_ve": self.k_ve,
            "k_range": list(self.k_range),
            "seed": self.seed,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "n_init": self.n_init,
        }


@dataclass
class Cluster:
    id: int
    name: str
    member_terms: list[str]  # canonical forms, sorted


@dataclass
class Taxonomy:
    ui_clusters: list[Cluster]
    ve_clusters: list[Cluster]
    term_to_cluster: dict[tuple[str, str], int]  # (kind, canonical) -> cluster id
    unnamed: list[tuple[str, int]] = field(default_factory=list)  # flagged (kind, id)

    def clusters_of(self, kind: str) -> list[Cluster]:
        return self.ui_clusters if kind == UI_KIND else self.ve_clusters

    def cluster_id(self, kind: str, canonical: str) -> int | None:
        return self.term_to_cluster.get((kind, canonical))

    def cluster_by_name(self, kind: str, name: str) -> Cluster | None:
        for cluster in self.clusters_of(kind):
            if cluster.name == name:
                return cluster
        return None

    def cluster_name(self, kind: str, cluster_id: int) -> str:
        return self.clusters_of(kind)[cluster_id].name

    def to_payload(self) -> dict:
        return {
            "ui_clusters": [
                {"id": c.id, "name": c.name, "member_terms": c.member_terms}
                for c in self.ui_clusters
            ],
            "ve_clusters": [
                {"id": c.id, "name": c.name, "member_terms": c.member_terms}
                for c in self.ve_clusters
            ],
            "unnamed": [list(pair) for pair in self.unnamed],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Taxonomy":
        ui = [Cluster(d["id"], d["name"], list(d["member_terms"])) for d in payload["ui_clusters"]]
        ve = [Cluster(d["id"], d["name"], list(d["member_terms"])) for d in payload["ve_clusters"]]
        mapping: dict[tuple[str, str], int] = {}
        for cluster in ui:
            for term in cluster.member_terms:
                mapping[(UI_KIND, term)] = cluster.id
        for cluster in ve:
            for term in cluster.member_terms:
                mapping[(VE_KIND, term)] = cluster.id
        unnamed = [(kind, cid) for kind, cid in payload.get("unnamed", [])]
        return cls(ui_clusters=ui, ve_clusters=ve, term_to_cluster=mapping, unnamed=unnamed)


@dataclass
class CooccurrenceMatrix:
    counts: dict[tuple[int, int], int]  # (ui cluster id, ve cluster id) -> comments

    def named(self, taxonomy: Taxonomy) -> dict[tuple[str, str], int]:
        return {
            (taxonomy.cluster_name(UI_KIND, c), taxonomy.cluster_name(VE_KIND, e)): v
            for (c, e), v in self.counts.items()
        }


@dataclass
class NamingMap:
    """Representative term -> display name, per kind.

    A naming key matches a member term when it equals the term or appears
    in it as a whole word ("button" names "home button"). When several
    keys match one term the longest key wins, ties broken lexically.
    """

    entries: dict[str, list[tuple[str, str]]]  # kind -> [(key, name)]

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "NamingMap":
        section = None
        entries: dict[str, list[tuple[str, str]]] = {UI_KIND: [], VE_KIND: []}
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in entries:
                    raise ConfigurationError(f"unknown naming section [{section}]")
                continue
            if section is None or "=" not in line:
                raise ConfigurationError(f"bad naming line: {line!r}")
            key, name = (part.strip() for part in line.split("=", 1))
            if not key or not name:
                raise ConfigurationError(f"bad naming line: {line!r}")
            entries[section].append((key.lower(), name))
        return cls(entries=entries)

    @classmethod
    def from_file(cls, path: str) -> "NamingMap":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_lines(fh)

    def match(self, kind: str, term: str) -> str | None:
        hits = []
        for key, name in self.entries.get(kind, []):
            if key == term or re.search(r"(?<!\w)" + re.escape(key) + r"(?!\w)", term):
                hits.append((key, name))
        if not hits:
            return None
        hits.sort(key=lambda kn: (-len(kn[0]), kn[0]))
        return hits[0][1]


def collect_terms(
    structured: Iterable[StructuredComment],
) -> dict[str, Counter]:
    """Mention frequencies of canonical terms, per kind."""
    freq: dict[str, Counter] = {kind: Counter() for kind in KEYWORD_KINDS}
    for sc in structured:
        for m in sc.mentions:
            freq[m.kind][m.canonical] += 1
    return freq


def name_clusters(
    kind: str,
    member_lists: list[list[str]],
    term_freq: Mapping[str, int],
    naming: NamingMap,
) -> tuple[list[Cluster], list[int]]:
    """Name one axis's clusters from the mapping file.

    Each cluster takes the name matched by its highest-frequency mapped
    term. Clusters with no mapped term become "cluster-<id>" and are
    flagged. Two clusters resolving to the same name is an error.
    """
    clusters: list[Cluster] = []
    flagged: list[int] = []
    used: dict[str, int] = {}
    for cid, members in enumerate(member_lists):
        best: tuple[int, str, str] | None = None  # (freq, term, name)
        for term in members:
            name = naming.match(kind, term)
            if name is None:
                continue
            candidate = (term_freq.get(term, 0), term, name)
            if best is None or (candidate[0], candidate[1]) > (best[0], best[1]):
                best = candidate
        if best is None:
            name = f"cluster-{cid}"
            flagged.append(cid)
        else:
            name = best[2]
        if name in used:
            raise ConfigurationError(
                f"{kind} clusters {used[name]} and {cid} both resolve to name {name!r}"
            )
        used[name] = cid
        clusters.append(Cluster(id=cid, name=name, member_terms=sorted(members)))
    return clusters, flagged


def build_taxonomy(
    structured: Iterable[StructuredComment],
    embedder: EmbeddingProvider,
    config: ClusteringConfig,
    naming: NamingMap,
) -> Taxonomy:
    """Embed, cluster, and name all detected keywords.

    Pure function of (mentions, embedder config, clustering config,
    naming file): the whole build is replayable from artifacts.
    """
    freq = collect_terms(structured)
    ui_clusters, ui_flagged = _cluster_axis(UI_KIND, freq[UI_KIND], embedder, config.k_ui, config, naming)
    ve_clusters, ve_flagged = _cluster_axis(VE_KIND, freq[VE_KIND], embedder, config.k_ve, config, naming)
    mapping: dict[tuple[str, str], int] = {}
    for cluster in ui_clusters:
        for term in cluster.member_terms:
            mapping[(UI_KIND, term)] = cluster.id
    for cluster in ve_clusters:
        for term in cluster.member_terms:
            mapping[(VE_KIND, term)] = cluster.id
    unnamed = [(UI_KIND, cid) for cid in ui_flagged] + [(VE_KIND, cid) for cid in ve_flagged]
    return Taxonomy(
        ui_clusters=ui_clusters,
        ve_clusters=ve_clusters,
        term_to_cluster=mapping,
        unnamed=unnamed,
    )


def _cluster_axis(
    kind: str,
    freq: Counter,
    embedder: EmbeddingProvider,
    k: int,
    config: ClusteringConfig,
    naming: NamingMap,
) -> tuple[list[Cluster], list[int]]:
    terms = sorted(freq)
    if len(terms) < k:
        raise ConfigurationError(
            f"{kind}: {len(terms)} distinct terms but k={k}; lower k or enrich the gazetteer"
        )
    matrix = embed_terms(terms, embedder)
    result = None
    for restart in range(config.n_init):
        candidate = kmeans(
            matrix, k, seed=config.seed + restart, max_iter=config.max_iter, tol=config.tol
        )
        if result is None or candidate.inertia < result.inertia:
            result = candidate
    members: list[list[str]] = [[] for _ in range(k)]
    for term, cid in zip(terms, result.assignments):
        members[int(cid)].append(term)
    return name_clusters(kind, members, freq, naming)


def cooccurrence(
    corpus: Corpus,
    structured: Mapping[str, StructuredComment],
    taxonomy: Taxonomy,
) -> CooccurrenceMatrix:
    """Count, per (ui cluster, ve cluster), the comments mentioning both.

    A comment increments a pair at most once no matter how many mentions
    it has (comments are counted, not mentions).
    """
    counts = {
        (c.id, e.id): 0 for c in taxonomy.ui_clusters for e in taxonomy.ve_clusters
    }
    orphans: list[tuple[str, str]] = []
    for cid in corpus.comments:
        sc = structured.get(cid)
        if sc is None:
            continue
        ui_set: set[int] = set()
        ve_set: set[int] = set()
        for m in sc.mentions:
            cluster = taxonomy.cluster_id(m.kind, m.canonical)
            if cluster is None:
                orphans.append((m.kind, m.canonical))
                continue
            (ui_set if m.kind == UI_KIND else ve_set).add(cluster)
        for c in ui_set:
            for e in ve_set:
                counts[(c, e)] += 1
    if orphans:
        raise UnmappedTermError(sorted(set(orphans)))
    return CooccurrenceMatrix(counts=counts)
