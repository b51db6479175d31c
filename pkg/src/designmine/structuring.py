"""Split comments into labeled sentences and detect taxonomy keywords.

All spans are byte offsets into the UTF-8 encoding of the NFC-normalized
comment body, so the reading UI can highlight without re-tokenizing.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Protocol, runtime_checkable

from .errors import ConfigurationError, StructuringError
from .ingest import Comment

FEEDBACK_LABELS = ("critique", "suggestion", "rationale", "other")
KEYWORD_KINDS = ("ui_component", "visual_element")

# Periods after these tokens never end a sentence.
ABBREVIATIONS = frozenset(
    {
        "e.g.", "i.e.", "etc.", "vs.", "cf.", "al.", "ca.", "no.", "fig.",
        "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "approx.", "min.",
        "max.", "p.", "pp.", "www.",
    }
)

_TERMINALS = ".!?"

# Lexicon-baseline cue tables. Rule order: rationale > suggestion > critique.
_RATIONALE_RE = re.compile(r"\b(because|so that|since)\b", re.IGNORECASE)
_SUGGESTION_RE = re.compile(
    r"\b(should|try|consider|recommend|suggest|maybe|what if|how about)\b"
    r"|\bi('d| would)\b|\b(could|would) (be|use|look|help|work)\b",
    re.IGNORECASE,
)
_CRITIQUE_RE = re.compile(
    r"\b(too|hard to|difficult to|cluttered|inconsistent|looks?|seems?|feels?"
    r"|confusing|unclear|busy|crowded|awkward|distracting|messy|bland|harsh"
    r"|poor|ugly|nice|great|clean|love|like|dislike|off-putting|overwhelming)\b",
    re.IGNORECASE,
)
_IMPERATIVE_HEADS = frozenset(
    {
        "make", "add", "remove", "use", "try", "consider", "increase",
        "reduce", "move", "change", "align", "avoid", "keep", "give", "put",
        "drop", "swap", "darken", "lighten", "shrink", "enlarge", "center",
        "simplify", "tighten", "round", "bump", "lower", "raise", "replace",
        "rethink", "pick", "choose", "match", "group", "separate", "bold",
    }
)


@dataclass(frozen=True)
class Sentence:
    comment_id: str
    index: int
    start: int  # byte offset, inclusive
    end: int  # byte offset, exclusive
    text: str
    label: str
    confidence: float


@dataclass(frozen=True)
class KeywordMention:
    comment_id: str
    start: int
    end: int
    surface: str
    kind: str
    canonical: str


@dataclass
class StructuredComment:
    comment_id: str
    sentences: list[Sentence]
    mentions: list[KeywordMention]

    def to_payload(self) -> dict:
        return {
            "comment_id": self.comment_id,
            "sentences": [
                {
                    "index": s.index,
                    "start": s.start,
                    "end": s.end,
                    "text": s.text,
                    "label": s.label,
                    "confidence": s.confidence,
                }
                for s in self.sentences
            ],
            "mentions": [
                {
                    "start": m.start,
                    "end": m.end,
                    "surface": m.surface,
                    "kind": m.kind,
                    "canonical": m.canonical,
                }
                for m in self.mentions
            ],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "StructuredComment":
        cid = payload["comment_id"]
        return cls(
            comment_id=cid,
            sentences=[
                Sentence(
                    comment_id=cid,
                    index=d["index"],
                    start=d["start"],
                    end=d["end"],
                    text=d["text"],
                    label=d["label"],
                    confidence=d["confidence"],
                )
                for d in payload["sentences"]
            ],
            mentions=[
                KeywordMention(
                    comment_id=cid,
                    start=d["start"],
                    end=d["end"],
                    surface=d["surface"],
                    kind=d["kind"],
                    canonical=d["canonical"],
                )
                for d in payload["mentions"]
            ],
        )


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def _byte_offsets(text: str) -> list[int]:
    """Cumulative UTF-8 byte offset for each character position."""
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def _token_before(text: str, dot_index: int) -> str:
    k = dot_index - 1
    while k >= 0 and (text[k].isalnum() or text[k] == "."):
        k -= 1
    return text[k + 1 : dot_index].lower()


def _segment_chars(body: str) -> list[tuple[int, int]]:
    """Character-level sentence spans; see segment() for the rules."""
    spans: list[tuple[int, int]] = []
    n = len(body)
    i = 0
    start: int | None = None
    while i < n:
        ch = body[i]
        if start is None:
            if not ch.isspace():
                start = i
            i += 1
            continue
        if ch in "\n\r":
            spans.append((start, i))
            start = None
            i += 1
            continue
        if ch in _TERMINALS:
            j = i
            while j + 1 < n and body[j + 1] in _TERMINALS:
                j += 1
            at_break = j + 1 >= n or body[j + 1].isspace()
            if at_break:
                boundary = True
                if ch == "." and j == i:
                    tok = _token_before(body, i)
                    if tok and (tok + ".") in ABBREVIATIONS:
                        boundary = False
                if boundary:
                    spans.append((start, j + 1))
                    start = None
            i = j + 1
            continue
        i += 1
    if start is not None:
        spans.append((start, n))
    trimmed: list[tuple[int, int]] = []
    for s, e in spans:
        while e > s and body[e - 1].isspace():
            e -= 1
        if e > s:
            trimmed.append((s, e))
    return trimmed


def segment(body: str) -> list[tuple[int, int]]:
    """Sentence spans as byte offsets into the NFC/UTF-8 body.

    Terminal punctuation (. ! ?) followed by whitespace ends a sentence,
    newlines always do, and periods after known abbreviations or inside
    tokens (decimals, URLs) do not. Spans are ordered, disjoint, and
    cover every non-whitespace character.
    """
    body = nfc(body)
    offsets = _byte_offsets(body)
    return [(offsets[s], offsets[e]) for s, e in _segment_chars(body)]


def classify_sentence(text: str) -> tuple[str, float]:
    """Lexicon-baseline feedback label for one sentence.

    Rule order: rationale cues, then suggestion cues (including an
    imperative verb at the sentence head), then critique cues, else
    "other". Rule hits are confidence 1.0, "other" is 0.0.
    """
    if _RATIONALE_RE.search(text):
        return "rationale", 1.0
    head_match = re.search(r"[A-Za-z][A-Za-z'-]*", text)
    head = head_match.group(0).lower() if head_match else ""
    if head in _IMPERATIVE_HEADS or _SUGGESTION_RE.search(text):
        return "suggestion", 1.0
    if _CRITIQUE_RE.search(text):
        return "critique", 1.0
    return "other", 0.0


@dataclass
class Gazetteer:
    """Two flat term lists: UI components and visual elements.

    Headwords match case-insensitively at word boundaries; the canonical
    form of a mention is the lower-cased headword.
    """

    ui_terms: tuple[str, ...] = ()
    ve_terms: tuple[str, ...] = ()

    def terms_of(self, kind: str) -> tuple[str, ...]:
        return self.ui_terms if kind == "ui_component" else self.ve_terms

    def is_empty(self) -> bool:
        return not self.ui_terms and not self.ve_terms

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "Gazetteer":
        section = None
        buckets: dict[str, list[str]] = {"ui_component": [], "visual_element": []}
        seen: dict[str, set[str]] = {"ui_component": set(), "visual_element": set()}
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in buckets:
                    raise ConfigurationError(f"unknown gazetteer section [{section}]")
                continue
            if section is None:
                raise ConfigurationError("gazetteer term before any [section] header")
            term = nfc(line)
            key = term.lower()
            if key not in seen[section]:
                seen[section].add(key)
                buckets[section].append(term)
        return cls(
            ui_terms=tuple(buckets["ui_component"]),
            ve_terms=tuple(buckets["visual_element"]),
        )

    @classmethod
    def from_file(cls, path: str) -> "Gazetteer":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_lines(fh)


def detect_keywords(body: str, gazetteer: Gazetteer, comment_id: str = "") -> list[KeywordMention]:
    """Scan for gazetteer terms, longest match first, per kind.

    Overlapping candidates of the same kind are resolved by longer span,
    then earlier start. Matching is case-insensitive and bounded by word
    edges; mentions of different kinds may overlap.
    """
    if gazetteer.is_empty():
        raise ConfigurationError("gazetteer has no terms")
    body = nfc(body)
    offsets = _byte_offsets(body)
    mentions: list[KeywordMention] = []
    for kind in KEYWORD_KINDS:
        candidates: list[tuple[int, int, str]] = []
        for term in gazetteer.terms_of(kind):
            pattern = re.compile(r"(?<!\w)" + re.escape(term) + r"(?!\w)", re.IGNORECASE)
            for m in pattern.finditer(body):
                candidates.append((m.start(), m.end(), term.lower()))
        candidates.sort(key=lambda c: (-(c[1] - c[0]), c[0], c[2]))
        taken: list[tuple[int, int]] = []
        for s, e, canonical in candidates:
            if any(s < te and ts < e for ts, te in taken):
                continue
            taken.append((s, e))
            mentions.append(
                KeywordMention(
                    comment_id=comment_id,
                    start=offsets[s],
                    end=offsets[e],
                    surface=body[s:e],
                    kind=kind,
                    canonical=canonical,
                )
            )
    mentions.sort(key=lambda m: (m.start, m.end, m.kind))
    return mentions


@runtime_checkable
class ClassifierProvider(Protocol):
    """Pluggable sentence classifier + keyword detector.

    Implementations must be deterministic for a fixed configuration and
    input, and are expected to be safe for concurrent use.
    """

    name: str

    def classify(self, sentences: list[str]) -> list[tuple[str, float]]: ...

    def detect(self, body: str, comment_id: str) -> list[KeywordMention]: ...


class LexiconProvider:
    """Deterministic rule/gazetteer provider (the desk-scale default)."""

    def __init__(self, gazetteer: Gazetteer):
        self.name = "lexicon"
        self.gazetteer = gazetteer

    def classify(self, sentences: list[str]) -> list[tuple[str, float]]:
        return [classify_sentence(s) for s in sentences]

    def detect(self, body: str, comment_id: str) -> list[KeywordMention]:
        return detect_keywords(body, self.gazetteer, comment_id)


def _check_spans(structured: StructuredComment, body_bytes: bytes) -> None:
    n = len(body_bytes)
    prev_end = 0
    for s in structured.sentences:
        if not (0 <= s.start < s.end <= n) or s.start < prev_end:
            raise ValueError(f"sentence span ({s.start},{s.end}) invalid")
        body_bytes[s.start : s.end].decode("utf-8")  # must land on char boundaries
        prev_end = s.end
    per_kind: dict[str, list[tuple[int, int]]] = {}
    for m in structured.mentions:
        if not (0 <= m.start < m.end <= n):
            raise ValueError(f"mention span ({m.start},{m.end}) out of range")
        body_bytes[m.start : m.end].decode("utf-8")
        spans = per_kind.setdefault(m.kind, [])
        if any(m.start < e and s < m.end for s, e in spans):
            raise ValueError(f"overlapping {m.kind} mentions at {m.start}")
        spans.append((m.start, m.end))


def structure_comment(comment: Comment, provider: ClassifierProvider) -> StructuredComment:
    """Segment, classify, and detect keywords for one retained comment.

    Pure function of (comment body, provider configuration). Provider
    failures and span-contract violations surface as StructuringError
    carrying the comment id.
    """
    body = nfc(comment.body)
    spans = segment(body)
    body_bytes = body.encode("utf-8")
    texts = [body_bytes[s:e].decode("utf-8") for s, e in spans]
    try:
        labels = provider.classify(texts)
        mentions = provider.detect(body, comment.id)
    except ConfigurationError:
        raise
    except Exception as exc:
        raise StructuringError(comment.id, f"provider {provider.name!r} failed: {exc}") from exc
    if len(labels) != len(texts):
        raise StructuringError(comment.id, "provider returned wrong number of labels")
    sentences = []
    for idx, ((start, end), text, (label, conf)) in enumerate(zip(spans, texts, labels)):
        if label not in FEEDBACK_LABELS:
            raise StructuringError(comment.id, f"provider returned unknown label {label!r}")
        sentences.append(
            Sentence(
                comment_id=comment.id,
                index=idx,
                start=start,
                end=end,
                text=text,
                label=label,
                confidence=float(conf),
            )
        )
    structured = StructuredComment(comment_id=comment.id, sentences=sentences, mentions=list(mentions))
    try:
        _check_spans(structured, body_bytes)
    except ValueError as exc:
        raise StructuringError(comment.id, str(exc)) from exc
    return structured


def structure_corpus(
    corpus_comments: Iterable[Comment], provider: ClassifierProvider
) -> dict[str, StructuredComment]:
    return {c.id: structure_comment(c, provider) for c in corpus_comments}
