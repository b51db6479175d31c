"""Published JSON Schemas for the service payloads.

Contract tests validate every served payload against these; the web UI
treats them as the wire format definition.
"""

from __future__ import annotations

SPAN = {
    "type": "object",
    "properties": {
        "start": {"type": "integer", "minimum": 0},
        "end": {"type": "integer", "minimum": 1},
        "canonical": {"type": "string", "minLength": 1},
    },
    "required": ["start", "end", "canonical"],
    "additionalProperties": False,
}

SENTENCE = {
    "type": "object",
    "properties": {
        "start": {"type": "integer", "minimum": 0},
        "end": {"type": "integer", "minimum": 1},
        "label": {"enum": ["critique", "suggestion", "rationale", "other"]},
        "confidence": {"type": "number", "minimum": 0, "maximum": 1},
        "highlighted": {"type": "boolean"},
    },
    "required": ["start", "end", "label", "confidence", "highlighted"],
    "additionalProperties": False,
}

CARD = {
    "type": "object",
    "properties": {
        "post_id": {"type": "string", "minLength": 1},
        "title": {"type": "string"},
        "thumbnail": {"type": ["string", "null"]},
        "author": {"type": "string"},
        "created_at": {"type": "integer"},
        "num_comments": {"type": "integer", "minimum": 0},
        "num_ui": {"type": ["integer", "null"], "minimum": 0},
        "num_ve": {"type": ["integer", "null"], "minimum": 0},
        "score": {"type": ["number", "null"]},
    },
    "required": [
        "post_id", "title", "thumbnail", "author", "created_at",
        "num_comments", "num_ui", "num_ve", "score",
    ],
    "additionalProperties": False,
}

OVERVIEW = {
    "type": "object",
    "properties": {
        "total": {"type": "integer", "minimum": 0},
        "offset": {"type": "integer", "minimum": 0},
        "limit": {"type": "integer", "minimum": 0},
        "facets": {
            "type": "object",
            "properties": {
                "ui": {"type": "array", "items": {"type": "string"}},
                "ve": {"type": "array", "items": {"type": "string"}},
            },
            "required": ["ui", "ve"],
        },
        "active": {"type": "object"},
        "posts": {"type": "array", "items": CARD},
    },
    "required": ["total", "offset", "limit", "facets", "active", "posts"],
    "additionalProperties": False,
}

COMMENT_VIEW = {
    "type": "object",
    "properties": {
        "comment_id": {"type": "string", "minLength": 1},
        "author": {"type": "string"},
        "created_at": {"type": "integer"},
        "body": {"type": "string"},
        "mention_count": {"type": "integer", "minimum": 0},
        "keyword_spans": {"type": "array", "items": SPAN},
        "sentences": {"type": "array", "items": SENTENCE},
    },
    "required": [
        "comment_id", "author", "created_at", "body",
        "mention_count", "keyword_spans", "sentences",
    ],
    "additionalProperties": False,
}

READING = {
    "type": "object",
    "properties": {
        "post": {
            "type": "object",
            "properties": {
                "post_id": {"type": "string"},
                "title": {"type": "string"},
                "body": {"type": "string"},
                "image_refs": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "author": {"type": "string"},
                "created_at": {"type": "integer"},
            },
            "required": ["post_id", "title", "body", "image_refs", "author", "created_at"],
        },
        "active": {"type": "object"},
        "comments": {"type": "array", "items": COMMENT_VIEW},
        "navigation": {
            "type": "object",
            "properties": {"previous_post_id": {"type": ["string", "null"]}},
            "required": ["previous_post_id"],
        },
        "recommendations": {"type": "array", "items": CARD},
    },
    "required": ["post", "active", "comments", "navigation", "recommendations"],
    "additionalProperties": False,
}

RECOMMENDATIONS = {
    "type": "object",
    "properties": {"recommendations": {"type": "array", "items": CARD}},
    "required": ["recommendations"],
    "additionalProperties": False,
}

REPORT = {
    "type": "object",
    "properties": {
        "session_id": {"type": "string"},
        "threshold_ms": {"type": "integer", "minimum": 0},
        "posts_explored": {"type": "integer", "minimum": 0},
        "comments_explored": {"type": "integer", "minimum": 0},
        "subjects": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "subject_id": {"type": "string"},
                    "subject_kind": {"enum": ["post", "comment"]},
                    "total_ms": {"type": "integer", "minimum": 0},
                    "max_continuous_ms": {"type": "integer", "minimum": 0},
                    "explored": {"type": "boolean"},
                },
                "required": [
                    "subject_id", "subject_kind", "total_ms",
                    "max_continuous_ms", "explored",
                ],
            },
        },
    },
    "required": ["session_id", "threshold_ms", "posts_explored", "comments_explored", "subjects"],
    "additionalProperties": False,
}

MAP_NODE = {
    "type": "object",
    "properties": {
        "node_id": {"type": "string", "minLength": 1},
        "title": {"type": "string"},
        "note": {"type": ["string", "null"]},
        "link": {
            "type": ["object", "null"],
            "properties": {
                "post_id": {"type": "string"},
                "comment_id": {"type": "string"},
            },
            "required": ["post_id", "comment_id"],
        },
        "children": {"type": "array", "items": {"type": "string"}},
        "created_at": {"type": "integer"},
    },
    "required": ["node_id", "title", "note", "link", "children", "created_at"],
    "additionalProperties": False,
}

MAP_DOCUMENT = {
    "type": "object",
    "properties": {
        "schema": {"const": "mindmap/v1"},
        "map_id": {"type": "string", "minLength": 1},
        "root": {"type": "string", "minLength": 1},
        "nodes": {"type": "array", "items": MAP_NODE, "minItems": 1},
        "revision": {"type": "integer", "minimum": 0},
    },
    "required": ["schema", "map_id", "root", "nodes"],
    "additionalProperties": False,
}
