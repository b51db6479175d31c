"""Pipeline and service configuration: JSON file, env overrides, CLI flags.

Precedence (low to high): defaults < config file < DESIGNMINE_* env vars <
explicit CLI flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigurationError
from .ingest import DEFAULT_BOTS, DEFAULT_FLAIR

ENV_PREFIX = "DESIGNMINE_"


@dataclass
class PipelineConfig:
    # artifact paths
    dump: str = "dump.jsonl"
    corpus: str = "corpus.json"
    structured: str = "structured.json"
    taxonomy: str = "taxonomy.json"
    index: str = "index.json"
    gazetteer: str = "gazetteer.txt"
    naming: str = "naming.txt"
    maps_dir: str = "maps"
    # ingest
    flair: str = DEFAULT_FLAIR
    bots: list[str] = field(default_factory=lambda: list(DEFAULT_BOTS))
    # structuring
    provider: str = "lexicon"
    # clustering
    k_ui: int = 8
    k_ve: int = 6
    seed: int = 0
    max_iter: int = 100
    tol: float = 1e-6
    # scoring
    w_ui: float = 0.4
    w_ve: float = 0.6
    # service
    host: str = "127.0.0.1"
    port: int = 8800
    recommend_n: int = 5
    recommend_seed: int = 0
    dwell_threshold_ms: int = 5000
    history_depth: int = 50
    title_keywords: int = 5
    title_seed: int = 0

    def validate(self) -> None:
        if self.w_ui < 0 or self.w_ve < 0 or self.w_ui + self.w_ve <= 0:
            raise ConfigurationError("weights must be non-negative with a positive sum")
        if self.k_ui < 1 or self.k_ve < 1:
            raise ConfigurationError("cluster counts must be positive")
        if self.provider not in ("lexicon",):
            raise ConfigurationError(f"unknown provider {self.provider!r}")

    def to_payload(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _coerce(raw: str, target_type) -> object:
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    if target_type is list:
        return [part.strip() for part in raw.split(",") if part.strip()]
    return raw


def load_config(path: str | None = None, env: dict | None = None) -> PipelineConfig:
    cfg = PipelineConfig()
    if path:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(PipelineConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        for key, value in data.items():
            setattr(cfg, key, value)
    env = os.environ if env is None else env
    for f in fields(PipelineConfig):
        env_key = ENV_PREFIX + f.name.upper()
        if env_key in env:
            base = type(getattr(cfg, f.name))
            setattr(cfg, f.name, _coerce(env[env_key], base))
    cfg.validate()
    return cfg
