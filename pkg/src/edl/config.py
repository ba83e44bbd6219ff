"""Pipeline configuration: key=value file plus command-line overrides."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields

from .errors import MalformedInput
from .linking.ranker import RankerConfig
from .mention.config import TaggerConfig

PATH_KEYS = ("kb", "abbreviations", "zh_variants", "translations",
             "index_dir", "model_dir", "documents", "gold",
             "md_documents", "md_gold", "el_documents", "el_gold",
             "output")


@dataclass
class PipelineConfig:
    seed: int = 7
    system_id: str = "edl1"
    workers: int = 1
    model_kinds: tuple = ("crnnlm", "seq2seq")
    top_n: dict = field(default_factory=lambda: {"ENG": 3, "SPA": 3,
                                                 "CMN": 30})
    md: TaggerConfig = field(default_factory=TaggerConfig)
    el: RankerConfig = field(default_factory=RankerConfig)
    paths: dict = field(default_factory=dict)

    def path(self, key, required=False):
        value = self.paths.get(key)
        if required and not value:
            raise MalformedInput("<config>", 0, f"missing path {key!r}")
        return value

    def config_hash(self):
        items = [f"seed={self.seed}", f"kinds={','.join(self.model_kinds)}",
                 f"top_n={sorted(self.top_n.items())}",
                 f"md={self.md.config_hash()}",
                 f"el={self.el.config_hash()}"]
        return hashlib.sha256(";".join(items).encode()).hexdigest()[:12]


def _coerce(current, raw):
    if isinstance(current, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return raw


def parse_config_lines(lines, source="<config>"):
    mapping = {}
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MalformedInput(source, line_no, f"expected key=value, "
                                                  f"got {line!r}")
        key, _, value = line.partition("=")
        mapping[key.strip()] = value.strip()
    return mapping


def load_config(path=None, overrides=()):
    """Build a PipelineConfig from an optional file and key=value overrides."""
    mapping = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            mapping.update(parse_config_lines(fh, path))
    for item in overrides:
        mapping.update(parse_config_lines([item], "<override>"))

    cfg = PipelineConfig()
    md_fields = {f.name: f for f in fields(TaggerConfig)}
    el_fields = {f.name: f for f in fields(RankerConfig)}
    for key, raw in mapping.items():
        if key.startswith("md."):
            name = key[3:]
            if name not in md_fields:
                raise MalformedInput("<config>", 0, f"unknown key {key!r}")
            setattr(cfg.md, name, _coerce(getattr(cfg.md, name), raw))
        elif key.startswith("el."):
            name = key[3:]
            if name not in el_fields:
                raise MalformedInput("<config>", 0, f"unknown key {key!r}")
            setattr(cfg.el, name, _coerce(getattr(cfg.el, name), raw))
        elif key in PATH_KEYS:
            cfg.paths[key] = raw
        elif key == "seed":
            cfg.seed = int(raw)
        elif key == "system_id":
            cfg.system_id = raw
        elif key == "workers":
            cfg.workers = int(raw)
        elif key == "model_kinds":
            cfg.model_kinds = tuple(k.strip() for k in raw.split(",") if k)
        elif key.startswith("top_n_"):
            cfg.top_n[key[len("top_n_"):].upper()] = int(raw)
        else:
            raise MalformedInput("<config>", 0, f"unknown key {key!r}")
    cfg.md.seed = cfg.seed
    cfg.el.seed = cfg.seed
    return cfg
