"""Model configuration for the two mention-detection networks."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, asdict


@dataclass
class TaggerConfig:
    """Desk-scale defaults; ``paper_scale`` restores the published sizes."""

    conv_layers: int = 2
    filter_size: int = 3
    feature_maps: int = 32
    embed_dim: int = 32
    gru_dim: int = 64
    att_dim: int = 32
    mlp_dim: int = 32
    beam_width: int = 10
    max_epochs: int = 200
    patience: int = 20
    seed: int = 0
    allow_nominal: bool = True

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.filter_size % 2 != 1:
            raise ValueError("filter_size must be odd")

    @classmethod
    def paper_scale(cls, **overrides):
        base = dict(conv_layers=5, feature_maps=512, embed_dim=100,
                    gru_dim=512, att_dim=512, mlp_dim=512, beam_width=10)
        base.update(overrides)
        return cls(**base)

    def config_hash(self):
        text = ";".join(f"{k}={v}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:12]
