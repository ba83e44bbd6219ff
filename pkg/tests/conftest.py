import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from edl.kb import KbIndex
from edl.mention.config import TaggerConfig
from edl import synth


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_config():
    """Small dims so dense gradient checks and oracles stay fast."""
    return TaggerConfig(conv_layers=2, filter_size=3, feature_maps=6,
                        embed_dim=5, gru_dim=8, att_dim=6, mlp_dim=6,
                        beam_width=5, max_epochs=10, patience=5)


@pytest.fixture(scope="session")
def synth_kb():
    entities, aux = synth.build_kb()
    return entities, aux


@pytest.fixture(scope="session")
def kb_index(synth_kb):
    entities, aux = synth_kb
    return KbIndex(entities, aux)
