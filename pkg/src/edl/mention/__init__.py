from .config import TaggerConfig
from .tagger import Tagger
from .seq2seq import Seq2Seq
from .merge import merge_systems
from .train import train_model, train_ensemble, decode_document
from .vocab import Vocab

__all__ = ["TaggerConfig", "Tagger", "Seq2Seq", "merge_systems",
           "train_model", "train_ensemble", "decode_document", "Vocab"]
