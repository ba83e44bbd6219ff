"""Raw (parameter-free) feature indices for the ranking model.

The trainable side (word vectors and the six 10-d projections) lives in
the ranker; this module reduces a (mention, candidate, document) triple
to word ids and quantization bins:

  e1/e2  mention / candidate-name word ids (candidate None marks NIL)
  e3     entity type index            e4  document category index
  e5     hot-value bin (NIL -> 0)     e6  word edit distance bin (NIL -> 9)
  e7     tf-idf cosine bin (NIL -> 0) e8  translated edit distance bin
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..corpus import CATEGORIES, ENTITY_TYPES
from ..strings import normalize_name, word_edit_distance

WORD_DIM = 100
PROJ_DIM = 10
FEATURE_DIM = 2 * WORD_DIM + 6 * PROJ_DIM  # 260


@dataclass(frozen=True)
class RawFeatures:
    mention_word_ids: tuple
    cand_word_ids: tuple | None  # None -> the learned NIL name vector
    type_idx: int
    category_idx: int
    hot_bin: int
    edit_bin: int
    cosine_bin: int
    trans_bin: int


def linking_word_pieces(text, language):
    """Words feeding e1/e2: casefolded whitespace words, chars for CMN."""
    if language == "CMN":
        return [ch for ch in normalize_name(text) if not ch.isspace()]
    return normalize_name(text).split()


def quantize_edit(distance):
    return min(9, distance)


def quantize_cosine(similarity):
    return min(9, int(math.floor(10.0 * similarity)))


def translated_edit_bin(mention_surface, entity, aux, language):
    """e8: edit distance between English translations; 9 when untranslatable."""
    mention_en = aux.translate(mention_surface, language)
    if entity is None:
        return 9
    cand_en = entity.english_name if entity.english_name \
        else aux.translate(entity.canonical_name, language)
    if mention_en is None or cand_en is None:
        return 9
    return quantize_edit(word_edit_distance(mention_en, cand_en, "ENG"))


def raw_features(mention, candidate, document, index, vocab):
    language = document.language
    mention_ids = tuple(vocab.ids(linking_word_pieces(mention.surface,
                                                      language)))
    type_idx = ENTITY_TYPES.index(mention.entity_type)
    category_idx = CATEGORIES.index(document.category)
    if candidate.is_nil:
        return RawFeatures(mention_ids, None, type_idx, category_idx,
                           hot_bin=0, edit_bin=9, cosine_bin=0, trans_bin=9)
    entity = index.entities[candidate.kb_id]
    cand_ids = tuple(vocab.ids(linking_word_pieces(entity.canonical_name,
                                                   language)))
    edit = quantize_edit(word_edit_distance(mention.surface,
                                            entity.canonical_name, language))
    cosine = quantize_cosine(index.tfidf_cosine(document.text,
                                                candidate.kb_id))
    trans = translated_edit_bin(mention.surface, entity, index.aux, language)
    return RawFeatures(mention_ids, cand_ids, type_idx, category_idx,
                       index.hot_bin_of(candidate.kb_id), edit, cosine, trans)
