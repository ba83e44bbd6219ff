"""Local knowledge-base snapshot with exact, fuzzy, and document search.

Replaces the external search stack with one in-process index exposing the
three access paths candidate generation needs: case-insensitive exact
lookup over names/redirects/disambiguations, fuzzy name search scored by
normalized character edit distance, and tf-idf cosine search over entity
descriptions (tf = raw count, idf = ln(1 + N/df)).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .errors import DuplicateKbId, MalformedInput
from .strings import index_tokens, levenshtein, normalize_name

FUZZY_SINGLE_TOKEN_MAX_EDITS = 2


@dataclass(frozen=True)
class KbEntity:
    kb_id: str
    canonical_name: str
    aliases: frozenset = frozenset()
    links_count: int = 0
    description: str = ""
    redirect_titles: frozenset = frozenset()
    disambiguation_titles: frozenset = frozenset()
    english_name: str | None = None

    def __post_init__(self):
        if self.canonical_name not in self.aliases:
            object.__setattr__(self, "aliases",
                               frozenset(self.aliases) | {self.canonical_name})

    def searchable_names(self):
        return self.aliases | self.redirect_titles | self.disambiguation_titles

    def title_names(self):
        """Names treated as page titles: canonical + redirect + disambig."""
        return ({self.canonical_name} | self.redirect_titles
                | self.disambiguation_titles)


@dataclass
class AuxTables:
    """Abbreviations, simplified/traditional variants, translation lexicon."""
    abbreviations: dict = field(default_factory=dict)  # norm -> set of full
    zh_variants: dict = field(default_factory=dict)    # norm -> set (both ways)
    translations: dict = field(default_factory=dict)   # norm -> english

    def expand_abbreviation(self, text):
        return sorted(self.abbreviations.get(normalize_name(text), ()))

    def variant_forms(self, text):
        return sorted(self.zh_variants.get(normalize_name(text), ()))

    def translate(self, text, language):
        if language == "ENG":
            return text
        return self.translations.get(normalize_name(text))


def hot_bin(links_count):
    """Popularity proxy: min(9, floor(log2(1 + links_count)))."""
    if links_count < 0:
        raise ValueError("links_count must be non-negative")
    return min(9, int(math.log2(1 + links_count)))


class KbIndex:
    """Frozen search structures over a KB snapshot; pure reads after build."""

    def __init__(self, entities, aux=None):
        self.aux = aux if aux is not None else AuxTables()
        self.entities = {}
        for entity in entities:
            if entity.kb_id in self.entities:
                raise DuplicateKbId(entity.kb_id)
            self.entities[entity.kb_id] = entity

        # name -> kb_id sets for exact lookup; token postings for fuzzy
        self._exact = {}
        self._titles = {}
        self._name_ids = {}
        self._postings = {}
        self._single_token_names = set()
        for kb_id, entity in self.entities.items():
            for name in entity.searchable_names():
                norm = normalize_name(name)
                if not norm:
                    continue
                self._exact.setdefault(norm, set()).add(kb_id)
                self._name_ids.setdefault(norm, set()).add(kb_id)
                toks = index_tokens(norm)
                for tok in set(toks) | {norm}:
                    self._postings.setdefault(tok, set()).add(norm)
                if len(toks) == 1:
                    self._single_token_names.add(norm)
            for name in entity.title_names():
                norm = normalize_name(name)
                if norm:
                    self._titles.setdefault(norm, set()).add(kb_id)

        # tf-idf structures over descriptions
        self._desc_tf = {}
        df = Counter()
        for kb_id, entity in self.entities.items():
            terms = Counter(index_tokens(normalize_name(entity.description)))
            if terms:
                self._desc_tf[kb_id] = terms
                df.update(terms.keys())
        n_docs = len(self._desc_tf)
        self.idf = {term: math.log(1.0 + n_docs / count)
                    for term, count in df.items()}
        self._desc_norm = {}
        self._desc_postings = {}
        for kb_id, terms in self._desc_tf.items():
            sq = 0.0
            for term, tf in terms.items():
                weight = tf * self.idf[term]
                sq += weight * weight
                self._desc_postings.setdefault(term, []).append((kb_id, tf))
            self._desc_norm[kb_id] = math.sqrt(sq)

    def __len__(self):
        return len(self.entities)

    def links_count(self, kb_id):
        return self.entities[kb_id].links_count

    def exact_lookup(self, name):
        """Ids whose alias, redirect, or disambiguation title equals name
        after case folding."""
        return set(self._exact.get(normalize_name(name), ()))

    def title_lookup(self, name):
        """Ids whose page title / redirect / disambiguation equals name."""
        return set(self._titles.get(normalize_name(name), ()))

    def fuzzy_search(self, query, limit):
        """Ranked (kb_id, score) with score 1 - edits/max(lengths).

        Candidate names share at least one index token with the query;
        single-token queries additionally reach single-token names within
        two character edits.  Ties break by links_count then kb_id, and
        exact matches (score 1.0) necessarily rank first.
        """
        if limit < 1:
            raise ValueError("limit must be >= 1")
        qn = normalize_name(query)
        if not qn:
            return []
        qtoks = index_tokens(qn)
        names = set()
        for tok in set(qtoks) | {qn}:
            names |= self._postings.get(tok, set())
        if len(qtoks) == 1:
            for name in self._single_token_names:
                if abs(len(name) - len(qn)) <= FUZZY_SINGLE_TOKEN_MAX_EDITS \
                        and levenshtein(qn, name) \
                        <= FUZZY_SINGLE_TOKEN_MAX_EDITS:
                    names.add(name)
        best = {}
        for name in names:
            score = 1.0 - levenshtein(qn, name) / max(len(qn), len(name))
            for kb_id in self._name_ids[name]:
                if score > best.get(kb_id, -1.0):
                    best[kb_id] = score
        ranked = sorted(best.items(),
                        key=lambda kv: (-kv[1],
                                        -self.links_count(kv[0]), kv[0]))
        return ranked[:limit]

    def _text_vector(self, text):
        """tf-idf weights over the description vocabulary (df=0 terms drop)."""
        weights = {}
        for term, tf in Counter(index_tokens(normalize_name(text))).items():
            idf = self.idf.get(term)
            if idf is not None:
                weights[term] = tf * idf
        return weights

    def document_search(self, document_text, limit):
        """Top entities by tf-idf cosine between text and descriptions."""
        if limit < 1:
            raise ValueError("limit must be >= 1")
        weights = self._text_vector(document_text)
        qnorm = math.sqrt(sum(w * w for w in weights.values()))
        if qnorm == 0.0:
            return []
        scores = {}
        for term, qw in weights.items():
            idf = self.idf[term]
            for kb_id, tf in self._desc_postings.get(term, ()):
                scores[kb_id] = scores.get(kb_id, 0.0) + qw * tf * idf
        ranked = []
        for kb_id, dot in scores.items():
            score = dot / (qnorm * self._desc_norm[kb_id])
            if score > 0.0:
                ranked.append((kb_id, score))
        ranked.sort(key=lambda kv: (-kv[1], kv[0]))
        return ranked[:limit]

    def tfidf_cosine(self, text, kb_id):
        """Cosine between a text and one entity's description."""
        terms = self._desc_tf.get(kb_id)
        if not terms:
            return 0.0
        weights = self._text_vector(text)
        qnorm = math.sqrt(sum(w * w for w in weights.values()))
        if qnorm == 0.0:
            return 0.0
        dot = sum(qw * terms[term] * self.idf[term]
                  for term, qw in weights.items() if term in terms)
        return dot / (qnorm * self._desc_norm[kb_id])

    def hot_bin_of(self, kb_id):
        return hot_bin(self.links_count(kb_id))


def build_index(entities, aux=None):
    return KbIndex(entities, aux)


# ---------------------------------------------------------------------------
# Snapshot and aux-table files

def _escape(text):
    return text.replace("\n", "\\n")


def _unescape(text):
    return text.replace("\\n", "\n")


def _split_set(field_text):
    return frozenset(x for x in field_text.split("|") if x)


def load_kb(path):
    """Read a KB snapshot TSV into KbEntity records."""
    entities = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 8:
                raise MalformedInput(path, line_no,
                                     f"expected 8 fields, got {len(fields)}")
            (kb_id, canonical, aliases, links_s, description,
             redirects, disambigs, english) = fields
            if kb_id in seen:
                raise DuplicateKbId(kb_id)
            seen.add(kb_id)
            try:
                links = int(links_s)
            except ValueError:
                raise MalformedInput(path, line_no,
                                     f"bad links_count {links_s!r}") from None
            entities.append(KbEntity(
                kb_id, canonical, _split_set(aliases), links,
                _unescape(description), _split_set(redirects),
                _split_set(disambigs), english or None))
    return entities


def write_kb(entities, path):
    """Canonical snapshot serialization (sorted by kb_id)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in sorted(entities, key=lambda e: e.kb_id):
            fh.write("\t".join([
                e.kb_id,
                e.canonical_name,
                "|".join(sorted(e.aliases)),
                str(e.links_count),
                _escape(e.description),
                "|".join(sorted(e.redirect_titles)),
                "|".join(sorted(e.disambiguation_titles)),
                e.english_name or "",
            ]) + "\n")


def _load_pairs(path):
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedInput(path, line_no,
                                     f"expected 2 fields, got {len(fields)}")
            pairs.append(fields)
    return pairs


def load_aux(abbrev_path=None, zh_path=None, translation_path=None):
    aux = AuxTables()
    if abbrev_path:
        for short, full in _load_pairs(abbrev_path):
            aux.abbreviations.setdefault(normalize_name(short),
                                         set()).add(full)
    if zh_path:
        for simplified, traditional in _load_pairs(zh_path):
            aux.zh_variants.setdefault(normalize_name(simplified),
                                       set()).add(traditional)
            aux.zh_variants.setdefault(normalize_name(traditional),
                                       set()).add(simplified)
    if translation_path:
        for source, english in _load_pairs(translation_path):
            aux.translations.setdefault(normalize_name(source), english)
    return aux
