"""Query expansion: rewrite a mention into alternative KB search strings.

Rules, applied in order: the surface itself; longer mentions of the same
document containing it; simplified/traditional Chinese variants;
abbreviation expansion; for nominal mentions the nearest named mention
(which re-runs the longer-mention and abbreviation rules); and a
translation-lexicon lookup whose output re-runs those rules as well.
"""

from __future__ import annotations

from ..strings import normalize_name


class QueryList:
    """Insertion-ordered query strings, deduplicated case-insensitively."""

    def __init__(self):
        self._queries = []
        self._seen = set()

    def add(self, query):
        if not query:
            return
        key = normalize_name(query)
        if key and key not in self._seen:
            self._seen.add(key)
            self._queries.append(query)

    def __iter__(self):
        return iter(self._queries)

    def __len__(self):
        return len(self._queries)

    def __contains__(self, query):
        return normalize_name(query) in self._seen

    def as_list(self):
        return list(self._queries)


def nearest_named(mention, all_mentions, entity_type=None):
    """Closest NAM mention in the same document by midpoint distance.

    Ties go to the earlier mention; ``entity_type`` optionally restricts
    the candidates.  Returns None when nothing qualifies.
    """
    best = None
    best_key = None
    for other in all_mentions:
        if other.kind != "NAM" or other.doc_id != mention.doc_id:
            continue
        if other.key == mention.key:
            continue
        if entity_type is not None and other.entity_type != entity_type:
            continue
        key = (abs(other.midpoint() - mention.midpoint()),
               other.char_start, other.char_end)
        if best_key is None or key < best_key:
            best_key = key
            best = other
    return best


def _containing_mentions(surface, doc_mentions):
    """Longer mention surfaces containing ``surface`` (case-insensitive)."""
    needle = normalize_name(surface)
    out = []
    for other in doc_mentions:
        other_norm = normalize_name(other.surface)
        if len(other_norm) > len(needle) and needle in other_norm:
            out.append(other.surface)
    return sorted(set(out), key=lambda s: (len(s), s))


def expand_queries(mention, all_mentions_in_doc, aux, language):
    """Ordered query strings for one mention."""
    queries = QueryList()
    doc_mentions = [m for m in all_mentions_in_doc
                    if m.doc_id == mention.doc_id]

    def run_base_rules(base):
        queries.add(base)
        for longer in _containing_mentions(base, doc_mentions):  # rule 2
            queries.add(longer)
        for full in aux.expand_abbreviation(base):  # rule 4
            queries.add(full)

    run_base_rules(mention.surface)  # rule 1 + 2 + 4
    for variant in aux.variant_forms(mention.surface):  # rule 3
        queries.add(variant)

    named_base = None
    if mention.kind == "NOM":  # rule 5
        named = nearest_named(mention, doc_mentions)
        if named is not None:
            named_base = named.surface
            run_base_rules(named_base)

    if language in ("CMN", "SPA"):  # rule 6
        translation = aux.translate(mention.surface, language)
        if translation:
            run_base_rules(translation)
        if named_base:
            named_translation = aux.translate(named_base, language)
            if named_translation:
                run_base_rules(named_translation)
    return queries
