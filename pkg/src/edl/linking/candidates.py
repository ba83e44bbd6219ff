"""Candidate generation: queries -> searches -> candidate list (+ NIL).

Result1 unions exact and fuzzy name search over all expanded queries;
Result2 searches descriptions with the whole document.  The list is
topN(Result1) + (Result1 intersect Result2) + exact page-title matches
per query, with one NIL candidate always appended.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import EmptyInput
from .queries import expand_queries

TOP_N_BY_LANGUAGE = {"ENG": 3, "SPA": 3, "CMN": 30}
FUZZY_LIMIT = 20
DOC_SEARCH_LIMIT = 20


@dataclass(frozen=True)
class Candidate:
    kb_id: str | None = None

    @property
    def is_nil(self):
        return self.kb_id is None

    def render(self):
        return "NIL" if self.is_nil else self.kb_id


NIL = Candidate(None)


def document_result(index, document, limit=DOC_SEARCH_LIMIT):
    """Result2 ids for a document; compute once per document."""
    return {kb_id for kb_id, _ in index.document_search(document.text, limit)}


def generate_with_diagnostics(mention, document, index,
                              all_mentions_in_doc=(), top_n=None,
                              fuzzy_limit=FUZZY_LIMIT, doc_result=None,
                              queries=None):
    """Ordered candidate list for one mention (NIL last) plus diagnostics.

    ``doc_result`` may carry a precomputed ``document_result``;
    ``queries`` a precomputed QueryList.  Diagnostics expose the expanded
    queries, Result1 scores, the Result1/Result2 intersection, and the
    exact-title matches.
    """
    language = document.language
    if top_n is None:
        top_n = TOP_N_BY_LANGUAGE[language]
    if queries is None:
        queries = expand_queries(mention, all_mentions_in_doc,
                                 index.aux, language)
    if doc_result is None:
        doc_result = document_result(index, document)

    result1 = {}  # kb_id -> best fuzzy/exact score
    title_ids = set()
    for query in queries:
        for kb_id in index.exact_lookup(query):
            result1[kb_id] = 1.0
        for kb_id, score in index.fuzzy_search(query, fuzzy_limit):
            if score > result1.get(kb_id, -1.0):
                result1[kb_id] = score
        title_ids |= index.title_lookup(query)

    ordering = sorted(
        result1,
        key=lambda kb_id: (-result1[kb_id], -index.links_count(kb_id), kb_id))
    chosen = ordering[:top_n]
    seen = set(chosen)
    intersection = set(result1) & doc_result
    for kb_id in ordering[top_n:]:  # Result1 as ranked above
        if kb_id in intersection and kb_id not in seen:
            chosen.append(kb_id)
            seen.add(kb_id)
    for kb_id in sorted(title_ids):
        if kb_id not in seen:
            chosen.append(kb_id)
            seen.add(kb_id)
    candidates = [Candidate(kb_id) for kb_id in chosen] + [NIL]
    diag = {"queries": queries.as_list(), "result1": result1,
            "intersection": intersection, "title_ids": title_ids,
            "top_n": top_n}
    return candidates, diag


def generate_candidates(mention, document, index, all_mentions_in_doc=(),
                        top_n=None, fuzzy_limit=FUZZY_LIMIT,
                        doc_result=None, queries=None):
    candidates, _ = generate_with_diagnostics(
        mention, document, index, all_mentions_in_doc, top_n,
        fuzzy_limit, doc_result, queries)
    return candidates


def candidate_metrics(gold_kb_ids, candidate_lists):
    """Coverage and mean non-NIL list size over aligned input sequences."""
    if not candidate_lists or len(gold_kb_ids) != len(candidate_lists):
        raise EmptyInput("need one gold id per candidate list")
    hits = 0
    total_size = 0
    for gold, candidates in zip(gold_kb_ids, candidate_lists):
        ids = {c.kb_id for c in candidates if not c.is_nil}
        if gold in ids:
            hits += 1
        total_size += len(ids)
    n = len(candidate_lists)
    return {"coverage": hits / n, "avg_count": total_size / n}


def format_candidate_report(per_language):
    """Coverage / avg. count table in the style of the paper's summary."""
    languages = [lang for lang in ("ENG", "CMN", "SPA") if lang
                 in per_language]
    lines = ["test set\t" + "\t".join(languages)]
    lines.append("coverage\t" + "\t".join(
        f"{per_language[lang]['coverage']:.3f}" for lang in languages))
    lines.append("avg. count\t" + "\t".join(
        f"{per_language[lang]['avg_count']:.2f}" for lang in languages))
    return "\n".join(lines)
