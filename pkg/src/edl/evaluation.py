"""Scoring: discovery P/R/F, strong_all_match, and typed mention CEAF plus.

CEAF aligns system and gold clusters one-to-one (Hungarian assignment on
the pairwise similarity) before counting matched mentions.  The "plus"
similarity additionally zeroes any cluster pair that disagrees on
KB-vs-NIL status or on the KB id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class PrfScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, correct, system_total, gold_total):
        p = correct / system_total if system_total else 0.0
        r = correct / gold_total if gold_total else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        return cls(p, r, f)


def discovery_prf(system_mentions, gold_mentions):
    """Exact (doc, span, type, kind) matching."""
    system_keys = {m.key for m in system_mentions}
    gold_keys = {m.key for m in gold_mentions}
    return PrfScore.from_counts(len(system_keys & gold_keys),
                                len(system_keys), len(gold_keys))


def strong_all_match(system_links, gold_links):
    """Exact span plus same KB id (or mutual NIL, any cluster labels)."""
    gold_by_span = {link.mention.span: link.target for link in gold_links}
    system_by_span = {link.mention.span: link.target
                      for link in system_links}
    correct = 0
    for span, target in system_by_span.items():
        gold_target = gold_by_span.get(span)
        if gold_target is None:
            continue
        if target.is_nil and gold_target.is_nil:
            correct += 1
        elif not target.is_nil and target.kb_id == gold_target.kb_id:
            correct += 1
    return PrfScore.from_counts(correct, len(system_by_span),
                                len(gold_by_span))


def hungarian(similarity, maximize=True):
    """Optimal one-to-one assignment; returns (row->col dict, total)."""
    matrix = np.asarray(similarity, dtype=np.float64)
    if matrix.size == 0:
        return {}, 0.0
    rows, cols = linear_sum_assignment(matrix, maximize=maximize)
    assignment = {int(r): int(c) for r, c in zip(rows, cols)}
    total = float(matrix[rows, cols].sum())
    return assignment, total


def _clusters_by_target(links):
    """Group mention keys by link target.

    KB targets key on the kb_id; NIL targets key on their cluster label.
    Returns (clusters: list[(is_nil, kb_id, set of mention keys)], total).
    """
    grouped = {}
    keys = set()
    for link in links:
        target = link.target
        cluster_key = ("nil", target.nil_cluster) if target.is_nil \
            else ("kb", target.kb_id)
        grouped.setdefault(cluster_key, set()).add(link.mention.key)
        keys.add(link.mention.key)
    clusters = [(cluster_key[0] == "nil",
                 None if cluster_key[0] == "nil" else cluster_key[1],
                 members)
                for cluster_key, members in sorted(grouped.items())]
    return clusters, len(keys)


def ceaf_plus_similarity(gold_cluster, system_cluster):
    """Matched mentions when link status agrees, else 0."""
    g_nil, g_kb, g_members = gold_cluster
    s_nil, s_kb, s_members = system_cluster
    if g_nil != s_nil or (not g_nil and g_kb != s_kb):
        return 0.0
    return float(len(g_members & s_members))


def typed_mention_ceaf_plus(system_links, gold_links):
    gold_clusters, gold_total = _clusters_by_target(gold_links)
    system_clusters, system_total = _clusters_by_target(system_links)
    if not gold_clusters or not system_clusters:
        return PrfScore.from_counts(0, system_total, gold_total)
    matrix = np.array([[ceaf_plus_similarity(g, s) for s in system_clusters]
                       for g in gold_clusters])
    _, total = hungarian(matrix, maximize=True)
    return PrfScore.from_counts(total, system_total, gold_total)


METRIC_NAMES = ("entity discovery", "strong_all_match",
                "typed_mention_ceaf_plus")


def score_all(system_links, gold_links):
    """All three metrics for one (system, gold) pair of link lists."""
    return {
        "entity discovery": discovery_prf(
            [l.mention for l in system_links],
            [l.mention for l in gold_links]),
        "strong_all_match": strong_all_match(system_links, gold_links),
        "typed_mention_ceaf_plus": typed_mention_ceaf_plus(system_links,
                                                           gold_links),
    }


def score_report(system_links, gold_links, language_of_doc=None):
    """Fixed-width P/R/F tables per language plus an ALL row."""
    by_language = {}
    if language_of_doc:
        for link in gold_links:
            lang = language_of_doc.get(link.mention.doc_id)
            if lang:
                by_language.setdefault(lang, ([], []))[1].append(link)
        for link in system_links:
            lang = language_of_doc.get(link.mention.doc_id)
            if lang:
                by_language.setdefault(lang, ([], []))[0].append(link)
    rows = sorted(by_language) + ["ALL"]
    scores = {lang: score_all(*by_language[lang]) for lang in by_language}
    scores["ALL"] = score_all(system_links, gold_links)

    lines = []
    for metric in METRIC_NAMES:
        lines.append(f"== {metric} ==")
        lines.append(f"{'System':8s} {'P':>7s} {'R':>7s} {'F':>7s}")
        for lang in rows:
            s = scores[lang][metric]
            lines.append(f"{lang:8s} {s.precision:7.3f} {s.recall:7.3f} "
                         f"{s.f1:7.3f}")
    return "\n".join(lines), scores
