"""Fusion of the two detectors' outputs into one mention set.

Exact duplicates (same span, type, kind) collapse keeping the higher
confidence.  When two mentions cross (partial overlap, neither nested in
the other) only one survives: higher confidence wins, ties prefer the
longer span and then system A.  Nested or identical-span mentions of
different type/kind coexist.
"""

from __future__ import annotations

from ..corpus import with_confidence


def _crosses(a, b):
    if a.doc_id != b.doc_id:
        return False
    if a.char_end <= b.char_start or b.char_end <= a.char_start:
        return False  # disjoint
    if a.char_start <= b.char_start and b.char_end <= a.char_end:
        return False  # b nested in a
    if b.char_start <= a.char_start and a.char_end <= b.char_end:
        return False  # a nested in b
    return True


def merge_systems(mentions_a, mentions_b):
    dedup = {}
    for system, mentions in ((0, mentions_a), (1, mentions_b)):
        for mention in mentions:
            key = mention.key
            kept = dedup.get(key)
            if kept is None or mention.confidence > kept[0].confidence:
                dedup[key] = (mention, system)
            # equal confidence keeps the earlier (system A) entry
    # higher confidence first; ties longer span, then system A
    ranked = sorted(
        dedup.values(),
        key=lambda ms: (-ms[0].confidence,
                        -(ms[0].char_end - ms[0].char_start),
                        ms[1], ms[0].key))
    result = []
    for mention, _system in ranked:
        if any(_crosses(mention, kept) for kept in result):
            continue
        result.append(mention)
    return sorted(result, key=lambda m: m.key)
