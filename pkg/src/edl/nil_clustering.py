"""Rule-based clustering of NIL mentions.

Named NIL mentions share a cluster exactly when their surfaces match
case-insensitively (corpus-wide).  A nominal NIL mention joins the
cluster of the nearest same-type named mention in its document; when that
named mention is linked (non-NIL) or absent, the nominal mention becomes
a singleton cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linking.queries import nearest_named
from .strings import normalize_name


@dataclass(frozen=True)
class NilCluster:
    cluster_id: str
    members: tuple

    def first_member_key(self):
        return min((m.doc_id, m.char_start, m.char_end, m.entity_type,
                    m.kind) for m in self.members)


def cluster_nils(nil_mentions, all_mentions):
    """Partition NIL mentions into clusters (as member lists).

    ``all_mentions`` carries (mention, is_nil) pairs for the whole corpus,
    providing the named mentions rule ii needs.
    """
    nil_keys = {m.key for m in nil_mentions}
    named_groups = {}  # casefolded surface -> member list
    singles = []
    mentions_by_doc = {}
    for mention, _is_nil in all_mentions:
        mentions_by_doc.setdefault(mention.doc_id, []).append(mention)

    for mention in sorted(nil_mentions, key=lambda m: m.key):
        if mention.kind == "NAM":
            named_groups.setdefault(normalize_name(mention.surface),
                                    []).append(mention)
    for mention in sorted(nil_mentions, key=lambda m: m.key):
        if mention.kind != "NOM":
            continue
        named = nearest_named(mention,
                              mentions_by_doc.get(mention.doc_id, ()),
                              entity_type=mention.entity_type)
        if named is not None and named.key in nil_keys:
            named_groups[normalize_name(named.surface)].append(mention)
        else:
            singles.append([mention])
    clusters = [members for _, members in sorted(named_groups.items())]
    clusters.extend(singles)
    return clusters


def assign_cluster_ids(clusters):
    """NIL0001, NIL0002, ... ordered by each cluster's first member."""
    def first_key(members):
        return min((m.doc_id, m.char_start, m.char_end, m.entity_type,
                    m.kind) for m in members)

    ordered = sorted(clusters, key=first_key)
    return [NilCluster(f"NIL{i:04d}", tuple(members))
            for i, members in enumerate(ordered, start=1)]


def cluster_and_label(nil_mentions, all_mentions):
    """Convenience: mention key -> NIL cluster id for every NIL mention."""
    clusters = assign_cluster_ids(cluster_nils(nil_mentions, all_mentions))
    labels = {}
    for cluster in clusters:
        for mention in cluster.members:
            labels[mention.key] = cluster.cluster_id
    return labels, clusters
