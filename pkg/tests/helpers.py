"""Independent oracles shared by unit and acceptance tests.

These deliberately re-derive results by brute force (exhaustive
enumeration, permutation search) so the implementations they check can
never share code with them.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np

from edl import nested_codec as codec
from edl.mention.tagger import BOS_TAG, NUM_TAGS, transition_mask
from edl.mention.seq2seq import BOS_SYMBOL, EOS_ID, Z_ID, output_length_cap


def brute_force_assignment(matrix):
    """Max-total one-to-one assignment by trying every permutation."""
    matrix = np.asarray(matrix, dtype=float)
    m, n = matrix.shape
    best = 0.0 if min(m, n) == 0 else -np.inf
    if m <= n:
        for perm in permutations(range(n), m):
            best = max(best, sum(matrix[i, perm[i]] for i in range(m)))
    else:
        for perm in permutations(range(m), n):
            best = max(best, sum(matrix[perm[j], j] for j in range(n)))
    return best


def brute_force_ceaf_plus(gold_links, system_links):
    """CEAF-plus P/R/F via exhaustive cluster alignment."""
    def clusters(links):
        grouped = {}
        for link in links:
            key = ("nil", link.target.nil_cluster) if link.target.is_nil \
                else ("kb", link.target.kb_id)
            grouped.setdefault(key, set()).add(link.mention.key)
        return [(key[0] == "nil", key[1], members)
                for key, members in sorted(grouped.items())]

    def phi(g, s):
        if g[0] != s[0] or (not g[0] and g[1] != s[1]):
            return 0.0
        return float(len(g[2] & s[2]))

    gold = clusters(gold_links)
    system = clusters(system_links)
    matrix = np.array([[phi(g, s) for s in system] for g in gold]) \
        if gold and system else np.zeros((0, 0))
    total = brute_force_assignment(matrix) if matrix.size else 0.0
    gold_total = len({l.mention.key for l in gold_links})
    system_total = len({l.mention.key for l in system_links})
    p = total / system_total if system_total else 0.0
    r = total / gold_total if gold_total else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def exhaustive_best_tagging(model, stores, token_ids, allow_nominal=True):
    """Best masked tag sequence by enumerating all NUM_TAGS^T paths.

    Shares only the per-step distribution with the beam decoder; the
    search itself is exhaustive depth-first recursion.
    """
    mask = transition_mask(allow_nominal)
    hs = [model.encode(store, token_ids) for store in stores]
    t_len = len(token_ids)
    best = [-np.inf, None]

    def rec(states, prev, depth, score, path):
        if depth == t_len:
            if score > best[0]:
                best[0], best[1] = score, path
            return
        logp, new_states = model._combined_step(stores, states, prev, hs,
                                                depth)
        for tag in range(NUM_TAGS):
            if mask[prev, tag]:
                rec(new_states, tag, depth + 1, score + logp[tag],
                    path + (tag,))

    rec(tuple(model.initial_state() for _ in stores), BOS_TAG, 0, 0.0, ())
    return list(best[1]), best[0]


def exhaustive_best_symbols(model, stores, token_ids, allowed_symbols,
                            allow_nominal=True):
    """Best constrained symbol sequence by exhaustive recursion."""
    t_len = len(token_ids)
    cap = output_length_cap(t_len)
    hs = [model.encode(store, token_ids) for store in stores]
    best = [-np.inf, None]

    def rec(states, prev, placed, depth, score, path):
        if depth == cap:
            return
        mask = model.symbol_mask(placed, t_len, cap - depth,
                                 allow_nominal, allowed_symbols)
        logp, new_states = model._combined_step(stores, states, prev, hs)
        for sym in np.flatnonzero(mask):
            sym = int(sym)
            new_score = score + logp[sym]
            if sym == EOS_ID:
                if new_score > best[0]:
                    best[0], best[1] = new_score, path + (sym,)
                continue
            rec(new_states, sym, placed + (1 if sym == Z_ID else 0),
                depth + 1, new_score, path + (sym,))

    rec(tuple(model.initial_state() for _ in stores), BOS_SYMBOL,
        0, 0, 0.0, ())
    return list(best[1]), best[0]


def total_sequence_probability(model, store, token_ids, depth_limit):
    """Sum of P(Y|X) over every complete tag sequence (no masking)."""
    hs = [model.encode(store, token_ids)]
    total = [0.0]

    def rec(states, prev, depth, logprob):
        if depth == depth_limit:
            total[0] += np.exp(logprob)
            return
        logp, new_states = model._combined_step([store], states, prev, hs,
                                                depth)
        for tag in range(NUM_TAGS):
            rec(new_states, tag, depth + 1, logprob + logp[tag])

    rec((model.initial_state(),), BOS_TAG, 0, 0.0)
    return total[0]


def span_f1(predicted_sets, gold_sets):
    """Micro span F1 over parallel lists of span sets."""
    tp = fp = fn = 0
    for got, gold in zip(predicted_sets, gold_sets):
        tp += len(got & gold)
        fp += len(got - gold)
        fn += len(gold - got)
    return 2 * tp / max(2 * tp + fp + fn, 1)
