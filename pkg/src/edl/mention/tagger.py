"""Flat-tag mention detector: conditional RNN language model.

P(Y|X) factorizes into per-step distributions over the 21 BIO tags; each
step's GRU consumes the previous tag's embedding concatenated with the
encoder output h_i at the current position, so every factor conditions on
the whole input sentence and the full tag history.
"""

from __future__ import annotations

import numpy as np

from ..nested_codec import FLAT_TAGS, FLAT_TAG_IDS, O_TAG_ID
from ..neural.ops import (GRU_PARAM_NAMES, gru_init, gru_forward,
                          gru_backward, log_softmax, softmax_xent)
from ..neural.params import ParameterStore, glorot, uniform_init
from .encoder import add_encoder_params, encode_forward, encode_backward

NUM_TAGS = len(FLAT_TAGS)  # 21
BOS_TAG = NUM_TAGS  # row in the tag embedding table reserved for start


def _tag_fields(tag):
    if tag == "O":
        return None
    prefix, entity_type, kind = tag.split("-")
    return prefix, entity_type, kind


def transition_mask(allow_nominal=True):
    """allowed[prev, next] over tag ids; row NUM_TAGS is the BOS row.

    I-t-k may only follow B-t-k or I-t-k; everything else is free unless
    nominal tags are disabled entirely.
    """
    allowed = np.ones((NUM_TAGS + 1, NUM_TAGS), dtype=bool)
    for nxt_id, nxt in enumerate(FLAT_TAGS):
        fields = _tag_fields(nxt)
        if fields is None:
            continue
        prefix, entity_type, kind = fields
        if not allow_nominal and kind == "NOM":
            allowed[:, nxt_id] = False
            continue
        if prefix == "I":
            for prev_id in range(NUM_TAGS + 1):
                if prev_id == NUM_TAGS:
                    allowed[prev_id, nxt_id] = False
                    continue
                prev_fields = _tag_fields(FLAT_TAGS[prev_id])
                if prev_fields is None or prev_fields[1:] != (entity_type,
                                                              kind):
                    allowed[prev_id, nxt_id] = False
    return allowed


def _gru_view(store, prefix):
    return {k: store[f"{prefix}.{k}"] for k in GRU_PARAM_NAMES}


def _gru_accumulate(store, prefix, grads):
    for k, g in grads.items():
        store.add_grad(f"{prefix}.{k}", g)


class Tagger:
    def __init__(self, config, vocab_size):
        self.config = config
        self.vocab_size = vocab_size

    def init_params(self, seed):
        rng = np.random.default_rng(seed)
        cfg = self.config
        store = ParameterStore()
        add_encoder_params(store, rng, cfg, self.vocab_size)
        store.add("emb.tag",
                  uniform_init(rng, (NUM_TAGS + 1, cfg.embed_dim)))
        gru = gru_init(rng, cfg.embed_dim + cfg.feature_maps, cfg.gru_dim)
        for k in GRU_PARAM_NAMES:
            store.add(f"dec.gru.{k}", gru[k])
        store.add("out.W", glorot(rng, (cfg.gru_dim, NUM_TAGS)))
        store.add("out.b", np.zeros(NUM_TAGS))
        return store

    def encode(self, store, token_ids):
        h, _ = encode_forward(store, self.config, token_ids)
        return h

    def initial_state(self):
        return np.zeros(self.config.gru_dim)

    def step(self, store, state, prev_tag, h_i):
        """Log-probabilities over the 21 tags plus the advanced state."""
        inp = np.concatenate([store["emb.tag"][prev_tag], h_i])
        new_state, _ = gru_forward(state, inp, _gru_view(store, "dec.gru"))
        logits = new_state @ store["out.W"] + store["out.b"]
        return log_softmax(logits), new_state

    def loss_and_grads(self, store, token_ids, tag_ids):
        """Sum of per-step cross-entropies; accumulates gradients."""
        cfg = self.config
        h, enc_cache = encode_forward(store, cfg, token_ids)
        t_len = len(token_ids)
        state = self.initial_state()
        steps = []
        loss = 0.0
        prev = BOS_TAG
        gru_params = _gru_view(store, "dec.gru")
        for i in range(t_len):
            inp = np.concatenate([store["emb.tag"][prev], h[i]])
            new_state, gru_cache = gru_forward(state, inp, gru_params)
            logits = new_state @ store["out.W"] + store["out.b"]
            step_loss, dlogits = softmax_xent(logits, tag_ids[i])
            loss += step_loss
            steps.append((prev, new_state, gru_cache, dlogits))
            state = new_state
            prev = tag_ids[i]

        dh = np.zeros_like(h)
        dstate = np.zeros(cfg.gru_dim)
        demb_tag = store.grad("emb.tag")
        for i in range(t_len - 1, -1, -1):
            prev, new_state, gru_cache, dlogits = steps[i]
            store.add_grad("out.W", np.outer(new_state, dlogits))
            store.add_grad("out.b", dlogits)
            dnew = dlogits @ store["out.W"].T + dstate
            dstate, dinp, gru_grads = gru_backward(dnew, gru_cache)
            _gru_accumulate(store, "dec.gru", gru_grads)
            demb_tag[prev] += dinp[:cfg.embed_dim]
            dh[i] += dinp[cfg.embed_dim:]
        encode_backward(store, cfg, enc_cache, dh)
        return loss

    # -- decoding ----------------------------------------------------------

    def _combined_step(self, stores, states, prev_tag, hs, position):
        logps = []
        new_states = []
        for store, state, h in zip(stores, states, hs):
            logp, new_state = self.step(store, state, prev_tag, h[position])
            logps.append(logp)
            new_states.append(new_state)
        mean = np.mean(logps, axis=0)
        mean -= np.log(np.exp(mean - mean.max()).sum()) + mean.max()
        return mean, tuple(new_states)

    def beam_decode(self, stores, token_ids, beam_width=None,
                    allow_nominal=None):
        """Highest-scoring BIO-consistent tag sequence under the ensemble.

        Returns (tag_ids, score) where score is the sum of combined
        per-step log-probabilities of the surviving path.
        """
        cfg = self.config
        if beam_width is None:
            beam_width = cfg.beam_width
        if allow_nominal is None:
            allow_nominal = cfg.allow_nominal
        mask = transition_mask(allow_nominal)
        hs = [self.encode(store, token_ids) for store in stores]
        init_states = tuple(self.initial_state() for _ in stores)
        beams = [(0.0, (), BOS_TAG, init_states)]
        for position in range(len(token_ids)):
            expansions = []
            for beam_idx, (score, path, prev, states) in enumerate(beams):
                logp, new_states = self._combined_step(
                    stores, states, prev, hs, position)
                allowed = mask[prev]
                for tag in np.flatnonzero(allowed):
                    expansions.append((score + logp[tag], beam_idx,
                                       int(tag), new_states))
            expansions.sort(key=lambda e: (-e[0], e[1], e[2]))
            beams = [(score, beams[beam_idx][1] + (tag,), tag, states)
                     for score, beam_idx, tag, states
                     in expansions[:beam_width]]
        best_score, best_path, _, _ = beams[0]
        return list(best_path), best_score

    def sequence_logprob(self, stores, token_ids, tag_ids,
                         allow_nominal=None):
        """Masked ensemble score of a given tag path (``-inf`` if illegal)."""
        if allow_nominal is None:
            allow_nominal = self.config.allow_nominal
        mask = transition_mask(allow_nominal)
        hs = [self.encode(store, token_ids) for store in stores]
        states = tuple(self.initial_state() for _ in stores)
        prev = BOS_TAG
        total = 0.0
        for i, tag in enumerate(tag_ids):
            if not mask[prev, tag]:
                return -np.inf
            logp, states = self._combined_step(stores, states, prev, hs, i)
            total += logp[tag]
            prev = tag
        return total
