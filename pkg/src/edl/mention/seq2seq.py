"""Nested mention detector: attention encoder-decoder over bracket symbols.

The decoder emits the 22-symbol bracket/placeholder alphabet one symbol at
a time.  Each step attends over the convolutional encoder outputs with a
one-hidden-layer perceptron, advances a GRU with [embedding(y_{t-1}), c_t],
and scores symbols with a second perceptron over
[embedding(y_{t-1}), s_t, c_t].  Decoding is constrained so the emitted
sequence always carries exactly one placeholder per input token.
"""

from __future__ import annotations

import numpy as np

from .. import nested_codec as codec
from ..neural.ops import (GRU_PARAM_NAMES, gru_init, gru_forward,
                          gru_backward, dense_forward, dense_backward,
                          log_softmax, softmax, softmax_xent)
from ..neural.params import ParameterStore, glorot, uniform_init
from .encoder import add_encoder_params, encode_forward, encode_backward

NUM_SYMBOLS = len(codec.SYMBOLS)  # 22
BOS_SYMBOL = NUM_SYMBOLS  # embedding row for the start-of-decode marker
Z_ID = codec.Z_ID
EOS_ID = codec.EOS_ID


def output_length_cap(sentence_length):
    """Maximum legal decode length: T placeholders + 2T brackets + </s>."""
    return 3 * sentence_length + 1


def nominal_symbol_ids():
    return [i for i, sym in enumerate(codec.SYMBOLS) if sym.kind == "NOM"]


def _gru_view(store, prefix):
    return {k: store[f"{prefix}.{k}"] for k in GRU_PARAM_NAMES}


class Seq2Seq:
    def __init__(self, config, vocab_size):
        self.config = config
        self.vocab_size = vocab_size

    def init_params(self, seed):
        rng = np.random.default_rng(seed)
        cfg = self.config
        store = ParameterStore()
        add_encoder_params(store, rng, cfg, self.vocab_size)
        store.add("emb.sym",
                  uniform_init(rng, (NUM_SYMBOLS + 1, cfg.embed_dim)))
        store.add("att.W1",
                  glorot(rng, (cfg.gru_dim + cfg.feature_maps, cfg.att_dim)))
        store.add("att.b1", np.zeros(cfg.att_dim))
        store.add("att.W2", glorot(rng, (cfg.att_dim, 1)))
        store.add("att.b2", np.zeros(1))
        gru = gru_init(rng, cfg.embed_dim + cfg.feature_maps, cfg.gru_dim)
        for k in GRU_PARAM_NAMES:
            store.add(f"dec.gru.{k}", gru[k])
        g_in = cfg.embed_dim + cfg.gru_dim + cfg.feature_maps
        store.add("outg.W1", glorot(rng, (g_in, cfg.mlp_dim)))
        store.add("outg.b1", np.zeros(cfg.mlp_dim))
        store.add("outg.W2", glorot(rng, (cfg.mlp_dim, NUM_SYMBOLS)))
        store.add("outg.b2", np.zeros(NUM_SYMBOLS))
        return store

    def encode(self, store, token_ids):
        h, _ = encode_forward(store, self.config, token_ids)
        return h

    def initial_state(self):
        return np.zeros(self.config.gru_dim)

    # -- attention ---------------------------------------------------------

    def attention(self, store, s_prev, h):
        """Context c = sum_i alpha_i h_i with alpha = softmax(f(s_prev, h_i))."""
        c, alpha, _ = self._attention_forward(store, s_prev, h)
        return c, alpha

    def _attention_forward(self, store, s_prev, h):
        t_len = h.shape[0]
        att_in = np.concatenate(
            [np.tile(s_prev, (t_len, 1)), h], axis=1)
        hid, hid_cache = dense_forward(att_in, store["att.W1"],
                                       store["att.b1"], "tanh")
        scores, score_cache = dense_forward(hid, store["att.W2"],
                                            store["att.b2"], "identity")
        e = scores[:, 0]
        alpha = softmax(e)
        c = alpha @ h
        return c, alpha, (h, alpha, hid_cache, score_cache)

    def _attention_backward(self, store, cache, dc):
        h, alpha, hid_cache, score_cache = cache
        dalpha = h @ dc
        dh = np.outer(alpha, dc)
        de = alpha * (dalpha - alpha @ dalpha)
        dhid, dw2, db2 = dense_backward(de[:, None], score_cache)
        store.add_grad("att.W2", dw2)
        store.add_grad("att.b2", db2)
        datt_in, dw1, db1 = dense_backward(dhid, hid_cache)
        store.add_grad("att.W1", dw1)
        store.add_grad("att.b1", db1)
        ds_prev = datt_in[:, :self.config.gru_dim].sum(axis=0)
        dh += datt_in[:, self.config.gru_dim:]
        return ds_prev, dh

    # -- one decoder step ----------------------------------------------------

    def _step_forward(self, store, s_prev, prev_sym, h):
        cfg = self.config
        c, _alpha, att_cache = self._attention_forward(store, s_prev, h)
        emb = store["emb.sym"][prev_sym]
        gru_in = np.concatenate([emb, c])
        s_new, gru_cache = gru_forward(s_prev, gru_in,
                                       _gru_view(store, "dec.gru"))
        g_in = np.concatenate([emb, s_new, c])
        hid, hid_cache = dense_forward(g_in, store["outg.W1"],
                                       store["outg.b1"], "tanh")
        logits, out_cache = dense_forward(hid, store["outg.W2"],
                                          store["outg.b2"], "identity")
        cache = (prev_sym, att_cache, gru_cache, hid_cache, out_cache)
        return logits, s_new, cache

    def _step_backward(self, store, cache, dlogits, ds_new):
        """Backward through one step; returns (ds_prev, dh)."""
        cfg = self.config
        prev_sym, att_cache, gru_cache, hid_cache, out_cache = cache
        dhid, dw2, db2 = dense_backward(dlogits, out_cache)
        store.add_grad("outg.W2", dw2)
        store.add_grad("outg.b2", db2)
        dg_in, dw1, db1 = dense_backward(dhid, hid_cache)
        store.add_grad("outg.W1", dw1)
        store.add_grad("outg.b1", db1)
        e_dim, s_dim = cfg.embed_dim, cfg.gru_dim
        demb = dg_in[:e_dim].copy()
        ds_total = dg_in[e_dim:e_dim + s_dim] + ds_new
        dc = dg_in[e_dim + s_dim:].copy()
        ds_prev, dgru_in, gru_grads = gru_backward(ds_total, gru_cache)
        for k, g in gru_grads.items():
            store.add_grad(f"dec.gru.{k}", g)
        demb += dgru_in[:e_dim]
        dc += dgru_in[e_dim:]
        ds_prev_att, dh = self._attention_backward(store, att_cache, dc)
        ds_prev += ds_prev_att
        store.grad("emb.sym")[prev_sym] += demb
        return ds_prev, dh

    def step(self, store, state, prev_sym, h):
        """Decode-time step: (log-probabilities over 22 symbols, new state)."""
        logits, s_new, _ = self._step_forward(store, state, prev_sym, h)
        return log_softmax(logits), s_new

    # -- training ------------------------------------------------------------

    def loss_and_grads(self, store, token_ids, symbol_ids):
        """Teacher-forced cross-entropy over the full symbol sequence."""
        cfg = self.config
        h, enc_cache = encode_forward(store, cfg, token_ids)
        state = self.initial_state()
        prev = BOS_SYMBOL
        loss = 0.0
        steps = []
        for target in symbol_ids:
            logits, state, cache = self._step_forward(store, state, prev, h)
            step_loss, dlogits = softmax_xent(logits, target)
            loss += step_loss
            steps.append((cache, dlogits))
            prev = target
        dh_total = np.zeros_like(h)
        ds = np.zeros(cfg.gru_dim)
        for cache, dlogits in reversed(steps):
            ds, dh = self._step_backward(store, cache, dlogits, ds)
            dh_total += dh
        encode_backward(store, cfg, enc_cache, dh_total)
        return loss

    # -- constrained beam decoding --------------------------------------------

    def _combined_step(self, stores, states, prev_sym, hs):
        logps = []
        new_states = []
        for store, state, h in zip(stores, states, hs):
            logp, new_state = self.step(store, state, prev_sym, h)
            logps.append(logp)
            new_states.append(new_state)
        mean = np.mean(logps, axis=0)
        mean -= np.log(np.exp(mean - mean.max()).sum()) + mean.max()
        return mean, tuple(new_states)

    def symbol_mask(self, placed, sentence_length, steps_left,
                    allow_nominal=True, allowed_symbols=None):
        """Which symbols may be emitted.

        Placeholders are forbidden once all tokens are covered; </s> is
        allowed only then; brackets must leave room for the outstanding
        placeholders plus the final </s> within ``steps_left``.
        """
        need = sentence_length - placed
        mask = np.ones(NUM_SYMBOLS, dtype=bool)
        mask[Z_ID] = need > 0
        mask[EOS_ID] = need == 0
        for sym_id in range(NUM_SYMBOLS):
            if sym_id in (Z_ID, EOS_ID):
                continue
            if need + 1 > steps_left - 1:
                mask[sym_id] = False
            elif not allow_nominal and codec.SYMBOLS[sym_id].kind == "NOM":
                mask[sym_id] = False
        if allowed_symbols is not None:
            keep = np.zeros(NUM_SYMBOLS, dtype=bool)
            for sym_id in allowed_symbols:
                keep[sym_id] = True
            mask &= keep
        return mask

    def beam_decode(self, stores, token_ids, beam_width=None,
                    allow_nominal=None, allowed_symbols=None):
        """Best constrained symbol sequence (ids, including </s>) + score."""
        cfg = self.config
        if beam_width is None:
            beam_width = cfg.beam_width
        if allow_nominal is None:
            allow_nominal = cfg.allow_nominal
        t_len = len(token_ids)
        cap = output_length_cap(t_len)
        hs = [self.encode(store, token_ids) for store in stores]
        init_states = tuple(self.initial_state() for _ in stores)
        beams = [(0.0, (), BOS_SYMBOL, init_states, 0)]
        finished = []  # (score, path)
        for step_idx in range(cap):
            if not beams:
                break
            steps_left = cap - step_idx
            expansions = []
            for beam_idx, (score, path, prev, states, placed) in \
                    enumerate(beams):
                logp, new_states = self._combined_step(stores, states,
                                                       prev, hs)
                mask = self.symbol_mask(placed, t_len, steps_left,
                                        allow_nominal, allowed_symbols)
                for sym_id in np.flatnonzero(mask):
                    expansions.append((score + logp[sym_id], beam_idx,
                                       int(sym_id), new_states, placed))
            expansions.sort(key=lambda e: (-e[0], e[1], e[2]))
            next_beams = []
            for score, beam_idx, sym_id, states, placed in expansions:
                path = beams[beam_idx][1] + (sym_id,)
                if sym_id == EOS_ID:
                    finished.append((score, path))
                elif len(next_beams) < beam_width:
                    new_placed = placed + (1 if sym_id == Z_ID else 0)
                    next_beams.append((score, path, sym_id, states,
                                       new_placed))
            best_done = max(finished)[0] if finished else -np.inf
            beams = [b for b in next_beams if b[0] > best_done]
        finished.sort(key=lambda f: (-f[0], f[1]))
        best_score, best_path = finished[0]
        return list(best_path), best_score

    def decode_spans(self, stores, token_ids, beam_width=None,
                     allow_nominal=None):
        """Decode, repair, and parse back to token-index spans."""
        path, score = self.beam_decode(stores, token_ids, beam_width,
                                       allow_nominal)
        symbols = codec.repair([codec.SYMBOLS[i] for i in path])
        spans = codec.parse_symbols(len(token_ids), symbols)
        confidence = float(np.exp(score / max(len(path), 1)))
        return spans, confidence

    def sequence_logprob(self, stores, token_ids, symbol_ids,
                         allow_nominal=None, allowed_symbols=None):
        """Ensemble score of a complete constrained path, -inf if illegal."""
        if allow_nominal is None:
            allow_nominal = self.config.allow_nominal
        t_len = len(token_ids)
        cap = output_length_cap(t_len)
        if len(symbol_ids) > cap or not symbol_ids:
            return -np.inf
        hs = [self.encode(store, token_ids) for store in stores]
        states = tuple(self.initial_state() for _ in stores)
        prev = BOS_SYMBOL
        placed = 0
        total = 0.0
        for i, sym_id in enumerate(symbol_ids):
            mask = self.symbol_mask(placed, t_len, cap - i,
                                    allow_nominal, allowed_symbols)
            if not mask[sym_id]:
                return -np.inf
            logp, states = self._combined_step(stores, states, prev, hs)
            total += logp[sym_id]
            prev = sym_id
            if sym_id == Z_ID:
                placed += 1
            if sym_id == EOS_ID:
                return total if i == len(symbol_ids) - 1 else -np.inf
        return -np.inf  # never reached </s>
