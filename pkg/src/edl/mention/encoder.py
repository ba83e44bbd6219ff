"""Convolutional sentence encoder shared by both detection models.

Embedding lookup followed by a stack of same-padded 1-d convolutions with
tanh after each layer, so the per-position representation h_i keeps the
input length.
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptySentence
from ..neural.ops import conv1d_forward, conv1d_backward
from ..neural.params import glorot, uniform_init


def add_encoder_params(store, rng, config, vocab_size):
    store.add("emb.tok", uniform_init(rng, (vocab_size, config.embed_dim)))
    for layer in range(config.conv_layers):
        d_in = config.embed_dim if layer == 0 else config.feature_maps
        store.add(f"enc.conv{layer}.K",
                  glorot(rng, (config.filter_size, d_in, config.feature_maps)))
        store.add(f"enc.conv{layer}.b", np.zeros(config.feature_maps))


def encode_forward(store, config, token_ids):
    """Per-position representations h (T, feature_maps) plus backward cache."""
    if len(token_ids) == 0:
        raise EmptySentence("cannot encode an empty sentence")
    token_ids = np.asarray(token_ids, dtype=np.intp)
    x = store["emb.tok"][token_ids]
    caches = []
    out = x
    for layer in range(config.conv_layers):
        pre, conv_cache = conv1d_forward(out, store[f"enc.conv{layer}.K"],
                                         store[f"enc.conv{layer}.b"])
        out = np.tanh(pre)
        caches.append((conv_cache, out))
    return out, (token_ids, caches)


def encode_backward(store, config, cache, dh):
    """Accumulate encoder gradients; dh is the gradient w.r.t. h."""
    token_ids, caches = cache
    grad = np.asarray(dh, dtype=np.float64)
    for layer in range(config.conv_layers - 1, -1, -1):
        conv_cache, out = caches[layer]
        dpre = grad * (1.0 - out * out)
        grad, dkernel, dbias = conv1d_backward(dpre, conv_cache)
        store.add_grad(f"enc.conv{layer}.K", dkernel)
        store.add_grad(f"enc.conv{layer}.b", dbias)
    demb = store.grad("emb.tok")
    np.add.at(demb, token_ids, grad)
