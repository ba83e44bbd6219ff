"""Feedforward candidate ranker trained on softmax posteriors.

Each (mention, candidate) pair's 260-d feature vector feeds a two-hidden-
layer sigmoid network producing one matching score; a softmax across a
mention's whole candidate list yields the posterior the training loss
maximizes on the gold candidate.  Word vectors and all six projection
matrices are trained jointly with the network.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, asdict

import numpy as np

from ..errors import EmptyList, EmptyTrainingSet
from ..neural.adadelta import AdaDelta
from ..neural.ops import dense_forward, dense_backward, softmax_xent, softmax
from ..neural.params import ParameterStore, glorot, uniform_init
from .features import FEATURE_DIM, PROJ_DIM, WORD_DIM

PROJECTIONS = (("proj.type", 5), ("proj.cat", 2), ("proj.hot", 10),
               ("proj.edit", 10), ("proj.cos", 10), ("proj.trans", 10))


@dataclass
class RankerConfig:
    hidden1: int = 32
    hidden2: int = 16
    batch_size: int = 8
    max_epochs: int = 100
    patience: int = 10
    seed: int = 0

    @classmethod
    def paper_scale(cls, **overrides):
        base = dict(hidden1=512, hidden2=256)
        base.update(overrides)
        return cls(**base)

    def config_hash(self):
        text = ";".join(f"{k}={v}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:12]


@dataclass
class RankerOutput:
    scores: np.ndarray
    posterior: np.ndarray


class Ranker:
    def __init__(self, config, vocab_size):
        self.config = config
        self.vocab_size = vocab_size

    def init_params(self, seed):
        rng = np.random.default_rng(seed)
        cfg = self.config
        store = ParameterStore()
        store.add("emb.word", uniform_init(rng, (self.vocab_size, WORD_DIM)))
        store.add("emb.nilname", uniform_init(rng, (WORD_DIM,)))
        for name, rows in PROJECTIONS:
            store.add(name, uniform_init(rng, (rows, PROJ_DIM)))
        store.add("mlp.W1", glorot(rng, (FEATURE_DIM, cfg.hidden1)))
        store.add("mlp.b1", np.zeros(cfg.hidden1))
        store.add("mlp.W2", glorot(rng, (cfg.hidden1, cfg.hidden2)))
        store.add("mlp.b2", np.zeros(cfg.hidden2))
        store.add("mlp.W3", glorot(rng, (cfg.hidden2, 1)))
        store.add("mlp.b3", np.zeros(1))
        return store

    def feature_vector(self, store, raw):
        """Concatenated 260-d input for one (mention, candidate) pair."""
        emb = store["emb.word"]
        e1 = emb[list(raw.mention_word_ids)].sum(axis=0) \
            if raw.mention_word_ids else np.zeros(WORD_DIM)
        if raw.cand_word_ids is None:
            e2 = store["emb.nilname"].copy()
        elif raw.cand_word_ids:
            e2 = emb[list(raw.cand_word_ids)].sum(axis=0)
        else:
            e2 = np.zeros(WORD_DIM)
        parts = [e1, e2,
                 store["proj.type"][raw.type_idx],
                 store["proj.cat"][raw.category_idx],
                 store["proj.hot"][raw.hot_bin],
                 store["proj.edit"][raw.edit_bin],
                 store["proj.cos"][raw.cosine_bin],
                 store["proj.trans"][raw.trans_bin]]
        return np.concatenate(parts)

    def _score_forward(self, store, raw):
        x = self.feature_vector(store, raw)
        h1, c1 = dense_forward(x, store["mlp.W1"], store["mlp.b1"], "sigmoid")
        h2, c2 = dense_forward(h1, store["mlp.W2"], store["mlp.b2"],
                               "sigmoid")
        out, c3 = dense_forward(h2, store["mlp.W3"], store["mlp.b3"],
                                "identity")
        return out[0], (raw, c1, c2, c3)

    def _score_backward(self, store, cache, dscore):
        raw, c1, c2, c3 = cache
        dh2, dw3, db3 = dense_backward(np.array([dscore]), c3)
        store.add_grad("mlp.W3", dw3)
        store.add_grad("mlp.b3", db3)
        dh1, dw2, db2 = dense_backward(dh2, c2)
        store.add_grad("mlp.W2", dw2)
        store.add_grad("mlp.b2", db2)
        dx, dw1, db1 = dense_backward(dh1, c1)
        store.add_grad("mlp.W1", dw1)
        store.add_grad("mlp.b1", db1)

        demb = store.grad("emb.word")
        de1 = dx[:WORD_DIM]
        for word_id in raw.mention_word_ids:
            demb[word_id] += de1
        de2 = dx[WORD_DIM:2 * WORD_DIM]
        if raw.cand_word_ids is None:
            store.grad("emb.nilname")[:] += de2
        else:
            for word_id in raw.cand_word_ids:
                demb[word_id] += de2
        offset = 2 * WORD_DIM
        for (name, _rows), idx in zip(
                PROJECTIONS, (raw.type_idx, raw.category_idx, raw.hot_bin,
                              raw.edit_bin, raw.cosine_bin, raw.trans_bin)):
            store.grad(name)[idx] += dx[offset:offset + PROJ_DIM]
            offset += PROJ_DIM

    def scores(self, store, raws):
        if not raws:
            raise EmptyList("no candidates to rank")
        values = []
        caches = []
        for raw in raws:
            value, cache = self._score_forward(store, raw)
            values.append(value)
            caches.append(cache)
        return np.array(values), caches

    def loss_and_grads(self, store, raws, gold_index):
        values, caches = self.scores(store, raws)
        loss, dvalues = softmax_xent(values, gold_index)
        for cache, dvalue in zip(caches, dvalues):
            self._score_backward(store, cache, dvalue)
        return loss


def rank(ranker, store, raws):
    """Scores plus softmax posterior over one candidate list."""
    values, _ = ranker.scores(store, raws)
    return RankerOutput(values, softmax(values))


def mean_posterior(ranker, stores, raws):
    posts = [rank(ranker, store, raws).posterior for store in stores]
    return np.mean(posts, axis=0)


def link(ranker, stores, raws, candidates, index):
    """Ensemble decision: argmax of the mean posterior.

    Ties prefer a KB candidate over NIL, then the higher hot value, then
    the smaller kb_id.  Returns (candidate, confidence, posterior).
    """
    posterior = mean_posterior(ranker, stores, raws)

    def sort_key(k):
        candidate = candidates[k]
        hot = -1 if candidate.is_nil else index.hot_bin_of(candidate.kb_id)
        kb_id = "" if candidate.is_nil else candidate.kb_id
        return (-posterior[k], candidate.is_nil, -hot, kb_id)

    best = min(range(len(candidates)), key=sort_key)
    return candidates[best], float(posterior[best]), posterior


def dataset_loss(ranker, store, instances):
    total = 0.0
    for raws, gold_index in instances:
        store.zero_grads()
        total += ranker.loss_and_grads(store, raws, gold_index)
    store.zero_grads()
    return total / max(len(instances), 1)


def train_ranker(train_instances, dev_instances, config, vocab_size,
                 seed=None, progress=None):
    """Mini-batch AdaDelta with early stopping; returns (best store, loss)."""
    if not train_instances:
        raise EmptyTrainingSet("no linking training instances")
    if seed is None:
        seed = config.seed
    ranker = Ranker(config, vocab_size)
    store = ranker.init_params(seed)
    optimizer = AdaDelta(store)
    rng = np.random.default_rng(seed + 1)
    best = store.copy()
    best_loss = dataset_loss(ranker, store, dev_instances)
    bad_epochs = 0
    batch = config.batch_size
    for epoch in range(config.max_epochs):
        order = rng.permutation(len(train_instances))
        for start in range(0, len(order), batch):
            store.zero_grads()
            chunk = order[start:start + batch]
            for idx in chunk:
                raws, gold_index = train_instances[idx]
                ranker.loss_and_grads(store, raws, gold_index)
            store.scale_grads(1.0 / len(chunk))
            optimizer.step()
        dev_loss = dataset_loss(ranker, store, dev_instances)
        if progress is not None:
            progress(epoch, dev_loss)
        if dev_loss < best_loss - 1e-12:
            best_loss = dev_loss
            best = store.copy()
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= config.patience:
                break
    return best, best_loss


def train_ranker_ensemble(instances, config, vocab_size, seed=None):
    """Five members on 4/5 splits with per-member seeds."""
    if not instances:
        raise EmptyTrainingSet("no linking training instances")
    if seed is None:
        seed = config.seed
    parts = [instances[i::5] for i in range(5)]
    stores = []
    for member in range(5):
        train_set = [inst for i, part in enumerate(parts) if i != member
                     for inst in part]
        dev_set = parts[member] or train_set
        store, _ = train_ranker(train_set, dev_set, config, vocab_size,
                                seed=seed * 1000 + member)
        stores.append(store)
    return stores
