"""Training loops and ensembling for the mention-detection models.

Per-sentence AdaDelta updates, early stopping on held-out loss, and the
best-dev checkpoint returned.  Ensembles follow the 4/5-split recipe:
the corpus is split evenly into five parts and member i trains on the
four parts excluding part i (which serves as its development set).
"""

from __future__ import annotations

import numpy as np

from .. import nested_codec as codec
from ..errors import EmptyTrainingSet
from ..neural.adadelta import AdaDelta
from .config import TaggerConfig
from .data import extract_sentences, spans_to_mentions
from .seq2seq import Seq2Seq
from .tagger import Tagger
from .vocab import Vocab

MODEL_KINDS = ("crnnlm", "seq2seq")


def build_vocab(sentences):
    return Vocab.build(tok for s in sentences for tok in s.surfaces)


def make_model(kind, config, vocab_size):
    if kind == "crnnlm":
        return Tagger(config, vocab_size)
    if kind == "seq2seq":
        return Seq2Seq(config, vocab_size)
    raise ValueError(f"unknown model kind {kind!r}")


def sentence_targets(kind, sentence):
    """Gold output-id sequence for one sentence."""
    if kind == "crnnlm":
        tags = codec.flatten_to_bio(len(sentence), sentence.spans)
        return [codec.FLAT_TAG_IDS[t] for t in tags]
    symbols = codec.linearize(len(sentence), sentence.spans)
    return [codec.SYMBOL_IDS[s] for s in symbols]


def prepare_examples(kind, sentences, vocab):
    return [(vocab.ids(s.surfaces), sentence_targets(kind, s))
            for s in sentences]


def dataset_loss(model, store, examples):
    """Mean per-output-step cross-entropy over a dataset."""
    total, steps = 0.0, 0
    for token_ids, target_ids in examples:
        store.zero_grads()
        total += model.loss_and_grads(store, token_ids, target_ids)
        steps += len(target_ids)
    store.zero_grads()
    return total / max(steps, 1)


def train_model(kind, train_sentences, dev_sentences, config, vocab=None,
                seed=None, progress=None):
    """Train one model; returns (best ParameterStore, vocab, best_dev_loss)."""
    if not train_sentences:
        raise EmptyTrainingSet("no training sentences")
    if vocab is None:
        vocab = build_vocab(train_sentences)
    if seed is None:
        seed = config.seed
    model = make_model(kind, config, len(vocab))
    train_examples = prepare_examples(kind, train_sentences, vocab)
    dev_examples = prepare_examples(kind, dev_sentences, vocab)
    store = model.init_params(seed)
    optimizer = AdaDelta(store)
    rng = np.random.default_rng(seed + 1)
    best = store.copy()
    best_loss = dataset_loss(model, store, dev_examples)
    bad_epochs = 0
    for epoch in range(config.max_epochs):
        for idx in rng.permutation(len(train_examples)):
            token_ids, target_ids = train_examples[idx]
            store.zero_grads()
            model.loss_and_grads(store, token_ids, target_ids)
            optimizer.step()
        dev_loss = dataset_loss(model, store, dev_examples)
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
    return best, vocab, best_loss


def five_fold_splits(items):
    """Even 5-way split; part sizes differ by at most one item."""
    parts = [items[i::5] for i in range(5)]
    return parts


def train_ensemble(kind, sentences, config, seed=None, progress=None):
    """Five members on 4/5 splits, different seeds; returns (stores, vocab)."""
    if not sentences:
        raise EmptyTrainingSet("no training sentences")
    if seed is None:
        seed = config.seed
    vocab = build_vocab(sentences)
    parts = five_fold_splits(sentences)
    stores = []
    for member in range(5):
        train_set = [s for i, part in enumerate(parts) if i != member
                     for s in part]
        dev_set = parts[member] or train_set
        store, _, _ = train_model(kind, train_set, dev_set, config,
                                  vocab=vocab, seed=seed * 1000 + member,
                                  progress=progress)
        stores.append(store)
    return stores, vocab


def decode_document(kind, model, stores, vocab, document, config):
    """Run one detector ensemble over a document; returns Mentions."""
    mentions = []
    for sentence in extract_sentences([document]):
        token_ids = vocab.ids(sentence.surfaces)
        allow_nominal = config.allow_nominal and sentence.language != "SPA"
        if kind == "crnnlm":
            tag_ids, score = model.beam_decode(
                stores, token_ids, config.beam_width, allow_nominal)
            tags = [codec.FLAT_TAGS[t] for t in tag_ids]
            spans = codec.bio_to_spans(tags)
            confidence = float(np.exp(score / max(len(tag_ids), 1)))
        else:
            spans, confidence = model.decode_spans(
                stores, token_ids, config.beam_width, allow_nominal)
        mentions.extend(spans_to_mentions(sentence, document, spans,
                                          confidence))
    return mentions
