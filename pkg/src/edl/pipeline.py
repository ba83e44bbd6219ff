"""End-to-end pipeline commands: index, train, run, evaluate, diagnose."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor

from . import corpus
from .errors import MissingArtifact
from .kb import KbIndex, load_aux, load_kb, write_kb
from .linking.candidates import (document_result, generate_candidates,
                                 generate_with_diagnostics)
from .linking.features import linking_word_pieces, raw_features
from .linking.ranker import (Ranker, link, mean_posterior,
                             train_ranker_ensemble)
from .mention.train import (decode_document, make_model, train_ensemble)
from .mention.merge import merge_systems
from .mention.vocab import Vocab
from .neural.params import ParameterStore
from .nil_clustering import cluster_and_label
from .evaluation import score_report

ENSEMBLE_SIZE = 5


def _index_paths(cfg):
    index_dir = cfg.path("index_dir", required=True)
    return (os.path.join(index_dir, "kb.index"),
            os.path.join(index_dir, "kb.manifest"))


def cmd_kb_index(cfg):
    """Validate the KB snapshot and freeze a canonical index artifact."""
    entities = load_kb(cfg.path("kb", required=True))
    index_path, manifest_path = _index_paths(cfg)
    os.makedirs(os.path.dirname(index_path) or ".", exist_ok=True)
    write_kb(entities, index_path)
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"config_hash={cfg.config_hash()}\n"
                 f"entities={len(entities)}\n")
    return index_path


def load_index(cfg):
    index_path, _ = _index_paths(cfg)
    if not os.path.exists(index_path):
        raise MissingArtifact(f"KB index not built: {index_path}")
    entities = load_kb(index_path)
    aux = load_aux(cfg.path("abbreviations"), cfg.path("zh_variants"),
                   cfg.path("translations"))
    return KbIndex(entities, aux)


def _model_dir(cfg):
    model_dir = cfg.path("model_dir", required=True)
    os.makedirs(model_dir, exist_ok=True)
    return model_dir


def _md_ckpt(model_dir, kind, member):
    return os.path.join(model_dir, f"md.{kind}.{member}.ckpt")


def cmd_train_md(cfg):
    """Train five 4/5-split members per detector kind; save checkpoints."""
    documents = corpus.load_documents(cfg.path("md_documents",
                                               required=True))
    gold = corpus.load_gold(cfg.path("md_gold", required=True))
    from .mention.data import extract_sentences
    sentences = extract_sentences(documents, [g.mention for g in gold])
    model_dir = _model_dir(cfg)
    written = []
    for kind in cfg.model_kinds:
        stores, vocab = train_ensemble(kind, sentences, cfg.md,
                                       seed=cfg.seed)
        for member, store in enumerate(stores):
            path = _md_ckpt(model_dir, kind, member)
            store.save(path, config_hash=cfg.md.config_hash(),
                       seed=cfg.seed * 1000 + member)
            written.append(path)
        vocab.save(os.path.join(model_dir, "md.vocab"))
    return written


def _load_md(cfg):
    model_dir = cfg.path("model_dir", required=True)
    vocab_path = os.path.join(model_dir, "md.vocab")
    if not os.path.exists(vocab_path):
        raise MissingArtifact(f"missing detector vocab: {vocab_path}")
    vocab = Vocab.load(vocab_path)
    ensembles = {}
    for kind in cfg.model_kinds:
        stores = []
        for member in range(ENSEMBLE_SIZE):
            path = _md_ckpt(model_dir, kind, member)
            if not os.path.exists(path):
                raise MissingArtifact(f"missing checkpoint: {path}")
            store, manifest = ParameterStore.load(path)
            if manifest.get("config_hash") != cfg.md.config_hash():
                raise MissingArtifact(
                    f"checkpoint {path} trained under a different config")
            stores.append(store)
        ensembles[kind] = stores
    return ensembles, vocab


def _gather_linking_data(cfg, index, documents, gold):
    """Candidate lists + gold indices for ranker training."""
    docs_by_id = {d.doc_id: d for d in documents}
    mentions_by_doc = {}
    for g in gold:
        mentions_by_doc.setdefault(g.mention.doc_id, []).append(g.mention)
    doc_results = {doc_id: document_result(index, docs_by_id[doc_id])
                   for doc_id in mentions_by_doc if doc_id in docs_by_id}
    gathered = []
    skipped = 0
    for g in gold:
        doc = docs_by_id.get(g.mention.doc_id)
        if doc is None:
            skipped += 1
            continue
        candidates = generate_candidates(
            g.mention, doc, index, mentions_by_doc[g.mention.doc_id],
            top_n=cfg.top_n.get(doc.language),
            doc_result=doc_results[g.mention.doc_id])
        if g.target.is_nil:
            gold_index = len(candidates) - 1
        else:
            ids = [c.kb_id for c in candidates]
            if g.target.kb_id not in ids:
                skipped += 1
                continue
            gold_index = ids.index(g.target.kb_id)
        gathered.append((g.mention, doc, candidates, gold_index))
    return gathered, skipped


def build_linking_vocab(gathered, index):
    pieces = []
    for mention, doc, candidates, _gold in gathered:
        pieces.extend(linking_word_pieces(mention.surface, doc.language))
        for c in candidates:
            if not c.is_nil:
                pieces.extend(linking_word_pieces(
                    index.entities[c.kb_id].canonical_name, doc.language))
    return Vocab.build(pieces)


def cmd_train_el(cfg):
    """Train the five-ranker ensemble on gold links; save checkpoints."""
    index = load_index(cfg)
    documents = corpus.load_documents(cfg.path("el_documents",
                                               required=True))
    gold = corpus.load_gold(cfg.path("el_gold", required=True))
    gathered, skipped = _gather_linking_data(cfg, index, documents, gold)
    if skipped:
        print(f"warning: skipped {skipped} mention(s) whose gold target "
              f"was not generated")
    vocab = build_linking_vocab(gathered, index)
    instances = [
        ([raw_features(mention, c, doc, index, vocab) for c in candidates],
         gold_index)
        for mention, doc, candidates, gold_index in gathered]
    stores = train_ranker_ensemble(instances, cfg.el, len(vocab),
                                   seed=cfg.seed)
    model_dir = _model_dir(cfg)
    written = []
    for member, store in enumerate(stores):
        path = os.path.join(model_dir, f"el.{member}.ckpt")
        store.save(path, config_hash=cfg.el.config_hash(),
                   seed=cfg.seed * 1000 + member)
        written.append(path)
    vocab.save(os.path.join(model_dir, "el.vocab"))
    return written


def _load_el(cfg):
    model_dir = cfg.path("model_dir", required=True)
    vocab_path = os.path.join(model_dir, "el.vocab")
    if not os.path.exists(vocab_path):
        raise MissingArtifact(f"missing ranker vocab: {vocab_path}")
    vocab = Vocab.load(vocab_path)
    stores = []
    for member in range(ENSEMBLE_SIZE):
        path = os.path.join(model_dir, f"el.{member}.ckpt")
        if not os.path.exists(path):
            raise MissingArtifact(f"missing checkpoint: {path}")
        store, manifest = ParameterStore.load(path)
        if manifest.get("config_hash") != cfg.el.config_hash():
            raise MissingArtifact(
                f"checkpoint {path} trained under a different config")
        stores.append(store)
    return stores, vocab


def _detect_mentions(cfg, document, ensembles, vocab):
    """Both detectors + the system fusion for one document."""
    outputs = {}
    for kind, stores in ensembles.items():
        model = make_model(kind, cfg.md, len(vocab))
        outputs[kind] = decode_document(kind, model, stores, vocab,
                                        document, cfg.md)
    if len(outputs) == 2:
        return merge_systems(outputs["crnnlm"], outputs["seq2seq"])
    return next(iter(outputs.values()))


def cmd_run(cfg):
    """Detect, link, cluster, and write the submission TSV."""
    index = load_index(cfg)
    ensembles, md_vocab = _load_md(cfg)
    el_stores, el_vocab = _load_el(cfg)
    ranker = Ranker(cfg.el, len(el_vocab))
    documents = corpus.load_documents(cfg.path("documents", required=True))

    def process(document):
        mentions = _detect_mentions(cfg, document, ensembles, md_vocab)
        doc_result = document_result(index, document)
        decisions = []
        for mention in mentions:
            candidates = generate_candidates(
                mention, document, index, mentions,
                top_n=cfg.top_n.get(document.language),
                doc_result=doc_result)
            raws = [raw_features(mention, c, document, index, el_vocab)
                    for c in candidates]
            chosen, confidence, _ = link(ranker, el_stores, raws,
                                         candidates, index)
            decisions.append((mention, chosen, confidence))
        return decisions

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            per_doc = list(pool.map(process, documents))
    else:
        per_doc = [process(document) for document in documents]

    decisions = [d for doc_decisions in per_doc for d in doc_decisions]
    nil_mentions = [m for m, chosen, _ in decisions if chosen.is_nil]
    all_mentions = [(m, chosen.is_nil) for m, chosen, _ in decisions]
    labels, _ = cluster_and_label(nil_mentions, all_mentions)

    rows = []
    for mention, chosen, confidence in decisions:
        if chosen.is_nil:
            target = corpus.LinkTarget(nil_cluster=labels[mention.key])
        else:
            target = corpus.LinkTarget(kb_id=chosen.kb_id)
        rows.append((corpus.with_confidence(mention, confidence), target))
    output = cfg.path("output", required=True)
    corpus.write_submission(rows, output, system_id=cfg.system_id)
    return output


def cmd_eval(cfg, system_path, gold_path):
    """Print P/R/F tables for all three metrics per language plus ALL."""
    system_links = corpus.load_gold(system_path)
    gold_links = corpus.load_gold(gold_path)
    language_of_doc = None
    documents_path = cfg.path("documents")
    if documents_path and os.path.exists(documents_path):
        language_of_doc = {d.doc_id: d.language
                           for d in corpus.load_documents(documents_path)}
    report, scores = score_report(system_links, gold_links, language_of_doc)
    return report, scores


def cmd_diag(cfg, gold_path, out_path=None):
    """Per-mention JSON lines: queries, scored candidates, posterior."""
    index = load_index(cfg)
    documents = corpus.load_documents(cfg.path("documents", required=True))
    gold = corpus.load_gold(gold_path)
    docs_by_id = {d.doc_id: d for d in documents}
    mentions_by_doc = {}
    for g in gold:
        mentions_by_doc.setdefault(g.mention.doc_id, []).append(g.mention)
    try:
        el_stores, el_vocab = _load_el(cfg)
        ranker = Ranker(cfg.el, len(el_vocab))
    except MissingArtifact:
        el_stores, el_vocab, ranker = None, None, None

    lines = []
    for g in gold:
        doc = docs_by_id.get(g.mention.doc_id)
        if doc is None:
            continue
        candidates, diag = generate_with_diagnostics(
            g.mention, doc, index, mentions_by_doc[g.mention.doc_id],
            top_n=cfg.top_n.get(doc.language))
        record = {
            "mention": g.mention.surface,
            "span": f"{g.mention.doc_id}:{g.mention.char_start}-"
                    f"{g.mention.char_end}",
            "queries": diag["queries"],
            "candidates": [
                {"kb_id": c.render(),
                 "score": diag["result1"].get(c.kb_id)}
                for c in candidates],
        }
        if ranker is not None:
            raws = [raw_features(g.mention, c, doc, index, el_vocab)
                    for c in candidates]
            posterior = mean_posterior(ranker, el_stores, raws)
            record["posterior"] = [round(float(p), 6) for p in posterior]
        lines.append(json.dumps(record, ensure_ascii=False))
    text = "\n".join(lines) + ("\n" if lines else "")
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
