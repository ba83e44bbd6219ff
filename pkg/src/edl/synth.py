"""Deterministic synthetic corpora and KB snapshot for desk-scale runs.

Everything is generated from fixed seeds so the bundled data is stable
across runs and machines.  ``python -m edl.synth OUTDIR`` materializes
the full demo workspace (KB snapshot, aux tables, training corpora, gold
files, and a pipeline config).

The synthetic world is built so that every non-NIL gold mention is
reachable by candidate generation: surfaces either equal a KB alias
(case-insensitively) or reach one through the longer-mention,
abbreviation, nominal, variant, or translation rules.
"""

from __future__ import annotations

import sys

import numpy as np

from .corpus import (Document, GoldLink, LinkTarget, Mention,
                     write_documents)
from .corpus import write_submission
from .kb import AuxTables, KbEntity
from .nested_codec import Span
from .corpus import ENTITY_TYPES, MENTION_KINDS
from .nil_clustering import cluster_and_label

FIRST_NAMES = ["john", "mary", "carlos", "wei", "anna", "david", "rosa",
               "peter"]
LAST_NAMES = ["smith", "chan", "lopez", "brown", "garcia", "wang"]
ORG_SUFFIXES = ["corporation", "group"]
GPE_NAMES = ["westland", "northfork", "eastvale", "southport", "riverton",
             "hillcrest"]
FAC_WORDS = ["airport", "bridge", "station", "tower"]
FILLERS = ["the", "meeting", "at", "started", "visited", "today", "we",
           "saw", "near", "office", "in", "reporters", "said", "new",
           "opened", "plan", "for", "with", "a", "old"]
NOMINALS = ["president", "company", "city"]

ABBREVIATIONS = [("sc", "south carolina"), ("nd", "north dakota"),
                 ("wv", "west virginia")]
ABBREV_GPES = ["south carolina", "north dakota", "west virginia"]

CMN_GPES = [("中国", "中國", "Zhongguo"), ("北京", "北京", "Beijing"),
            ("广州", "廣州", "Guangzhou"), ("台北", "臺北", "Taibei")]
CMN_PERS = [("王伟", "王偉", "Wang Wei"), ("李明", "李明", "Li Ming"),
            ("张红", "張紅", "Zhang Hong")]
SPA_GPES = [("inglaterra", "england city"), ("alemania", "germany city")]
SPA_PERS = [("juan perez", "john perez"), ("ana morales", "anna morales")]

NIL_PEOPLE = ["zara quinn", "bilbo fog", "omar veld"]


def _person_name(i):
    first = FIRST_NAMES[i % len(FIRST_NAMES)]
    last = LAST_NAMES[(i // len(FIRST_NAMES)) % len(LAST_NAMES)]
    return f"{first} {last}"


def _title(words):
    return " ".join(w.capitalize() for w in words.split())


def build_kb(seed=11, size=200):
    """200-entity snapshot plus aux tables, deterministic per seed."""
    rng = np.random.default_rng(seed)
    entities = []

    def links():
        return int(rng.integers(0, 2000))

    person_names = [_person_name(i)
                    for i in range(len(FIRST_NAMES) * len(LAST_NAMES))]
    for i, name in enumerate(person_names):  # 48 persons
        gpe = GPE_NAMES[i % len(GPE_NAMES)]
        entities.append(KbEntity(
            f"m.p{i:03d}", _title(name), frozenset(), links(),
            f"{_title(name)} is a person who works in {gpe} and speaks at "
            f"the {gpe} office", frozenset(), frozenset(), None))
    for i in range(24):  # orgs nest a person name
        name = f"{person_names[i]} {ORG_SUFFIXES[i % 2]}"
        entities.append(KbEntity(
            f"m.o{i:03d}", _title(name), frozenset(), links(),
            f"{_title(name)} is a company founded by {_title(person_names[i])} "
            f"with offices in {GPE_NAMES[(i + 1) % len(GPE_NAMES)]}",
            frozenset(), frozenset(), None))
    for i, gpe in enumerate(GPE_NAMES + ABBREV_GPES):  # 9 GPEs
        entities.append(KbEntity(
            f"m.g{i:03d}", _title(gpe), frozenset(), links(),
            f"{_title(gpe)} is a place with an old bridge and a new airport "
            f"near the {gpe} station",
            frozenset({f"{_title(gpe)} region"}), frozenset(), None))
    fac_id = 0
    for gpe in GPE_NAMES:  # 12 FACs over made-up places
        for fac in FAC_WORDS[:2]:
            name = f"{gpe} {fac}"
            entities.append(KbEntity(
                f"m.f{fac_id:03d}", _title(name), frozenset(), links(),
                f"the {fac} of {gpe} is a facility opened with a plan "
                f"for visitors", frozenset(), frozenset(), None))
            fac_id += 1
    for i, (simp, trad, eng) in enumerate(CMN_GPES + CMN_PERS):
        # canonical in traditional script: simplified only reaches it
        # through the variant table (or the translation lexicon)
        entities.append(KbEntity(
            f"m.z{i:03d}", trad, frozenset({eng}), links(),
            f"{eng} {trad} place person news report", frozenset(),
            frozenset(), eng))
    for i, (spa, eng) in enumerate(SPA_GPES + SPA_PERS):
        entities.append(KbEntity(
            f"m.s{i:03d}", _title(eng), frozenset(), links(),
            f"{_title(eng)} is known as {spa} in spanish news",
            frozenset(), frozenset(), _title(eng)))
    # near-miss distractors pad the snapshot to `size`
    i = 0
    while len(entities) < size:
        base = person_names[i % len(person_names)]
        variant = base.replace("o", "0") if "o" in base else base + " jr"
        entities.append(KbEntity(
            f"m.d{i:03d}", _title(f"{variant} {i}"), frozenset(), links(),
            f"{_title(variant)} is a different person entirely number {i}",
            frozenset(), frozenset(), None))
        i += 1

    aux = AuxTables()
    for short, full in ABBREVIATIONS:
        aux.abbreviations.setdefault(short, set()).add(_title(full))
    for simp, trad, eng in CMN_GPES + CMN_PERS:
        aux.zh_variants.setdefault(simp, set()).add(trad)
        aux.zh_variants.setdefault(trad, set()).add(simp)
        aux.translations.setdefault(simp, eng)
    for spa, eng in SPA_GPES + SPA_PERS:
        aux.translations.setdefault(spa, _title(eng))
    return entities[:size], aux


def _doc(doc_id, lines, language="ENG", category=None):
    if category is None:
        category = "NewsReport" if int(doc_id[-1]) % 2 == 0 \
            else "DiscussionForum"
    return Document(doc_id, "\n".join(lines), category, language)


class _LineBuilder:
    """Accumulates one sentence while tracking char offsets of mentions."""

    def __init__(self):
        self.words = []

    def add(self, text):
        start = len(" ".join(self.words)) + (1 if self.words else 0)
        self.words.append(text)
        return start, start + len(text)

    def text(self):
        return " ".join(self.words)


def _md_sentence(i, doc_id, offset):
    """One synthetic sentence with gold mentions; returns (line, mentions)."""
    b = _LineBuilder()
    mentions = []
    person = _person_name(i)
    gpe = GPE_NAMES[i % len(GPE_NAMES)]
    fac = FAC_WORDS[i % 2]
    suffix = ORG_SUFFIXES[i % 2]
    kind = i % 5

    def mention(s, e, t, k):
        mentions.append(Mention(doc_id, offset + s, offset + e,
                                b.text()[s:e], t, k))

    if kind == 0:  # ORG containing PER
        b.add(FILLERS[i % 3])
        b.add("meeting"); b.add("at")
        ps, _ = b.add(person.split()[0])
        _, pe = b.add(person.split()[1])
        _, oe = b.add(suffix)
        b.add("started"); b.add("today")
        mention(ps, pe, "PER", "NAM")
        mention(ps, oe, "ORG", "NAM")
    elif kind == 1:  # PER + GPE
        ps, _ = b.add(person.split()[0])
        _, pe = b.add(person.split()[1])
        b.add("visited")
        gs, ge = b.add(gpe)
        b.add("today")
        mention(ps, pe, "PER", "NAM")
        mention(gs, ge, "GPE", "NAM")
    elif kind == 2:  # FAC containing GPE
        b.add("we"); b.add("saw"); b.add("the")
        gs, ge = b.add(gpe)
        _, fe = b.add(fac)
        b.add("near"); b.add("the"); b.add("office")
        mention(gs, ge, "GPE", "NAM")
        mention(gs, fe, "FAC", "NAM")
    elif kind == 3:  # PER + FAC containing GPE
        b.add("reporters"); b.add("said")
        ps, _ = b.add(person.split()[0])
        _, pe = b.add(person.split()[1])
        b.add("opened"); b.add("the")
        gs, ge = b.add(gpe)
        _, fe = b.add(fac)
        mention(ps, pe, "PER", "NAM")
        mention(gs, ge, "GPE", "NAM")
        mention(gs, fe, "FAC", "NAM")
    else:  # NOM president near a PER
        b.add("the")
        ns, ne = b.add("president")
        b.add("of")
        os_, _ = b.add(person.split()[0])
        b.add(person.split()[1])
        _, oe = b.add(suffix)
        b.add("said"); b.add("a"); b.add("plan")
        mention(ns, ne, "PER", "NOM")
        mention(os_, oe, "ORG", "NAM")
    return b.text(), mentions


def md_corpus(seed=23, n_sentences=50, sentences_per_doc=5):
    """Mention-detection overfit corpus: nested entities, vocab <= 100."""
    documents = []
    mentions = []
    lines = []
    doc_idx = 0
    offset = 0
    doc_id = f"md{doc_idx:03d}"
    for i in range(n_sentences):
        line, line_mentions = _md_sentence(i, doc_id, offset)
        lines.append(line)
        mentions.extend(line_mentions)
        offset += len(line) + 1
        if len(lines) == sentences_per_doc or i == n_sentences - 1:
            documents.append(_doc(doc_id, lines))
            doc_idx += 1
            doc_id = f"md{doc_idx:03d}"
            lines = []
            offset = 0
    return documents, mentions


def _kb_by_name(entities):
    by_name = {}
    for e in entities:
        for name in e.searchable_names():
            by_name.setdefault(name.casefold(), e.kb_id)
    return by_name


def linking_corpus(entities, seed=31, n_docs=30):
    """ENG documents whose mentions carry gold links (KB or NIL).

    Gold KB mentions match an alias exactly; NIL mentions use surfaces
    absent from the KB.  Rule-reachable cases (substring mention, nominal,
    abbreviation) appear at fixed intervals.
    """
    rng = np.random.default_rng(seed)
    by_name = _kb_by_name(entities)
    documents = []
    links = []
    for d in range(n_docs):
        doc_id = f"el{d:03d}"
        b = _LineBuilder()
        doc_links = []  # (start, end, surface, type, kind, kb_id or None)

        def add_mention(surface, entity_type, kind, kb_id):
            s, e = b.add(surface)
            doc_links.append((s, e, surface, entity_type, kind, kb_id))

        person = _person_name(int(rng.integers(0, 48)))
        gpe = GPE_NAMES[int(rng.integers(0, len(GPE_NAMES)))]
        b.add("reporters"); b.add("said")
        add_mention(person, "PER", "NAM", by_name[person])
        case = d % 5
        if case == 1:  # nominal reachable via rule 5: person is nearest NAM
            b.add("the")
            add_mention("president", "PER", "NOM", by_name[person])
            b.add("spoke")
        b.add("visited")
        add_mention(gpe, "GPE", "NAM", by_name[gpe])
        if case == 0:  # substring mention reachable via rule 2
            b.add("and")
            add_mention(person.split()[1], "PER", "NAM", by_name[person])
            b.add("spoke")
        elif case == 2:  # abbreviation reachable via rule 4
            short, full = ABBREVIATIONS[d % len(ABBREVIATIONS)]
            b.add("near")
            add_mention(short, "GPE", "NAM", by_name[full])
        elif case == 3:  # NIL person
            b.add("with")
            nil = NIL_PEOPLE[d % len(NIL_PEOPLE)]
            add_mention(nil, "PER", "NAM", None)
        elif case == 4:  # org mention, exact
            org = f"{person} {ORG_SUFFIXES[d % 2]}"
            if org.casefold() in by_name:
                b.add("at")
                add_mention(org, "ORG", "NAM", by_name[org])
        doc = _doc(doc_id, [b.text()])
        documents.append(doc)
        for s, e, surface, entity_type, kind, kb_id in doc_links:
            mention = Mention(doc_id, s, e, surface, entity_type, kind)
            target = LinkTarget(kb_id=kb_id) if kb_id \
                else LinkTarget(nil_cluster="NIL")
            links.append(GoldLink(mention, target))
    return documents, _label_nils(links)


def mini_corpus(entities, seed=41):
    """Small trilingual corpus for end-to-end runs."""
    by_name = _kb_by_name(entities)
    documents = []
    links = []

    def record(doc, items):
        documents.append(doc)
        for start, end, entity_type, kind, kb_id in items:
            surface = doc.text[start:end]
            target = LinkTarget(kb_id=kb_id) if kb_id \
                else LinkTarget(nil_cluster="NIL")
            links.append(GoldLink(
                Mention(doc.doc_id, start, end, surface, entity_type, kind),
                target))

    eng_docs, eng_mentions = md_corpus(seed, n_sentences=8,
                                       sentences_per_doc=2)
    for doc in eng_docs:
        doc = Document("mini" + doc.doc_id, doc.text, doc.category, "ENG")
        documents.append(doc)
    for mention in eng_mentions:
        mention = Mention("mini" + mention.doc_id, mention.char_start,
                          mention.char_end, mention.surface,
                          mention.entity_type, mention.kind)
        name = mention.surface.casefold()
        kb_id = by_name.get(name)
        target = LinkTarget(kb_id=kb_id) if kb_id \
            else LinkTarget(nil_cluster="NIL")
        links.append(GoldLink(mention, target))

    # CMN: simplified surfaces; canonical KB names are traditional
    simp_per = CMN_PERS[0][0]
    simp_gpe = CMN_GPES[0][0]
    text = f"{simp_per}访问了{simp_gpe}"
    doc = Document("minicmn0", text, "NewsReport", "CMN")
    record(doc, [(0, 2, "PER", "NAM", by_name[CMN_PERS[0][1].casefold()]),
                 (5, 7, "GPE", "NAM", by_name[CMN_GPES[0][1].casefold()])])
    text2 = f"{CMN_GPES[1][0]}的报告"
    doc2 = Document("minicmn1", text2, "DiscussionForum", "CMN")
    record(doc2, [(0, 2, "GPE", "NAM", by_name[CMN_GPES[1][1].casefold()])])

    # SPA: surfaces reach English aliases through the translation lexicon
    spa_surface, spa_eng = SPA_GPES[0]
    text3 = f"una visita a {spa_surface} hoy"
    doc3 = Document("minispa0", text3, "NewsReport", "SPA")
    start = text3.index(spa_surface)
    record(doc3, [(start, start + len(spa_surface), "GPE", "NAM",
                   by_name[spa_eng.casefold()])])
    return documents, _label_nils(links)


def _label_nils(links):
    """Replace placeholder NIL targets with rule-consistent cluster ids."""
    nil_mentions = [l.mention for l in links if l.target.is_nil]
    all_mentions = [(l.mention, l.target.is_nil) for l in links]
    labels, _ = cluster_and_label(nil_mentions, all_mentions)
    out = []
    for l in links:
        if l.target.is_nil:
            out.append(GoldLink(l.mention,
                                LinkTarget(nil_cluster=labels[l.mention.key])))
        else:
            out.append(l)
    return out


def random_labeling(rng, length, max_children=2, max_depth=3):
    """Random valid (non-crossing) token-span labeling for codec tests."""
    spans = set()
    boundaries = set()

    def rec(start, end, depth):
        if end - start < 1 or depth >= max_depth:
            return
        pos = start
        for _ in range(int(rng.integers(0, max_children + 1))):
            if pos >= end:
                break
            s = int(rng.integers(pos, end))
            e = int(rng.integers(s + 1, end + 1))
            if (s, e) not in boundaries:
                boundaries.add((s, e))
                spans.add(Span(s, e,
                               ENTITY_TYPES[int(rng.integers(0, 5))],
                               MENTION_KINDS[int(rng.integers(0, 2))]))
                rec(s, e, depth + 1)
            pos = e

    rec(0, length, 0)
    return spans


# ---------------------------------------------------------------------------
# Workspace materialization

def write_aux_tables(aux, abbrev_path, zh_path, translation_path):
    with open(abbrev_path, "w", encoding="utf-8", newline="\n") as fh:
        for short in sorted(aux.abbreviations):
            for full in sorted(aux.abbreviations[short]):
                fh.write(f"{short}\t{full}\n")
    with open(zh_path, "w", encoding="utf-8", newline="\n") as fh:
        written = set()
        for simp in sorted(aux.zh_variants):
            for trad in sorted(aux.zh_variants[simp]):
                pair = tuple(sorted((simp, trad)))
                if pair not in written:
                    written.add(pair)
                    fh.write(f"{pair[0]}\t{pair[1]}\n")
    with open(translation_path, "w", encoding="utf-8", newline="\n") as fh:
        for source in sorted(aux.translations):
            fh.write(f"{source}\t{aux.translations[source]}\n")


def write_gold(links, path, system_id="gold"):
    write_submission([(l.mention, l.target) for l in links], path,
                     system_id=system_id)


def materialize(outdir, seed=7):
    """Write the full demo workspace; returns the config file path."""
    import os
    from .kb import write_kb

    os.makedirs(outdir, exist_ok=True)

    def p(name):
        return os.path.join(outdir, name)

    entities, aux = build_kb()
    write_kb(entities, p("kb.tsv"))
    write_aux_tables(aux, p("abbreviations.tsv"), p("zh_variants.tsv"),
                     p("translations.tsv"))

    md_docs, md_mentions = md_corpus()
    write_documents(md_docs, p("docs_md.tsv"))
    by_name = _kb_by_name(entities)
    md_links = _label_nils([
        GoldLink(m, LinkTarget(kb_id=by_name[m.surface.casefold()])
                 if m.surface.casefold() in by_name
                 else LinkTarget(nil_cluster="NIL"))
        for m in md_mentions])
    write_gold(md_links, p("gold_md.tsv"))

    el_docs, el_links = linking_corpus(entities)
    write_documents(el_docs, p("docs_el.tsv"))
    write_gold(el_links, p("gold_el.tsv"))

    run_docs, run_links = mini_corpus(entities)
    write_documents(run_docs, p("docs_run.tsv"))
    write_gold(run_links, p("gold_run.tsv"))

    config_path = p("config.ini")
    with open(config_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"""seed={seed}
kb={p('kb.tsv')}
abbreviations={p('abbreviations.tsv')}
zh_variants={p('zh_variants.tsv')}
translations={p('translations.tsv')}
index_dir={p('index')}
model_dir={p('models')}
documents={p('docs_run.tsv')}
gold={p('gold_run.tsv')}
md_documents={p('docs_md.tsv')}
md_gold={p('gold_md.tsv')}
el_documents={p('docs_el.tsv')}
el_gold={p('gold_el.tsv')}
output={p('submission.tsv')}
md.max_epochs=20
md.patience=5
el.max_epochs=30
el.patience=5
""")
    return config_path


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "edl-workspace"
    path = materialize(target)
    print(f"workspace written; config at {path}")
