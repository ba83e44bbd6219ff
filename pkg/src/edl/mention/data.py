"""Sentence extraction and gold-span alignment for detector training.

Documents are segmented at newlines only; gold mentions are mapped to
token-index spans within their sentence and dropped (with a counter) when
they do not align to token boundaries or cross a newline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..corpus import Mention, split_sentences, tokenize
from ..nested_codec import Span


@dataclass
class Sentence:
    doc_id: str
    language: str
    offset: int  # char offset of the sentence within the document
    tokens: list
    spans: set = field(default_factory=set)

    @property
    def surfaces(self):
        return [t.surface for t in self.tokens]

    def __len__(self):
        return len(self.tokens)


def extract_sentences(documents, gold_mentions=(), skipped=None):
    """Tokenized sentences with token-level gold spans attached.

    ``skipped`` may be a list collecting unalignable gold mentions.
    """
    by_doc = {}
    for mention in gold_mentions:
        by_doc.setdefault(mention.doc_id, []).append(mention)
    sentences = []
    for doc in documents:
        doc_mentions = by_doc.pop(doc.doc_id, [])
        aligned = set()
        for offset, line in split_sentences(doc.text):
            tokens = tokenize(line, doc.language)
            if not tokens:
                continue
            sentence = Sentence(doc.doc_id, doc.language, offset, tokens)
            starts = {t.char_start: i for i, t in enumerate(tokens)}
            ends = {t.char_end: i + 1 for i, t in enumerate(tokens)}
            line_end = offset + len(line)
            for m_idx, mention in enumerate(doc_mentions):
                if not (offset <= mention.char_start
                        and mention.char_end <= line_end):
                    continue
                tok_start = starts.get(mention.char_start - offset)
                tok_end = ends.get(mention.char_end - offset)
                aligned.add(m_idx)
                if tok_start is None or tok_end is None:
                    if skipped is not None:
                        skipped.append(mention)
                    continue
                sentence.spans.add(Span(tok_start, tok_end,
                                        mention.entity_type, mention.kind))
            sentences.append(sentence)
        if skipped is not None:
            skipped.extend(m for i, m in enumerate(doc_mentions)
                           if i not in aligned)
    return sentences


def spans_to_mentions(sentence, document, spans, confidence=1.0):
    """Convert token-index spans back to character-offset mentions."""
    mentions = []
    for span in sorted(spans):
        char_start = sentence.offset + sentence.tokens[span.start].char_start
        char_end = sentence.offset + sentence.tokens[span.end - 1].char_end
        mentions.append(Mention(sentence.doc_id, char_start, char_end,
                                document.text[char_start:char_end],
                                span.entity_type, span.kind, confidence))
    return mentions
