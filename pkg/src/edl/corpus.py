"""Documents, tokens, mentions, and the TSV formats they travel in.

File formats:
  documents  doc_id <TAB> category <TAB> language <TAB> text  (newlines in
             text escaped as the two characters backslash-n)
  mentions   system_id <TAB> mention_uid <TAB> surface <TAB>
             doc_id:start-end <TAB> link <TAB> type <TAB> kind <TAB> confidence
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import DuplicateDocId, MalformedInput, UnknownEntityType

ENTITY_TYPES = ("PER", "ORG", "GPE", "LOC", "FAC")
MENTION_KINDS = ("NAM", "NOM")
CATEGORIES = ("NewsReport", "DiscussionForum")
LANGUAGES = ("ENG", "CMN", "SPA")


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    category: str = "NewsReport"
    language: str = "ENG"


@dataclass(frozen=True)
class Token:
    surface: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class Mention:
    doc_id: str
    char_start: int
    char_end: int
    surface: str
    entity_type: str
    kind: str
    confidence: float = 1.0

    @property
    def span(self):
        return (self.doc_id, self.char_start, self.char_end)

    @property
    def key(self):
        """Identity used by the discovery metrics: span + type + kind."""
        return (self.doc_id, self.char_start, self.char_end,
                self.entity_type, self.kind)

    def midpoint(self):
        return 0.5 * (self.char_start + self.char_end)


@dataclass(frozen=True)
class LinkTarget:
    """Either a KB node id or a NIL cluster label."""
    kb_id: str | None = None
    nil_cluster: str | None = None

    @property
    def is_nil(self):
        return self.kb_id is None

    def render(self):
        return self.nil_cluster if self.is_nil else self.kb_id

    @staticmethod
    def parse(text):
        if text.startswith("NIL"):
            return LinkTarget(nil_cluster=text)
        return LinkTarget(kb_id=text)


@dataclass(frozen=True)
class GoldLink:
    mention: Mention
    target: LinkTarget


def _is_word_char(ch):
    return ch.isalnum()


def tokenize(text, language="ENG"):
    """Split text into offset-carrying tokens.

    ENG/SPA: a maximal run of letters/digits is one token and every other
    non-space character is its own token.  CMN: one token per non-space
    character.  Offsets count unicode scalar values.
    """
    tokens = []
    if language == "CMN":
        for i, ch in enumerate(text):
            if not ch.isspace():
                tokens.append(Token(ch, i, i + 1))
        return tokens
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif _is_word_char(ch):
            j = i + 1
            while j < n and _is_word_char(text[j]):
                j += 1
            tokens.append(Token(text[i:j], i, j))
            i = j
        else:
            tokens.append(Token(ch, i, i + 1))
            i += 1
    return tokens


def split_sentences(text):
    """Newline-delimited segments as (char_offset, line_text) pairs."""
    out = []
    offset = 0
    for line in text.split("\n"):
        out.append((offset, line))
        offset += len(line) + 1
    return out


def _escape_text(text):
    return text.replace("\n", "\\n")


def _unescape_text(text):
    return text.replace("\\n", "\n")


def load_documents(path):
    docs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t", 3)
            if len(fields) != 4:
                raise MalformedInput(path, line_no,
                                     f"expected 4 fields, got {len(fields)}")
            doc_id, category, language, text = fields
            if category not in CATEGORIES:
                raise MalformedInput(path, line_no,
                                     f"unknown category {category!r}")
            if language not in LANGUAGES:
                raise MalformedInput(path, line_no,
                                     f"unknown language {language!r}")
            if doc_id in seen:
                raise DuplicateDocId(doc_id)
            seen.add(doc_id)
            docs.append(Document(doc_id, _unescape_text(text),
                                 category, language))
    return docs


def write_documents(documents, path):
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(f"{doc.doc_id}\t{doc.category}\t{doc.language}\t"
                     f"{_escape_text(doc.text)}\n")


def _parse_span(path, line_no, field):
    try:
        doc_id, span = field.rsplit(":", 1)
        start_s, end_s = span.split("-")
        return doc_id, int(start_s), int(end_s)
    except ValueError:
        raise MalformedInput(path, line_no, f"bad span field {field!r}") from None


def load_gold(path):
    """Read a gold/submission TSV into GoldLink records."""
    links = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 8:
                raise MalformedInput(path, line_no,
                                     f"expected 8 fields, got {len(fields)}")
            (_system, _uid, surface, span_field, link,
             entity_type, kind, conf_s) = fields
            if entity_type not in ENTITY_TYPES:
                raise UnknownEntityType(entity_type)
            if kind not in MENTION_KINDS:
                raise MalformedInput(path, line_no, f"unknown kind {kind!r}")
            doc_id, start, end = _parse_span(path, line_no, span_field)
            try:
                confidence = float(conf_s)
            except ValueError:
                raise MalformedInput(path, line_no,
                                     f"bad confidence {conf_s!r}") from None
            mention = Mention(doc_id, start, end, surface,
                              entity_type, kind, confidence)
            links.append(GoldLink(mention, LinkTarget.parse(link)))
    return links


def write_submission(linked_mentions, path, system_id="edl1"):
    """Write (Mention, LinkTarget) pairs as a submission TSV.

    Mentions are ordered by (doc_id, char_start, char_end) so the output is
    a deterministic function of the input set; uids are assigned in that
    order.
    """
    rows = sorted(linked_mentions,
                  key=lambda ml: (ml[0].doc_id, ml[0].char_start,
                                  ml[0].char_end, ml[0].entity_type,
                                  ml[0].kind))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, (mention, target) in enumerate(rows, start=1):
            fh.write("\t".join([
                system_id,
                f"M{i:06d}",
                mention.surface,
                f"{mention.doc_id}:{mention.char_start}-{mention.char_end}",
                target.render(),
                mention.entity_type,
                mention.kind,
                f"{mention.confidence:.6f}",
            ]) + "\n")


def with_confidence(mention, confidence):
    return replace(mention, confidence=confidence)
