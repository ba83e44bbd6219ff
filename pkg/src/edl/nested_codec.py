"""Bracket/placeholder linearization of nested mention labelings.

A labeling is a set of token-index spans, pairwise disjoint or strictly
nested.  It converts to a symbol sequence with one placeholder per token,
an open/close bracket pair per span, and a terminating end-of-sequence
symbol; ``repair`` makes arbitrary (model-emitted) sequences well formed
by dropping unmatched brackets.  Flat BIO tags cover the outermost spans
only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .corpus import ENTITY_TYPES, MENTION_KINDS
from .errors import CrossingSpans, PlaceholderCountMismatch, UnmatchedBracket


class Span(NamedTuple):
    start: int
    end: int  # exclusive
    entity_type: str
    kind: str


@dataclass(frozen=True)
class Symbol:
    op: str  # "open" | "close" | "z" | "eos"
    entity_type: str | None = None
    kind: str | None = None

    def render(self):
        if self.op == "z":
            return "Z"
        if self.op == "eos":
            return "</s>"
        bracket = "[" if self.op == "open" else "]"
        suffix = "" if self.kind == "NAM" else "~NOM"
        return f"{bracket}_{self.entity_type}{suffix}"


Z = Symbol("z")
EOS = Symbol("eos")


def open_symbol(entity_type, kind):
    return Symbol("open", entity_type, kind)


def close_symbol(entity_type, kind):
    return Symbol("close", entity_type, kind)


def symbol_alphabet():
    """All 22 output symbols: open/close per (type, kind), Z, </s>."""
    symbols = []
    for entity_type in ENTITY_TYPES:
        for kind in MENTION_KINDS:
            symbols.append(open_symbol(entity_type, kind))
    for entity_type in ENTITY_TYPES:
        for kind in MENTION_KINDS:
            symbols.append(close_symbol(entity_type, kind))
    symbols.append(Z)
    symbols.append(EOS)
    return symbols


SYMBOLS = symbol_alphabet()
SYMBOL_IDS = {s: i for i, s in enumerate(SYMBOLS)}
Z_ID = SYMBOL_IDS[Z]
EOS_ID = SYMBOL_IDS[EOS]


def render_symbols(symbols):
    return " ".join(s.render() for s in symbols)


def parse_rendered(text):
    out = []
    for piece in text.split():
        if piece == "Z":
            out.append(Z)
        elif piece == "</s>":
            out.append(EOS)
        else:
            bracket, rest = piece[0], piece[2:]
            kind = "NAM"
            if rest.endswith("~NOM"):
                rest, kind = rest[:-4], "NOM"
            op = "open" if bracket == "[" else "close"
            out.append(Symbol(op, rest, kind))
    return out


def check_spans(sentence_length, spans):
    """Validate the no-crossing invariant, raising CrossingSpans."""
    spans = sorted(spans)
    for span in spans:
        if not (0 <= span.start < span.end <= sentence_length):
            raise ValueError(f"span {span} out of range for length "
                             f"{sentence_length}")
    for i, a in enumerate(spans):
        for b in spans[i + 1:]:
            if b.start >= a.end:
                break
            # b starts inside a; it must be strictly nested
            if a.start == b.start and a.end == b.end:
                raise CrossingSpans(f"duplicate boundaries {a} / {b}")
            if b.start > a.start and b.end > a.end:
                raise CrossingSpans(f"{a} crosses {b}")


def linearize(sentence_length, spans):
    """Encode spans as a bracket sequence with one Z per token.

    Among spans opening at the same token the longer opens first, which
    fixes a unique canonical sequence.
    """
    spans = set(spans)
    check_spans(sentence_length, spans)
    opens = {}
    closes = {}
    for span in spans:
        opens.setdefault(span.start, []).append(span)
        closes.setdefault(span.end, []).append(span)
    out = []
    for pos in range(sentence_length + 1):
        # inner spans close first: later start closes before earlier start
        for span in sorted(closes.get(pos, []), key=lambda s: -s.start):
            out.append(close_symbol(span.entity_type, span.kind))
        if pos < sentence_length:
            for span in sorted(opens.get(pos, []), key=lambda s: -s.end):
                out.append(open_symbol(span.entity_type, span.kind))
            out.append(Z)
    out.append(EOS)
    return out


def parse_symbols(sentence_length, symbols):
    """Exact inverse of linearize.

    Accepts an optional trailing </s>; any other structural violation
    raises UnmatchedBracket, and a placeholder count different from
    sentence_length raises PlaceholderCountMismatch.
    """
    spans = set()
    stack = []
    pos = 0
    for i, sym in enumerate(symbols):
        if sym.op == "eos":
            if i != len(symbols) - 1:
                raise UnmatchedBracket("</s> before end of sequence")
        elif sym.op == "z":
            pos += 1
        elif sym.op == "open":
            stack.append((sym.entity_type, sym.kind, pos))
        else:
            if not stack:
                raise UnmatchedBracket(f"unopened {sym.render()}")
            entity_type, kind, start = stack.pop()
            if (entity_type, kind) != (sym.entity_type, sym.kind):
                raise UnmatchedBracket(
                    f"{sym.render()} closes [_{entity_type}")
            if start == pos:
                raise UnmatchedBracket(f"empty span for {sym.render()}")
            spans.add(Span(start, pos, entity_type, kind))
    if stack:
        raise UnmatchedBracket(f"{len(stack)} unclosed bracket(s)")
    if pos != sentence_length:
        raise PlaceholderCountMismatch(
            f"{pos} placeholders for {sentence_length} tokens")
    return spans


def repair(symbols):
    """Drop unmatched brackets so the sequence becomes well formed.

    A close with no same-(type, kind) open anywhere on the stack is
    dropped; a close matching a non-top open drops the opens above it.
    Opens still unmatched at the end are dropped, as are empty bracket
    pairs (which would denote zero-length spans).  Placeholders are never
    touched.  Idempotent.
    """
    kept = []  # (symbol, matched_flag_index or None)
    drop = set()
    stack = []  # (entity_type, kind, index in kept, placeholders seen)
    pos = 0
    saw_eos = False
    for sym in symbols:
        if sym.op == "eos":
            saw_eos = True
            break
        if sym.op == "z":
            kept.append(sym)
            pos += 1
        elif sym.op == "open":
            stack.append((sym.entity_type, sym.kind, len(kept), pos))
            kept.append(sym)
        else:
            match = None
            for depth in range(len(stack) - 1, -1, -1):
                if stack[depth][:2] == (sym.entity_type, sym.kind):
                    match = depth
                    break
            if match is None:
                continue  # drop the close
            for entity_type, kind, idx, _ in stack[match + 1:]:
                drop.add(idx)
            _, _, open_idx, open_pos = stack[match]
            del stack[match:]
            if open_pos == pos:
                drop.add(open_idx)  # empty span: drop the pair
            else:
                kept.append(sym)
    for _, _, idx, _ in stack:
        drop.add(idx)
    out = [sym for i, sym in enumerate(kept) if i not in drop]
    if saw_eos:
        out.append(EOS)
    return out


# ---------------------------------------------------------------------------
# Flat BIO view (outermost spans only)

FLAT_TAGS = ["O"]
for _t in ENTITY_TYPES:
    for _k in MENTION_KINDS:
        FLAT_TAGS.append(f"B-{_t}-{_k}")
        FLAT_TAGS.append(f"I-{_t}-{_k}")
FLAT_TAG_IDS = {t: i for i, t in enumerate(FLAT_TAGS)}
O_TAG_ID = FLAT_TAG_IDS["O"]


def outermost_spans(spans):
    spans = set(spans)
    out = set()
    for a in spans:
        contained = any(b != a and b.start <= a.start and a.end <= b.end
                        for b in spans)
        if not contained:
            out.add(a)
    return out


def flatten_to_bio(sentence_length, spans):
    """Tag sequence over the 21 flat tags covering outermost spans only."""
    check_spans(sentence_length, spans)
    tags = ["O"] * sentence_length
    for span in sorted(outermost_spans(spans)):
        tags[span.start] = f"B-{span.entity_type}-{span.kind}"
        for i in range(span.start + 1, span.end):
            tags[i] = f"I-{span.entity_type}-{span.kind}"
    return tags


def bio_to_spans(tags):
    """Invert flatten_to_bio; input must be BIO-consistent."""
    spans = set()
    current = None  # (start, entity_type, kind)
    for i, tag in enumerate(tags):
        if tag == "O":
            if current:
                spans.add(Span(current[0], i, current[1], current[2]))
                current = None
            continue
        prefix, entity_type, kind = tag.split("-")
        if prefix == "B":
            if current:
                spans.add(Span(current[0], i, current[1], current[2]))
            current = (i, entity_type, kind)
        else:
            if current is None or current[1:] != (entity_type, kind):
                raise ValueError(f"inconsistent {tag} at position {i}")
    if current:
        spans.add(Span(current[0], len(tags), current[1], current[2]))
    return spans
